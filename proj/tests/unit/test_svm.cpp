#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "debrisense/rng.hpp"
#include "debrisense/svm.hpp"
#include "oracles.hpp"

using namespace debrisense;

namespace {

struct Toy {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

Toy random_toy(int n, std::uint64_t seed)
{
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Toy t{Eigen::MatrixXd(n, 2), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        double yi = i % 2 ? 1.0 : -1.0;
        t.y[i] = yi;
        t.x(i, 0) = g(rng) + 0.8 * yi;
        t.x(i, 1) = g(rng) - 0.4 * yi;
    }
    return t;
}

Toy xor_toy()
{
    Toy t{Eigen::MatrixXd(8, 2), Eigen::VectorXd(8)};
    const double pts[8][2] = {{1, 1}, {1.2, 0.9}, {-1, -1}, {-0.9, -1.1}, {1, -1}, {0.9, -1.2}, {-1, 1}, {-1.1, 0.8}};
    for (int i = 0; i < 8; ++i) {
        t.x(i, 0) = pts[i][0];
        t.x(i, 1) = pts[i][1];
        t.y[i] = i < 4 ? 1.0 : -1.0;
    }
    return t;
}

LabeledDataset blobs(int n_per_class, int n_classes, double sep, std::uint64_t seed, int dim = 3)
{
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    LabeledDataset d;
    d.features.resize(n_per_class * n_classes, dim);
    for (int c = 0; c < n_classes; ++c) {
        d.classes.push_back("c" + std::to_string(c));
        for (int i = 0; i < n_per_class; ++i) {
            int r = c * n_per_class + i;
            for (int j = 0; j < dim; ++j) d.features(r, j) = g(rng) + (j == c % dim ? sep : 0.0) + 0.1 * j;
            d.labels.push_back(c);
        }
    }
    return d;
}

double training_accuracy(const SvmModel& m, const LabeledDataset& d)
{
    int ok = 0;
    for (std::size_t i = 0; i < d.size(); ++i)
        ok += m.predict(d.features.row(static_cast<Eigen::Index>(i)).transpose()).label == d.labels[i];
    return static_cast<double>(ok) / static_cast<double>(d.size());
}

}  // namespace

TEST_SUITE("svm")
{
    TEST_CASE("SMO against exhaustive enumeration")
    {
        for (int inst = 0; inst < 10; ++inst) {
            auto t = random_toy(6 + inst % 5, 100 + inst);
            Kernel k{inst % 2 ? KernelType::Linear : KernelType::Rbf, 0.7};
            double c = (inst % 3 == 0) ? 0.5 : (inst % 3 == 1 ? 1.0 : 10.0);
            auto gram = k.gram(t.x);
            auto sol = smo_solve(gram, t.y, c, 1e-3, 100000);
            double best = oracle::svm_dual_optimum(gram, t.y, c);
            CHECK(std::abs(sol.dual_objective - best) <= 1e-3 * std::abs(best));
            CHECK(sol.dual_objective == doctest::Approx(dual_objective(gram, t.y, sol.alpha)));
            CHECK(sol.dual_objective <= best + 1e-9);
            CHECK(sol.max_kkt_violation <= 1e-3);
            CHECK(std::abs(sol.alpha_y_sum) <= 1e-6);
            for (int i = 0; i < sol.alpha.size(); ++i) {
                CHECK(sol.alpha[i] >= 0.0);
                CHECK(sol.alpha[i] <= c);
            }
        }
    }

    TEST_CASE("XOR with an RBF kernel")
    {
        auto t = xor_toy();
        Kernel k{KernelType::Rbf, 1.0};
        auto gram = k.gram(t.x);
        auto sol = smo_solve(gram, t.y, 10.0, 1e-3, 100000);
        double best = oracle::svm_dual_optimum(gram, t.y, 10.0);
        CHECK(std::abs(sol.dual_objective - best) <= 1e-3 * std::abs(best));
        Eigen::VectorXd f = gram * sol.alpha.cwiseProduct(t.y);
        for (int i = 0; i < 8; ++i) CHECK(t.y[i] * (f[i] + sol.bias) > 0.0);

        LabeledDataset d{t.x, {0, 0, 0, 0, 1, 1, 1, 1}, {"a", "b"}};
        SvmParams p;
        p.kernel = {KernelType::Rbf, 1.0};
        p.c = 10.0;
        CHECK(training_accuracy(svm_train(d, p), d) == 1.0);
        p.kernel = {KernelType::Linear, 0.0};
        CHECK(training_accuracy(svm_train(d, p), d) < 1.0);
    }

    TEST_CASE("separable blobs")
    {
        auto d = blobs(30, 2, 8.0, 1);
        SvmParams p;
        auto m = svm_train(d, p);
        CHECK(training_accuracy(m, d) == 1.0);
        REQUIRE(m.machines.size() == 1);
        CHECK(m.machines[0].max_kkt_violation <= 1e-3);
        CHECK(std::abs(m.machines[0].alpha_y_sum) <= 1e-6);
        p.kernel = {KernelType::Linear, 0.0};
        CHECK(training_accuracy(svm_train(d, p), d) == 1.0);
        // a deep member of class 1 is never assigned class 0
        Eigen::VectorXd deep = d.features.row(45).transpose();
        CHECK(m.predict(deep).label == 1);
        CHECK(m.predict(deep).decision < 0.0);
    }

    TEST_CASE("auto gamma")
    {
        auto d = blobs(20, 2, 3.0, 2, 5);
        auto m = svm_train(d, {});
        CHECK(m.kernel.gamma == doctest::Approx(0.2).epsilon(1e-12));
    }

    TEST_CASE("multi-class one-vs-one")
    {
        auto d = blobs(25, 3, 9.0, 3);
        auto m = svm_train(d, {});
        CHECK(m.machines.size() == 3);
        CHECK(training_accuracy(m, d) == 1.0);
        auto p = m.predict(d.features.row(0).transpose());
        CHECK(p.decisions.size() == 3);
    }

    TEST_CASE("zero decision goes to the positive class")
    {
        SvmModel m;
        m.kernel = {KernelType::Linear, 0.0};
        m.classes = {"debris", "none"};
        m.scaler.mean = {0.0};
        m.scaler.stddev = {1.0};
        m.scaler.retained = {0};
        BinaryMachine bm;
        bm.support_vectors = Eigen::MatrixXd::Ones(1, 1);
        bm.coefficients = Eigen::VectorXd::Ones(1);
        bm.bias = 0.0;
        m.machines.push_back(bm);
        auto p = m.predict(Eigen::VectorXd::Zero(1));
        CHECK(p.decision == 0.0);
        CHECK(p.label == 0);
    }

    TEST_CASE("row permutation invariance")
    {
        auto d = blobs(20, 2, 1.5, 4);
        SvmParams p;
        p.tolerance = 1e-10;
        auto a = svm_train(d, p);
        std::vector<std::size_t> perm(d.size());
        std::iota(perm.begin(), perm.end(), 0);
        Rng rng(5);
        std::shuffle(perm.begin(), perm.end(), rng);
        LabeledDataset e = d;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            e.features.row(static_cast<Eigen::Index>(i)) = d.features.row(static_cast<Eigen::Index>(perm[i]));
            e.labels[i] = d.labels[perm[i]];
        }
        p.seed = 77;
        auto b = svm_train(e, p);
        auto probe = blobs(10, 2, 1.5, 6);
        for (Eigen::Index i = 0; i < probe.features.rows(); ++i) {
            Eigen::VectorXd x = probe.features.row(i).transpose();
            CHECK(std::abs(a.predict(x).decision - b.predict(x).decision) <= 1e-6);
        }
    }

    TEST_CASE("affine rescaling of a feature column")
    {
        auto d = blobs(20, 3, 2.0, 8);
        auto probe = blobs(10, 3, 2.0, 9);
        auto a = svm_train(d, {});
        auto ds = d;
        auto ps = probe;
        ds.features.col(1) = ds.features.col(1) * 250.0 + Eigen::VectorXd::Constant(ds.features.rows(), -3.0);
        ps.features.col(1) = ps.features.col(1) * 250.0 + Eigen::VectorXd::Constant(ps.features.rows(), -3.0);
        auto b = svm_train(ds, {});
        for (Eigen::Index i = 0; i < probe.features.rows(); ++i)
            CHECK(a.predict(probe.features.row(i).transpose()).label == b.predict(ps.features.row(i).transpose()).label);
    }

    TEST_CASE("model round trip")
    {
        auto d = blobs(15, 3, 2.0, 10);
        auto m = svm_train(d, {});
        auto path = (std::filesystem::temp_directory_path() / "debrisense_model_test.json").string();
        m.save(path);
        auto back = SvmModel::load(path);
        std::filesystem::remove(path);
        CHECK(back.classes == m.classes);
        CHECK(back.kernel.gamma == m.kernel.gamma);
        auto probe = blobs(5, 3, 2.0, 11);
        for (Eigen::Index i = 0; i < probe.features.rows(); ++i) {
            Eigen::VectorXd x = probe.features.row(i).transpose();
            auto p = m.predict(x), q = back.predict(x);
            REQUIRE(p.decisions.size() == q.decisions.size());
            for (std::size_t k = 0; k < p.decisions.size(); ++k) CHECK(std::abs(p.decisions[k] - q.decisions[k]) <= 1e-12);
        }
        CHECK_THROWS_AS(SvmModel::from_json("{}"), ConfigError);
        auto text = m.to_json();
        auto pos = text.find("\"version\"");
        REQUIRE(pos != std::string::npos);
        CHECK_THROWS_AS(SvmModel::from_json("not json"), ConfigError);
    }

    TEST_CASE("training preconditions")
    {
        auto d = blobs(5, 2, 2.0, 12);
        auto one = d;
        std::fill(one.labels.begin(), one.labels.end(), 0);
        CHECK_THROWS_AS(svm_train(one, {}), SvmTrainingError);
        auto bad = d;
        bad.features(0, 0) = std::nan("");
        CHECK_THROWS_AS(svm_train(bad, {}), InvalidArgument);
        SvmParams p;
        p.c = 0.0;
        CHECK_THROWS_AS(svm_train(d, p), InvalidArgument);
        auto flat = d;
        flat.features.setConstant(1.0);
        CHECK_THROWS_AS(svm_train(flat, {}), SvmTrainingError);
    }

    TEST_CASE("iteration cap")
    {
        auto d = blobs(40, 2, 0.2, 13);
        SvmParams p;
        p.max_iterations = 2;
        CHECK_THROWS_AS(svm_train(d, p), SvmTrainingError);
    }
}
