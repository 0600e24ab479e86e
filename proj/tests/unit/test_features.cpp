#include <doctest.h>

#include <cmath>

#include "debrisense/features.hpp"
#include "debrisense/rng.hpp"
#include "oracles.hpp"

using namespace debrisense;

namespace {

void check_close(double got, double expect, double tol)
{
    double scale = std::max(std::abs(expect), 1e-300);
    CHECK(std::abs(got - expect) <= tol * scale);
}

}  // namespace

TEST_SUITE("features")
{
    TEST_CASE("constant magnitude")
    {
        CMatrix m = CMatrix::Constant(3, 4, Complex(3, 4));
        auto f = extract_features(m);
        CHECK(f.mean == doctest::Approx(5.0));
        CHECK(f.variance == 0.0);
        CHECK(f.max == 5.0);
        CHECK(f.min == 5.0);
        CHECK(f.skewness == 0.0);
    }

    TEST_CASE("hand-checked sets")
    {
        std::vector<Complex> a{1.0, Complex(0, 2), -3.0, Complex(0, -4)};
        auto f = extract_features(std::span<const Complex>(a));
        CHECK(f.mean == doctest::Approx(2.5));
        CHECK(f.variance == doctest::Approx(1.25));
        CHECK(f.max == 4.0);
        CHECK(f.min == 1.0);
        CHECK(std::abs(f.skewness) < 1e-12);
        std::vector<Complex> b{1.0, 1.0, 4.0};
        auto g = extract_features(std::span<const Complex>(b));
        CHECK(g.mean == doctest::Approx(2.0));
        CHECK(g.variance == doctest::Approx(2.0));
        CHECK(g.skewness == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }

    TEST_CASE("brute-force moments on random matrices")
    {
        Rng rng(2024);
        std::uniform_int_distribution<int> dim(2, 20);
        for (int t = 0; t < 100; ++t) {
            CMatrix m(dim(rng), dim(rng));
            for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = complex_normal(rng, 1e-6);
            std::vector<double> mag;
            for (Eigen::Index i = 0; i < m.size(); ++i) mag.push_back(std::abs(m(i)));
            auto o = oracle::moments(mag);
            auto f = extract_features(m);
            check_close(f.mean, o.mean, 1e-12);
            check_close(f.variance, o.var, 1e-12);
            check_close(f.max, o.max, 1e-12);
            check_close(f.min, o.min, 1e-12);
            check_close(f.skewness, o.skew, 1e-12);
            CHECK(f.max >= f.mean);
            CHECK(f.mean >= f.min);
            CHECK(f.finite());
        }
    }

    TEST_CASE("pooled sub-band features equal features of the concatenation")
    {
        CMatrix a = CMatrix::Random(3, 3), b = CMatrix::Random(3, 3);
        CMatrix both(3, 6);
        both << a, b;
        auto f = extract_features(std::vector<CMatrix>{a, b});
        auto g = extract_features(both);
        CHECK(f.mean == doctest::Approx(g.mean).epsilon(1e-14));
        CHECK(f.variance == doctest::Approx(g.variance).epsilon(1e-12));
        CHECK(f.skewness == doctest::Approx(g.skewness).epsilon(1e-10));
    }

    TEST_CASE("too little data")
    {
        std::vector<Complex> one{1.0};
        CHECK_THROWS_AS(extract_features(std::span<const Complex>(one)), InvalidArgument);
    }

    TEST_CASE("standardizer")
    {
        Eigen::MatrixXd x(6, 3);
        x << 1, 7, 10, 2, 7, 20, 3, 7, 30, 4, 7, 40, 5, 7, 50, 9, 7, 60;
        auto p = fit_standardizer(x);
        CHECK(p.retained == std::vector<int>{0, 2});
        CHECK(p.dropped == std::vector<int>{1});
        CHECK(p.warnings.size() == 1);
        auto z = apply_standardizer(p, x);
        CHECK(z.cols() == 2);
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(z.col(j).mean()) < 1e-10);
            CHECK(z.col(j).squaredNorm() / 6.0 == doctest::Approx(1.0));
        }
        Eigen::VectorXd mean(3);
        mean << p.mean[0], p.mean[1], p.mean[2];
        CHECK(apply_standardizer(p, mean).norm() < 1e-15);
        CHECK_THROWS_AS(apply_standardizer(p, Eigen::VectorXd(Eigen::VectorXd::Zero(2))), DimensionError);
    }
}
