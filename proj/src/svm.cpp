#include "debrisense/svm.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "debrisense/rng.hpp"
#include "debrisense/text_util.hpp"

namespace debrisense {
namespace {

constexpr double kTau = 1.0e-12;
constexpr int kModelVersion = 1;

bool in_up(double y, double a, double c) { return (y > 0 && a < c) || (y < 0 && a > 0); }
bool in_low(double y, double a, double c) { return (y > 0 && a > 0) || (y < 0 && a < c); }

double compute_bias(const Eigen::VectorXd& grad, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha, double c)
{
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        double v = -y[t] * grad[t];
        if (alpha[t] > 0.0 && alpha[t] < c) {
            sum_free += v;
            ++n_free;
        } else {
            // At a bound the admissible bias range is one-sided.
            bool caps_bias = (alpha[t] >= c) == (y[t] > 0);
            if (caps_bias) ub = std::min(ub, v);
            else lb = std::max(lb, v);
        }
    }
    if (n_free > 0) return sum_free / n_free;
    if (std::isinf(ub)) return lb;
    if (std::isinf(lb)) return ub;
    return 0.5 * (ub + lb);
}

}  // namespace

std::string to_string(KernelType k) { return k == KernelType::Linear ? "linear" : "rbf"; }

KernelType kernel_from_string(const std::string& s)
{
    std::string k = to_lower(trim(s));
    if (k == "linear") return KernelType::Linear;
    if (k == "rbf") return KernelType::Rbf;
    throw ConfigError("unknown kernel '" + s + "'");
}

double Kernel::operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const
{
    if (type == KernelType::Linear) return a.dot(b);
    return std::exp(-gamma * (a - b).squaredNorm());
}

Eigen::MatrixXd Kernel::gram(const Eigen::MatrixXd& rows) const
{
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i; j < n; ++j) {
            double v = (*this)(rows.row(i).transpose(), rows.row(j).transpose());
            k(i, j) = v;
            k(j, i) = v;
        }
    return k;
}

double dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha)
{
    Eigen::VectorXd ay = alpha.cwiseProduct(y);
    return alpha.sum() - 0.5 * ay.dot(gram * ay);
}

double kkt_violation(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha, double bias,
                     double c)
{
    Eigen::VectorXd f = gram * alpha.cwiseProduct(y);
    const double eps = 1.0e-12 * c;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        double margin = y[i] * (f[i] + bias);
        double v = 0.0;
        if (alpha[i] <= eps) v = std::max(0.0, 1.0 - margin);
        else if (alpha[i] >= c - eps) v = std::max(0.0, margin - 1.0);
        else v = std::abs(margin - 1.0);
        worst = std::max(worst, v);
    }
    return worst;
}

BinarySolution smo_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double c, double tolerance,
                         long max_iterations, std::uint64_t seed)
{
    const Eigen::Index n = y.size();
    if (gram.rows() != n || gram.cols() != n) throw DimensionError("Gram matrix does not match label count");
    if (!(c > 0.0)) throw InvalidArgument("SVM penalty C must be > 0");
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y[i] == 1.0) has_pos = true;
        else if (y[i] == -1.0) has_neg = true;
        else throw InvalidArgument("binary labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw SvmTrainingError("binary training needs both classes");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    if (seed != 0) {
        Rng rng(seed);
        std::shuffle(order.begin(), order.end(), rng);
    }

    BinarySolution sol;
    sol.alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd& alpha = sol.alpha;
    // Gradient of 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij.
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

    long iter = 0;
    for (;; ++iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        Eigen::Index i = -1, j = -1;
        for (Eigen::Index t : order) {
            double v = -y[t] * grad[t];
            if (in_up(y[t], alpha[t], c) && v > gmax) {
                gmax = v;
                i = t;
            }
            if (in_low(y[t], alpha[t], c) && v < gmin) {
                gmin = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || gmax - gmin < tolerance) break;
        if (iter >= max_iterations) {
            sol.converged = false;
            break;
        }

        const double qij = y[i] * y[j] * gram(i, j);
        const double qii = gram(i, i);
        const double qjj = gram(j, j);
        const double old_i = alpha[i];
        const double old_j = alpha[j];
        if (y[i] != y[j]) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            double delta = (-grad[i] - grad[j]) / quad;
            double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) {
                    alpha[j] = 0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            double delta = (grad[i] - grad[j]) / quad;
            double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0) {
                alpha[j] = 0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0) {
                alpha[i] = 0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i;
        const double dj = alpha[j] - old_j;
        for (Eigen::Index k = 0; k < n; ++k)
            grad[k] += y[k] * (y[i] * gram(k, i) * di + y[j] * gram(k, j) * dj);
    }

    sol.iterations = iter;
    sol.bias = compute_bias(grad, y, alpha, c);
    sol.dual_objective = dual_objective(gram, y, alpha);
    sol.max_kkt_violation = kkt_violation(gram, y, alpha, sol.bias, c);
    sol.alpha_y_sum = alpha.dot(y);
    if (!sol.converged) {
        std::ostringstream os;
        os << "SMO did not converge within " << max_iterations << " iterations (KKT violation "
           << sol.max_kkt_violation << ")";
        throw SvmTrainingError(os.str(), sol);
    }
    return sol;
}

double BinaryMachine::decision(const Kernel& kernel, const Eigen::VectorXd& x) const
{
    double f = bias;
    for (Eigen::Index i = 0; i < support_vectors.rows(); ++i)
        f += coefficients[i] * kernel(support_vectors.row(i).transpose(), x);
    return f;
}

Prediction SvmModel::predict(const Eigen::VectorXd& raw_features) const
{
    if (static_cast<std::size_t>(raw_features.size()) != feature_count())
        throw DimensionError("feature count does not match the model");
    if (machines.empty()) throw Error("model has no trained machines");
    Eigen::VectorXd x = apply_standardizer(scaler, raw_features);

    const std::size_t k = classes.size();
    std::vector<int> votes(k, 0);
    std::vector<double> strength(k, 0.0);
    Prediction p;
    for (const auto& m : machines) {
        double d = m.decision(kernel, x);
        p.decisions.push_back(d);
        // Ties at exactly zero go to the positive class.
        if (d >= 0.0) ++votes[static_cast<std::size_t>(m.positive)];
        else ++votes[static_cast<std::size_t>(m.negative)];
        strength[static_cast<std::size_t>(m.positive)] += d;
        strength[static_cast<std::size_t>(m.negative)] -= d;
    }
    p.decision = p.decisions.front();
    int best = 0;
    for (std::size_t c = 1; c < k; ++c) {
        auto b = static_cast<std::size_t>(best);
        if (votes[c] > votes[b] || (votes[c] == votes[b] && strength[c] > strength[b])) best = static_cast<int>(c);
    }
    p.label = best;
    return p;
}

void LabeledDataset::validate() const
{
    if (static_cast<std::size_t>(features.rows()) != labels.size()) throw DimensionError("feature rows and labels differ in count");
    if (!features.allFinite()) throw InvalidArgument("dataset contains non-finite features");
    for (int l : labels)
        if (l < 0 || static_cast<std::size_t>(l) >= classes.size()) throw InvalidArgument("label outside class list");
}

SvmModel svm_train(const LabeledDataset& data, const SvmParams& params)
{
    data.validate();
    if (!(params.c > 0.0)) throw InvalidArgument("SVM penalty C must be > 0");
    std::set<int> present(data.labels.begin(), data.labels.end());
    if (present.size() < 2) throw SvmTrainingError("training data must contain at least two classes");

    SvmModel model;
    model.c = params.c;
    model.classes = data.classes;
    model.kernel = params.kernel;
    model.scaler = fit_standardizer(data.features);
    if (model.scaler.retained.empty()) throw SvmTrainingError("no feature has non-zero variance");
    Eigen::MatrixXd x = apply_standardizer(model.scaler, data.features);

    if (model.kernel.type == KernelType::Rbf && model.kernel.gamma <= 0.0) {
        double mean = x.mean();
        double var = (x.array() - mean).square().mean();
        model.kernel.gamma = 1.0 / (static_cast<double>(x.cols()) * (var > 0.0 ? var : 1.0));
    }

    const int k = static_cast<int>(data.classes.size());
    for (int a = 0; a < k; ++a) {
        for (int b = a + 1; b < k; ++b) {
            if (!present.contains(a) || !present.contains(b)) continue;
            std::vector<Eigen::Index> rows;
            for (std::size_t i = 0; i < data.labels.size(); ++i)
                if (data.labels[i] == a || data.labels[i] == b) rows.push_back(static_cast<Eigen::Index>(i));
            Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), x.cols());
            Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                sub.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
                y[static_cast<Eigen::Index>(r)] = data.labels[static_cast<std::size_t>(rows[r])] == a ? 1.0 : -1.0;
            }
            Eigen::MatrixXd gram = model.kernel.gram(sub);
            BinarySolution sol = smo_solve(gram, y, params.c, params.tolerance, params.max_iterations,
                                           params.seed == 0 ? 0 : derive_seed(params.seed, {static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b)}));

            BinaryMachine m;
            m.positive = a;
            m.negative = b;
            m.bias = sol.bias;
            m.max_kkt_violation = sol.max_kkt_violation;
            m.alpha_y_sum = sol.alpha_y_sum;
            m.iterations = sol.iterations;
            std::vector<Eigen::Index> sv;
            for (Eigen::Index i = 0; i < sol.alpha.size(); ++i)
                if (sol.alpha[i] > 0.0) sv.push_back(i);
            m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), sub.cols());
            m.coefficients.resize(static_cast<Eigen::Index>(sv.size()));
            for (std::size_t s = 0; s < sv.size(); ++s) {
                m.support_vectors.row(static_cast<Eigen::Index>(s)) = sub.row(sv[s]);
                m.coefficients[static_cast<Eigen::Index>(s)] = sol.alpha[sv[s]] * y[sv[s]];
            }
            model.machines.push_back(std::move(m));
        }
    }
    return model;
}

std::string SvmModel::to_json() const
{
    nlohmann::json j;
    j["format"] = "debrisense-svm";
    j["version"] = kModelVersion;
    j["kernel"] = {{"type", to_string(kernel.type)}, {"gamma", kernel.gamma}};
    j["c"] = c;
    j["classes"] = classes;
    j["scaler"] = {{"mean", scaler.mean},
                   {"stddev", scaler.stddev},
                   {"retained", scaler.retained},
                   {"dropped", scaler.dropped},
                   {"warnings", scaler.warnings}};
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : machines) {
        nlohmann::json jm;
        jm["positive"] = m.positive;
        jm["negative"] = m.negative;
        jm["bias"] = m.bias;
        jm["max_kkt_violation"] = m.max_kkt_violation;
        jm["alpha_y_sum"] = m.alpha_y_sum;
        jm["iterations"] = m.iterations;
        jm["coefficients"] = std::vector<double>(m.coefficients.data(), m.coefficients.data() + m.coefficients.size());
        nlohmann::json svs = nlohmann::json::array();
        for (Eigen::Index r = 0; r < m.support_vectors.rows(); ++r) {
            Eigen::VectorXd row = m.support_vectors.row(r).transpose();
            svs.push_back(std::vector<double>(row.data(), row.data() + row.size()));
        }
        jm["support_vectors"] = std::move(svs);
        ms.push_back(std::move(jm));
    }
    j["machines"] = std::move(ms);
    return j.dump(1);
}

SvmModel SvmModel::from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "debrisense-svm") throw ConfigError("model file: wrong format tag");
        if (j.at("version").get<int>() != kModelVersion) throw ConfigError("model file: unsupported version");
        SvmModel m;
        m.kernel.type = kernel_from_string(j.at("kernel").at("type").get<std::string>());
        m.kernel.gamma = j.at("kernel").at("gamma").get<double>();
        m.c = j.at("c").get<double>();
        m.classes = j.at("classes").get<std::vector<std::string>>();
        const auto& s = j.at("scaler");
        m.scaler.mean = s.at("mean").get<std::vector<double>>();
        m.scaler.stddev = s.at("stddev").get<std::vector<double>>();
        m.scaler.retained = s.at("retained").get<std::vector<int>>();
        m.scaler.dropped = s.at("dropped").get<std::vector<int>>();
        m.scaler.warnings = s.at("warnings").get<std::vector<std::string>>();
        for (const auto& jm : j.at("machines")) {
            BinaryMachine b;
            b.positive = jm.at("positive").get<int>();
            b.negative = jm.at("negative").get<int>();
            b.bias = jm.at("bias").get<double>();
            b.max_kkt_violation = jm.at("max_kkt_violation").get<double>();
            b.alpha_y_sum = jm.at("alpha_y_sum").get<double>();
            b.iterations = jm.at("iterations").get<long>();
            auto coef = jm.at("coefficients").get<std::vector<double>>();
            b.coefficients = Eigen::Map<Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
            const auto& svs = jm.at("support_vectors");
            b.support_vectors.resize(static_cast<Eigen::Index>(svs.size()), static_cast<Eigen::Index>(m.scaler.retained.size()));
            for (std::size_t r = 0; r < svs.size(); ++r) {
                auto row = svs[r].get<std::vector<double>>();
                if (row.size() != m.scaler.retained.size()) throw ConfigError("model file: support vector width mismatch");
                for (std::size_t c = 0; c < row.size(); ++c)
                    b.support_vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
            }
            m.machines.push_back(std::move(b));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
}

void SvmModel::save(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file '" + path + "'");
    out << to_json() << '\n';
}

SvmModel SvmModel::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace debrisense
