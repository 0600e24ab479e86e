#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "debrisense/features.hpp"

namespace debrisense {

enum class KernelType { Linear, Rbf };

std::string to_string(KernelType k);
KernelType kernel_from_string(const std::string& s);

struct Kernel {
    KernelType type = KernelType::Rbf;
    /// RBF width; <= 0 means "auto": 1 / (n_features * var(standardized features)).
    double gamma = 0.0;

    double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
    Eigen::MatrixXd gram(const Eigen::MatrixXd& rows) const;
};

struct SvmParams {
    Kernel kernel;
    double c = 1.0;
    double tolerance = 1.0e-3;
    long max_iterations = 100000;
    /// Randomizes the scan order used to break working-set ties.
    std::uint64_t seed = 0;
};

/// Dual solution of one binary soft-margin problem (labels +/-1).
struct BinarySolution {
    Eigen::VectorXd alpha;
    double bias = 0.0;
    long iterations = 0;
    double dual_objective = 0.0;
    double max_kkt_violation = 0.0;
    double alpha_y_sum = 0.0;
    bool converged = true;
};

class SvmTrainingError : public Error {
public:
    SvmTrainingError(const std::string& what, std::optional<BinarySolution> best = std::nullopt)
        : Error(what), best_(std::move(best))
    {
    }
    const std::optional<BinarySolution>& best() const { return best_; }

private:
    std::optional<BinarySolution> best_;
};

/// SMO with maximal-violating-pair working-set selection on a precomputed Gram matrix.
BinarySolution smo_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double c, double tolerance,
                         long max_iterations, std::uint64_t seed = 0);

/// sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij
double dual_objective(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha);

/// Largest violation of the soft-margin KKT conditions in units of y f(x).
double kkt_violation(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha, double bias,
                     double c);

/// One pairwise machine; decision >= 0 votes for `positive`.
struct BinaryMachine {
    int positive = 0;
    int negative = 1;
    Eigen::MatrixXd support_vectors;  // rows, standardized
    Eigen::VectorXd coefficients;     // alpha_i y_i
    double bias = 0.0;
    double max_kkt_violation = 0.0;
    double alpha_y_sum = 0.0;
    long iterations = 0;

    double decision(const Kernel& kernel, const Eigen::VectorXd& x) const;
};

struct Prediction {
    int label = 0;
    /// Decision value of the first machine (the only one for binary models).
    double decision = 0.0;
    std::vector<double> decisions;
};

/// Standardizer plus one-vs-one kernel machines over the class list.
struct SvmModel {
    Kernel kernel;
    double c = 1.0;
    StandardizationParams scaler;
    std::vector<std::string> classes;
    std::vector<BinaryMachine> machines;

    Prediction predict(const Eigen::VectorXd& raw_features) const;
    std::size_t feature_count() const { return scaler.input_dim(); }

    std::string to_json() const;
    static SvmModel from_json(const std::string& text);
    void save(const std::string& path) const;
    static SvmModel load(const std::string& path);
};

/// Rows of raw features with integer labels indexing `classes`.
struct LabeledDataset {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::vector<std::string> classes;

    std::size_t size() const { return labels.size(); }
    void validate() const;
};

SvmModel svm_train(const LabeledDataset& data, const SvmParams& params);

}  // namespace debrisense
