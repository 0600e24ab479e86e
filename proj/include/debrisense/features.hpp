#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "debrisense/channel.hpp"

namespace debrisense {

/// Statistics of |CSI| over all entries. Population moments; the skewness of
/// constant data is defined as 0.
struct FeatureVector {
    double mean = 0.0;
    double variance = 0.0;
    double max = 0.0;
    double min = 0.0;
    double skewness = 0.0;

    static constexpr std::size_t kSize = 5;
    static const std::array<std::string, kSize>& names();

    std::array<double, kSize> to_array() const { return {mean, variance, max, min, skewness}; }
    static FeatureVector from_array(const std::array<double, kSize>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
    Eigen::VectorXd to_eigen() const;
    bool finite() const;
};

FeatureVector extract_features(std::span<const Complex> csi);
FeatureVector extract_features(const CMatrix& csi);
/// Pooled statistics over the concatenation of all sub-band estimates.
FeatureVector extract_features(const std::vector<CMatrix>& subbands);

/// Per-feature mean and standard deviation fitted on training rows.
/// Features with zero spread are dropped and listed in `dropped`.
struct StandardizationParams {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<int> retained;
    std::vector<int> dropped;
    std::vector<std::string> warnings;

    std::size_t input_dim() const { return mean.size(); }
    std::size_t output_dim() const { return retained.size(); }
};

StandardizationParams fit_standardizer(const Eigen::MatrixXd& rows);
Eigen::VectorXd apply_standardizer(const StandardizationParams& params, const Eigen::VectorXd& x);
Eigen::MatrixXd apply_standardizer(const StandardizationParams& params, const Eigen::MatrixXd& rows);

}  // namespace debrisense
