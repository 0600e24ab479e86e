#include "debrisense/features.hpp"

#include <algorithm>
#include <cmath>

namespace debrisense {

const std::array<std::string, FeatureVector::kSize>& FeatureVector::names()
{
    static const std::array<std::string, kSize> n{"mean", "var", "max", "min", "skew"};
    return n;
}

Eigen::VectorXd FeatureVector::to_eigen() const
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(kSize));
    v << mean, variance, max, min, skewness;
    return v;
}

bool FeatureVector::finite() const
{
    auto a = to_array();
    return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

FeatureVector extract_features(std::span<const Complex> csi)
{
    if (csi.size() < 2) throw InvalidArgument("feature extraction needs at least 2 CSI entries");
    std::vector<double> mag(csi.size());
    std::transform(csi.begin(), csi.end(), mag.begin(), [](const Complex& z) { return std::abs(z); });

    const double n = static_cast<double>(mag.size());
    FeatureVector fv;
    double sum = 0.0;
    for (double m : mag) sum += m;
    fv.mean = sum / n;
    auto [lo, hi] = std::minmax_element(mag.begin(), mag.end());
    fv.min = *lo;
    fv.max = *hi;

    double m2 = 0.0;
    double m3 = 0.0;
    for (double m : mag) {
        double d = m - fv.mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    fv.variance = m2;
    fv.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    return fv;
}

FeatureVector extract_features(const CMatrix& csi)
{
    return extract_features(std::span<const Complex>(csi.data(), static_cast<std::size_t>(csi.size())));
}

FeatureVector extract_features(const std::vector<CMatrix>& subbands)
{
    std::vector<Complex> pooled;
    for (const auto& m : subbands) pooled.insert(pooled.end(), m.data(), m.data() + m.size());
    return extract_features(std::span<const Complex>(pooled));
}

StandardizationParams fit_standardizer(const Eigen::MatrixXd& rows)
{
    if (rows.rows() < 2) throw InvalidArgument("standardization needs at least 2 training rows");
    StandardizationParams p;
    const double n = static_cast<double>(rows.rows());
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        double mean = rows.col(j).mean();
        double var = (rows.col(j).array() - mean).square().sum() / n;
        double sd = std::sqrt(var);
        p.mean.push_back(mean);
        p.stddev.push_back(sd);
        // Spread below round-off of the column scale counts as constant.
        double scale = rows.col(j).cwiseAbs().maxCoeff();
        if (sd > 1.0e-12 * scale && sd > 0.0) {
            p.retained.push_back(static_cast<int>(j));
        } else {
            p.dropped.push_back(static_cast<int>(j));
            p.warnings.push_back("feature " + std::to_string(j) + " has zero variance and was dropped");
        }
    }
    if (p.retained.empty()) p.warnings.push_back("all features have zero variance");
    return p;
}

Eigen::VectorXd apply_standardizer(const StandardizationParams& params, const Eigen::VectorXd& x)
{
    if (static_cast<std::size_t>(x.size()) != params.input_dim())
        throw DimensionError("feature count does not match the standardizer");
    Eigen::VectorXd out(static_cast<Eigen::Index>(params.retained.size()));
    for (std::size_t k = 0; k < params.retained.size(); ++k) {
        auto j = static_cast<std::size_t>(params.retained[k]);
        out[static_cast<Eigen::Index>(k)] = (x[static_cast<Eigen::Index>(j)] - params.mean[j]) / params.stddev[j];
    }
    return out;
}

Eigen::MatrixXd apply_standardizer(const StandardizationParams& params, const Eigen::MatrixXd& rows)
{
    Eigen::MatrixXd out(rows.rows(), static_cast<Eigen::Index>(params.retained.size()));
    for (Eigen::Index i = 0; i < rows.rows(); ++i) out.row(i) = apply_standardizer(params, Eigen::VectorXd(rows.row(i).transpose())).transpose();
    return out;
}

}  // namespace debrisense
