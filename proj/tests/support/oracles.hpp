#pragma once

// Reference computations used only by the tests. They share no code with
// the library and favour obviousness over speed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace oracle {

inline constexpr long double kC = 3.0e8L;
inline constexpr long double kPiL = 3.141592653589793238462643383279502884L;

struct Moments {
    double mean, var, max, min, skew;
};

// Two-pass population moments in long double.
inline Moments moments(const std::vector<double>& x)
{
    long double n = static_cast<long double>(x.size());
    long double s = 0.0L;
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (double v : x) {
        s += v;
        if (v > mx) mx = v;
        if (v < mn) mn = v;
    }
    long double mean = s / n;
    long double m2 = 0.0L, m3 = 0.0L;
    for (double v : x) {
        long double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    long double skew = m2 > 0.0L ? m3 / std::pow(m2, 1.5L) : 0.0L;
    return {static_cast<double>(mean), static_cast<double>(m2), mx, mn, static_cast<double>(skew)};
}

inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// sum_{m>=1} g^m / (m! m) evaluated term by term until the terms vanish.
inline double beckmann_partial_sum(long double g)
{
    long double term_fact = 1.0L;  // g^m / m!
    long double sum = 0.0L;
    for (int m = 1; m < 10000; ++m) {
        term_fact *= g / m;
        long double t = term_fact / m;
        sum += t;
        if (m > g && t < 1e-30L * sum) break;
    }
    return static_cast<double>(sum);
}

// Dual objective  sum(a) - 1/2 a' Q a,  Q_ij = y_i y_j K_ij.
inline double dual_value(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, const Eigen::VectorXd& a)
{
    Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(k);
    return a.sum() - 0.5 * a.dot(q * a);
}

// Exhaustive active-set enumeration for the soft-margin SVM dual.
// Every alpha is assigned to {0, C, free}; the free block plus the bias is
// solved from the stationarity and equality conditions, and the best
// feasible candidate is kept. Exponential, so only for tiny problems.
inline double svm_dual_optimum(const Eigen::MatrixXd& k, const Eigen::VectorXd& y, double c)
{
    const int n = static_cast<int>(y.size());
    Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(k);
    long total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> state(n);
    for (long code = 0; code < total; ++code) {
        long t = code;
        std::vector<int> free_idx;
        Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            state[i] = static_cast<int>(t % 3);
            t /= 3;
            if (state[i] == 1) a(i) = c;
            if (state[i] == 2) free_idx.push_back(i);
        }
        const int f = static_cast<int>(free_idx.size());
        if (f == 0) {
            if (std::abs(y.dot(a)) > 1e-9) continue;
        } else {
            // [Q_FF  y_F] [a_F]   [1 - Q_FU a_U]
            // [y_F'   0 ] [ b ] = [ -y_U' a_U  ]
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(f + 1, f + 1);
            Eigen::VectorXd rhs(f + 1);
            for (int r = 0; r < f; ++r) {
                int i = free_idx[r];
                for (int s = 0; s < f; ++s) m(r, s) = q(i, free_idx[s]);
                m(r, f) = y(i);
                m(f, r) = y(i);
                rhs(r) = 1.0 - q.row(i).dot(a);
            }
            rhs(f) = -y.dot(a);
            Eigen::VectorXd sol = m.completeOrthogonalDecomposition().solve(rhs);
            if ((m * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
            bool ok = true;
            for (int r = 0; r < f; ++r) {
                if (sol(r) < -1e-10 || sol(r) > c + 1e-10) ok = false;
                a(free_idx[r]) = std::clamp(sol(r), 0.0, c);
            }
            if (!ok || std::abs(y.dot(a)) > 1e-8) continue;
        }
        best = std::max(best, dual_value(k, y, a));
    }
    return best;
}

// Pearson chi-square of observed counts against Poisson(lambda). The last
// entry of counts_by_k holds every draw >= its index. Low-expectation bins
// are merged until each expects at least 5. Returns {statistic, dof}.
inline std::pair<double, int> poisson_chi_square(const std::vector<long>& counts_by_k, long n, double lambda)
{
    boost::math::poisson_distribution<double> pois(lambda);
    std::vector<double> exp_bins, obs_bins;
    double e_acc = 0.0, o_acc = 0.0;
    const int kmax = static_cast<int>(counts_by_k.size());
    for (int k = 0; k < kmax; ++k) {
        double p = (k == kmax - 1) ? boost::math::cdf(boost::math::complement(pois, k - 1)) : boost::math::pdf(pois, k);
        e_acc += p * n;
        o_acc += static_cast<double>(counts_by_k[k]);
        if (e_acc >= 5.0 && k < kmax - 1) {
            exp_bins.push_back(e_acc);
            obs_bins.push_back(o_acc);
            e_acc = o_acc = 0.0;
        }
    }
    if (e_acc > 0.0) {
        if (e_acc < 5.0 && !exp_bins.empty()) {
            exp_bins.back() += e_acc;
            obs_bins.back() += o_acc;
        } else {
            exp_bins.push_back(e_acc);
            obs_bins.push_back(o_acc);
        }
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < exp_bins.size(); ++i) {
        double d = obs_bins[i] - exp_bins[i];
        stat += d * d / exp_bins[i];
    }
    return {stat, static_cast<int>(exp_bins.size()) - 1};
}

inline double chi_square_critical(int dof, double alpha)
{
    boost::math::chi_squared_distribution<double> chi(dof);
    return boost::math::quantile(boost::math::complement(chi, alpha));
}

}  // namespace oracle
