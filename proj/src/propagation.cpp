#include "debrisense/propagation.hpp"

#include <cmath>
#include <limits>

#include "debrisense/text_util.hpp"

namespace debrisense {
namespace {

constexpr double kHalfPi = kPi / 2.0;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

void require_frequency(double f)
{
    if (!(f > 0.0) || !std::isfinite(f)) throw InvalidArgument("frequency must be finite and > 0");
}

}  // namespace

std::string to_string(Polarization p) { return p == Polarization::TE ? "TE" : "TM"; }

Polarization polarization_from_string(const std::string& s)
{
    std::string k = to_lower(trim(s));
    if (k == "te") return Polarization::TE;
    if (k == "tm") return Polarization::TM;
    throw ConfigError("unknown polarization '" + s + "'");
}

void ScatterGeometry::validate() const
{
    if (!(theta1 >= 0.0 && theta1 < kHalfPi) || !(theta2 >= 0.0 && theta2 < kHalfPi))
        throw InvalidArgument("scatter angles theta1, theta2 must lie in [0, pi/2)");
    if (!(theta3 >= 0.0 && theta3 < 2.0 * kPi)) throw InvalidArgument("scatter azimuth theta3 must lie in [0, 2 pi)");
}

double fspl_amplitude(double frequency_hz, double range_m)
{
    if (!(frequency_hz > 0.0) || !(range_m > 0.0)) throw InvalidArgument("fspl_amplitude needs f > 0 and r > 0");
    return kSpeedOfLight / (4.0 * kPi * frequency_hz * range_m);
}

Complex doppler_factor(double frequency_hz, double velocity_mps)
{
    require_frequency(frequency_hz);
    // ~1e8 cycles at THz; form the product in extended precision.
    long double cycles = -static_cast<long double>(frequency_hz) * velocity_mps / kSpeedOfLight;
    cycles -= std::round(cycles);
    return std::polar(1.0, wrap_cycles(static_cast<double>(cycles)));
}

double los_delay(const LinkGeometry& link) { return link.distance_km * kMetersPerKm / kSpeedOfLight; }

Complex los_response(double frequency_hz, const LinkGeometry& link)
{
    link.validate();
    double amplitude = fspl_amplitude(frequency_hz, link.distance_km * kMetersPerKm);
    return amplitude * delay_phasor(frequency_hz, los_delay(link));
}

Complex wave_impedance(double frequency_hz, const MaterialProperties& material)
{
    require_frequency(frequency_hz);
    double n = material.refractive_index_at(frequency_hz);
    double alpha = material.absorption_at(frequency_hz);
    double kappa = alpha * kSpeedOfLight / (4.0 * kPi * frequency_hz);
    Complex eps_r(n * n - kappa * kappa, -2.0 * n * kappa);
    return std::sqrt(Complex(kMu0, 0.0) / (kEpsilon0 * eps_r));
}

FresnelCoefficients fresnel_coefficients(double frequency_hz, double incidence_rad, const MaterialProperties& material)
{
    if (!(incidence_rad >= 0.0 && incidence_rad < kHalfPi)) throw InvalidArgument("incidence angle must lie in [0, pi/2)");
    const Complex z1(std::sqrt(kMu0 / kEpsilon0), 0.0);
    const Complex z2 = wave_impedance(frequency_hz, material);
    const Complex index = z1 / z2;
    const double cos_i = std::cos(incidence_rad);
    const Complex sin_t = std::sin(incidence_rad) / index;
    Complex cos_t = std::sqrt(1.0 - sin_t * sin_t);
    if (cos_t.real() < 0.0) cos_t = -cos_t;

    FresnelCoefficients out;
    out.te = (z2 * cos_i - z1 * cos_t) / (z2 * cos_i + z1 * cos_t);
    out.tm = (z2 * cos_t - z1 * cos_i) / (z2 * cos_t + z1 * cos_i);
    return out;
}

double roughness_coefficient(double frequency_hz, double sigma_m, double incidence_rad)
{
    require_frequency(frequency_hz);
    if (!(sigma_m >= 0.0)) throw InvalidArgument("roughness sigma must be >= 0");
    double x = 4.0 * kPi * sigma_m * std::cos(incidence_rad) / wavelength(frequency_hz);
    return std::exp(-0.5 * x * x);
}

Complex reflection_coefficient(double frequency_hz, double incidence_rad, const MaterialProperties& material,
                               Polarization pol)
{
    double rho = roughness_coefficient(frequency_hz, material.roughness_sigma_m, incidence_rad);
    return rho * fresnel_coefficients(frequency_hz, incidence_rad, material).select(pol);
}

Complex reflected_response(double frequency_hz, double s1_km, double s2_km, double d_km,
                           const MaterialProperties& material, Polarization pol)
{
    double theta = incidence_angle(s1_km, s2_km, d_km);
    // Exactly on-axis debris sits at grazing incidence.
    theta = std::min(theta, std::nextafter(kHalfPi, 0.0));
    double amplitude = fspl_amplitude(frequency_hz, (s1_km + s2_km) * kMetersPerKm);
    double delay = d_km * kMetersPerKm / kSpeedOfLight + excess_delay(s1_km, s2_km, d_km);
    return amplitude * reflection_coefficient(frequency_hz, theta, material, pol) * delay_phasor(frequency_hz, delay);
}

SeriesResult beckmann_series(double g_sca, double a, int max_terms, double log_scale)
{
    if (!(g_sca >= 0.0) || !(a >= 0.0)) throw InvalidArgument("beckmann_series needs g >= 0 and a >= 0");
    if (max_terms < 1) throw InvalidArgument("beckmann_series needs at least one term");
    SeriesResult r;
    if (g_sca == 0.0) {
        r.terms = 1;
        return r;
    }
    const double log_g = std::log(g_sca);
    double previous = 0.0;
    for (int m = 1; m <= max_terms; ++m) {
        double md = static_cast<double>(m);
        double log_term = md * log_g - std::lgamma(md + 1.0) - std::log(md) - a / md - log_scale;
        double term = std::exp(log_term);
        r.sum += term;
        r.terms = m;
        r.last_relative_term = r.sum > 0.0 ? term / r.sum : 0.0;
        // The term ratio g m/(m+1)^2 exp(a/(m(m+1))) is decreasing in m, so once
        // it drops below one the tail is bounded by a geometric series.
        double ratio = g_sca * md / ((md + 1.0) * (md + 1.0)) * std::exp(a / (md * (md + 1.0)));
        if (m > 1 && previous > 0.0 && ratio < 1.0) {
            double tail = term * ratio / (1.0 - ratio);
            if (r.sum > 0.0 && tail / r.sum < 1.0e-10 && r.last_relative_term < 1.0e-10) return r;
        }
        previous = term;
    }
    r.converged = r.last_relative_term <= 1.0e-6;
    return r;
}

ScatteringResult scattering_coefficient(double frequency_hz, const ScatterGeometry& geom,
                                        const MaterialProperties& material, Polarization pol, int max_terms)
{
    require_frequency(frequency_hz);
    geom.validate();
    const double lambda = wavelength(frequency_hz);
    if (material.facet_lx_m < 10.0 * lambda || material.facet_ly_m < 10.0 * lambda)
        throw InvalidArgument("scattering facet must be at least 10 wavelengths on each side");

    const double k = 2.0 * kPi / lambda;
    const double c1 = std::cos(geom.theta1), s1 = std::sin(geom.theta1);
    const double c2 = std::cos(geom.theta2), s2 = std::sin(geom.theta2);
    const double c3 = std::cos(geom.theta3), s3 = std::sin(geom.theta3);

    const double f_den = c2 * (c1 + c2);
    if (std::abs(f_den) < 1.0e-12) throw GeometryError("grazing scatter geometry: F denominator vanishes");
    const double big_f = (1.0 + c1 * c2 - s1 * s2 * c3) / f_den;

    const double vx = k * (s1 - s2 * c3);
    const double vy = k * (-s2 * s3);
    const double vxy2 = vx * vx + vy * vy;
    const double lcorr = material.correlation_length_m;
    const double sigma = material.roughness_sigma_m;

    ScatteringResult out;
    out.geometric_factor = big_f;
    out.specular_reflectance = sinc(vx * material.facet_lx_m) * sinc(vy * material.facet_ly_m);
    out.roughness_factor = k * k * sigma * sigma * (c1 + c2) * (c1 + c2);

    // Rayleigh exponent at the incidence angle.
    const double gx = 4.0 * kPi * sigma * c1 / lambda;
    const double g = gx * gx;

    out.series = beckmann_series(out.roughness_factor, vxy2 * lcorr * lcorr / 4.0, max_terms, g);
    out.convergence_warning = !out.series.converged;

    const double diffuse_weight = kPi * lcorr * lcorr * big_f * big_f / material.facet_area();
    const double power = out.specular_reflectance * out.specular_reflectance * std::exp(-g) +
                         diffuse_weight * out.series.sum;
    const Complex gamma = fresnel_coefficients(frequency_hz, geom.theta1, material).select(pol);
    out.value = gamma * std::sqrt(power);
    return out;
}

Complex scattered_response(double frequency_hz, double s1_km, double s2_km, double d_km, const ScatterGeometry& geom,
                           const MaterialProperties& material, Polarization pol, int max_terms)
{
    double amplitude = fspl_amplitude(frequency_hz, (s1_km + s2_km) * kMetersPerKm);
    double delay = d_km * kMetersPerKm / kSpeedOfLight + excess_delay(s1_km, s2_km, d_km);
    Complex s = scattering_coefficient(frequency_hz, geom, material, pol, max_terms).value;
    return amplitude * s * delay_phasor(frequency_hz, delay);
}

double fresnel_kirchhoff_parameter(double clearance_m, double frequency_hz, double s1_m, double s2_m)
{
    require_frequency(frequency_hz);
    if (!(s1_m > 0.0 && s2_m > 0.0)) throw InvalidArgument("knife-edge parameter needs s1, s2 > 0");
    if (!(clearance_m >= 0.0)) throw InvalidArgument("clearance must be >= 0");
    return clearance_m * std::sqrt(2.0 * (s1_m + s2_m) / (wavelength(frequency_hz) * s1_m * s2_m));
}

double diffraction_loss(double v, const DiffractionParams& params)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("diffraction loss needs finite v > 0");
    if (v <= 1.0) return params.mu1 * 0.5 * std::exp(-0.95 * v);
    if (v <= 2.4) {
        double t = 0.38 - 0.1 * v;
        return params.mu2 * (0.4 - std::sqrt(0.12 - t * t));
    }
    return params.mu3 * 0.225 / v;
}

Complex diffracted_response(double frequency_hz, double s1_km, double s2_km, double d_km, double clearance_m,
                            const DiffractionParams& params)
{
    double s1 = s1_km * kMetersPerKm;
    double s2 = s2_km * kMetersPerKm;
    double v = fresnel_kirchhoff_parameter(clearance_m, frequency_hz, s1, s2);
    double amplitude = fspl_amplitude(frequency_hz, s1 + s2) * diffraction_loss(v, params);
    double delay = d_km * kMetersPerKm / kSpeedOfLight + diffraction_excess_path(clearance_m, s1_km, s2_km) / kSpeedOfLight;
    return amplitude * delay_phasor(frequency_hz, delay);
}

}  // namespace debrisense
