#pragma once

#include "debrisense/common.hpp"
#include "debrisense/materials.hpp"
#include "debrisense/scene.hpp"

namespace debrisense {

enum class Polarization { TE, TM };

std::string to_string(Polarization p);
Polarization polarization_from_string(const std::string& s);

/// Incidence angle theta1, scatter elevation theta2 and scatter azimuth theta3.
struct ScatterGeometry {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;

    void validate() const;
};

/// Per-branch fitting factors of the piecewise knife-edge loss.
struct DiffractionParams {
    double mu1 = 1.0;
    double mu2 = 1.0;
    double mu3 = 1.0;
};

struct FresnelCoefficients {
    Complex te;
    Complex tm;

    Complex select(Polarization p) const { return p == Polarization::TE ? te : tm; }
};

/// c / (4 pi f r), r in meters.
double fspl_amplitude(double frequency_hz, double range_m);

/// exp(-j 2 pi f v / c), v in m/s, phase wrapped to (-pi, pi].
Complex doppler_factor(double frequency_hz, double velocity_mps);

/// Direct path: FSPL magnitude, delay d/c, unit molecular absorption.
Complex los_response(double frequency_hz, const LinkGeometry& link);
double los_delay(const LinkGeometry& link);

/// Complex wave impedance of the material (ohms).
Complex wave_impedance(double frequency_hz, const MaterialProperties& material);

/// Vacuum-to-material interface, impedance form with complex Snell angle.
FresnelCoefficients fresnel_coefficients(double frequency_hz, double incidence_rad, const MaterialProperties& material);

/// Rayleigh roughness factor exp(-g/2), g = (4 pi sigma cos(theta) / lambda)^2.
double roughness_coefficient(double frequency_hz, double sigma_m, double incidence_rad);

/// rho(f) * Gamma_p.
Complex reflection_coefficient(double frequency_hz, double incidence_rad, const MaterialProperties& material,
                               Polarization pol);

Complex reflected_response(double frequency_hz, double s1_km, double s2_km, double d_km,
                           const MaterialProperties& material, Polarization pol);

/// Truncated diffuse sum  sum_{m>=1} g^m / (m! m) * exp(-a / m)  scaled by exp(-log_scale).
struct SeriesResult {
    double sum = 0.0;
    int terms = 0;
    /// Contribution of the last evaluated term relative to the running sum.
    double last_relative_term = 0.0;
    bool converged = true;
};

SeriesResult beckmann_series(double g_sca, double a, int max_terms = 200, double log_scale = 0.0);

struct ScatteringResult {
    Complex value;
    SeriesResult series;
    double specular_reflectance = 0.0;  // rho0
    double geometric_factor = 0.0;      // F
    double roughness_factor = 0.0;      // g_sca
    /// Set when the term cap was reached with a relative term above 1e-6.
    bool convergence_warning = false;
};

/// Beckmann-Kirchhoff coefficient for a finite rough facet of the material.
ScatteringResult scattering_coefficient(double frequency_hz, const ScatterGeometry& geom,
                                        const MaterialProperties& material, Polarization pol, int max_terms = 200);

Complex scattered_response(double frequency_hz, double s1_km, double s2_km, double d_km, const ScatterGeometry& geom,
                           const MaterialProperties& material, Polarization pol, int max_terms = 200);

/// Knife-edge parameter v = h sqrt(2 (s1 + s2) / (lambda s1 s2)); all lengths in meters.
double fresnel_kirchhoff_parameter(double clearance_m, double frequency_hz, double s1_m, double s2_m);

/// Piecewise empirical loss D(v) for v > 0.
double diffraction_loss(double v, const DiffractionParams& params = {});

Complex diffracted_response(double frequency_hz, double s1_km, double s2_km, double d_km, double clearance_m,
                            const DiffractionParams& params = {});

}  // namespace debrisense
