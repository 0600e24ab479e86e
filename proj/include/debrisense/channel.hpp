#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "debrisense/propagation.hpp"
#include "debrisense/scene.hpp"

namespace debrisense {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Uniform linear arrays at both ends; spacings are normalized to the wavelength.
struct ArrayConfig {
    int n_tx = 16;
    int n_rx = 16;
    double spacing_tx = 0.5;
    double spacing_rx = 0.5;

    void validate() const;
};

/// Elevation theta is measured from the array broadside (the link axis), so
/// the directional cosine sin(theta) cos(phi) is the component along the array.
struct Angles {
    double azimuth = 0.0;
    double elevation = 0.0;
};

struct PathContribution {
    Mechanism mechanism = Mechanism::LoS;
    Complex gain;
    double delay_s = 0.0;
    Angles aod;
    Angles aoa;
};

struct SubbandChannel {
    double center_frequency_hz = 0.0;
    CMatrix matrix;
    std::vector<PathContribution> paths;
    int los_indicator = 1;
};

/// One activated debris interaction feeding the channel assembly.
struct Interaction {
    std::size_t object_index = 0;
    Mechanism mechanism = Mechanism::Reflection;
    PathGeometry geometry;
    ScatterGeometry scatter;  // used for Mechanism::Scattering only
};

struct PropagationOptions {
    Polarization polarization = Polarization::TE;
    DiffractionParams diffraction;
    int max_series_terms = 200;
};

CVector steering_vector(int n, double spacing, double elevation, double azimuth);

Angles departure_angles(const LinkGeometry& link, const Vec3& target_km);
Angles arrival_angles(const LinkGeometry& link, const Vec3& source_km);

/// LoS path followed by one path per interaction, with gains evaluated at f.
std::vector<PathContribution> build_paths(const DebrisScene& scene, const std::vector<Interaction>& interactions,
                                          double frequency_hz, const PropagationOptions& options);

/// Sum of gain * Doppler * a_rx(aoa) a_tx(aod)^T over paths; the LoS term is
/// multiplied by the indicator.
SubbandChannel assemble_subband(std::vector<PathContribution> paths, const ArrayConfig& config, double frequency_hz,
                                double velocity_mps, int los_indicator = 1);

/// Hybrid Rician small-scale term with the diffuse part scaled to the
/// deterministic channel energy. Infinite K returns the input unchanged.
CMatrix apply_rician_smallscale(const CMatrix& deterministic, double k_factor_db, std::uint64_t seed);

/// Uniformly spaced sub-band centers covering [fc - B/2, fc + B/2].
std::vector<double> subband_grid(double center_hz, int n_subbands, double bandwidth_hz);

/// Binary snapshot: row-major, little-endian, interleaved re/im float64 per
/// sub-band; the text sidecar records dimensions and sub-band frequencies.
void write_channel_snapshot(const std::string& bin_path, const std::string& sidecar_path,
                            const std::vector<SubbandChannel>& channels);
std::vector<SubbandChannel> read_channel_snapshot(const std::string& bin_path, const std::string& sidecar_path);

}  // namespace debrisense
