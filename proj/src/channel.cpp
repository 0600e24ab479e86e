#include "debrisense/channel.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "debrisense/rng.hpp"
#include "debrisense/text_util.hpp"

namespace debrisense {
namespace {

Angles angles_from_direction(double along_boresight, double uy, double uz)
{
    Angles a;
    a.elevation = std::acos(std::clamp(along_boresight, -1.0, 1.0));
    a.azimuth = (uy == 0.0 && uz == 0.0) ? 0.0 : std::atan2(uz, uy);
    return a;
}

void write_le_double(std::ostream& out, double v)
{
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
}

double read_le_double(std::istream& in)
{
    char buf[8];
    if (!in.read(buf, 8)) throw Error("channel snapshot: truncated binary file");
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    return std::bit_cast<double>(bits);
}

}  // namespace

void ArrayConfig::validate() const
{
    if (n_tx < 1 || n_rx < 1) throw ConfigError("array sizes must be >= 1");
    if (!(spacing_tx > 0.0 && spacing_rx > 0.0)) throw ConfigError("array spacings must be > 0");
}

CVector steering_vector(int n, double spacing, double elevation, double azimuth)
{
    if (n < 1) throw InvalidArgument("steering vector needs n >= 1");
    const double omega = std::sin(elevation) * std::cos(azimuth);
    CVector a(n);
    for (int k = 0; k < n; ++k) a[k] = std::polar(1.0, wrap_cycles(-static_cast<double>(k) * spacing * omega));
    return a;
}

Angles departure_angles(const LinkGeometry& link, const Vec3& target_km)
{
    Vec3 u = target_km - link.tx_position();
    double r = u.norm();
    if (r <= 0.0) throw GeometryError("departure direction undefined");
    return angles_from_direction(u.x / r, u.y / r, u.z / r);
}

Angles arrival_angles(const LinkGeometry& link, const Vec3& source_km)
{
    // Receiver boresight points back toward the transmitter (-x).
    Vec3 u = source_km - link.rx_position();
    double r = u.norm();
    if (r <= 0.0) throw GeometryError("arrival direction undefined");
    return angles_from_direction(-u.x / r, u.y / r, u.z / r);
}

std::vector<PathContribution> build_paths(const DebrisScene& scene, const std::vector<Interaction>& interactions,
                                          double frequency_hz, const PropagationOptions& options)
{
    const LinkGeometry& link = scene.geometry;
    std::vector<PathContribution> paths;
    paths.reserve(interactions.size() + 1);

    PathContribution los;
    los.mechanism = Mechanism::LoS;
    los.gain = los_response(frequency_hz, link);
    los.delay_s = los_delay(link);
    paths.push_back(los);

    for (const auto& it : interactions) {
        if (it.object_index >= scene.objects.size()) throw DimensionError("interaction refers to a missing object");
        const DebrisObject& obj = scene.objects[it.object_index];
        const PathGeometry& g = it.geometry;
        PathContribution p;
        p.mechanism = it.mechanism;
        p.aod = departure_angles(link, obj.position_km);
        p.aoa = arrival_angles(link, obj.position_km);
        double tau_los = g.d_km * kMetersPerKm / kSpeedOfLight;
        switch (it.mechanism) {
        case Mechanism::Reflection:
            p.gain = reflected_response(frequency_hz, g.s1_km, g.s2_km, g.d_km, obj.material, options.polarization);
            p.delay_s = tau_los + excess_delay(g.s1_km, g.s2_km, g.d_km);
            break;
        case Mechanism::Scattering:
            p.gain = scattered_response(frequency_hz, g.s1_km, g.s2_km, g.d_km, it.scatter, obj.material,
                                        options.polarization, options.max_series_terms);
            p.delay_s = tau_los + excess_delay(g.s1_km, g.s2_km, g.d_km);
            break;
        case Mechanism::Diffraction:
            p.gain = diffracted_response(frequency_hz, g.s1_km, g.s2_km, g.d_km, g.clearance_m, options.diffraction);
            p.delay_s = tau_los + diffraction_excess_path(g.clearance_m, g.s1_km, g.s2_km) / kSpeedOfLight;
            break;
        case Mechanism::LoS:
            throw InvalidArgument("debris interactions cannot be LoS");
        }
        paths.push_back(p);
    }
    return paths;
}

SubbandChannel assemble_subband(std::vector<PathContribution> paths, const ArrayConfig& config, double frequency_hz,
                                double velocity_mps, int los_indicator)
{
    config.validate();
    if (los_indicator != 0 && los_indicator != 1) throw InvalidArgument("LoS indicator must be 0 or 1");
    SubbandChannel ch;
    ch.center_frequency_hz = frequency_hz;
    ch.los_indicator = los_indicator;
    ch.matrix = CMatrix::Zero(config.n_rx, config.n_tx);
    const Complex doppler = doppler_factor(frequency_hz, velocity_mps);
    for (const auto& p : paths) {
        if (p.mechanism == Mechanism::LoS && los_indicator == 0) continue;
        CVector a_rx = steering_vector(config.n_rx, config.spacing_rx, p.aoa.elevation, p.aoa.azimuth);
        CVector a_tx = steering_vector(config.n_tx, config.spacing_tx, p.aod.elevation, p.aod.azimuth);
        ch.matrix.noalias() += (p.gain * doppler) * (a_rx * a_tx.transpose());
    }
    ch.paths = std::move(paths);
    return ch;
}

CMatrix apply_rician_smallscale(const CMatrix& deterministic, double k_factor_db, std::uint64_t seed)
{
    if (std::isnan(k_factor_db)) throw InvalidArgument("K-factor must not be NaN");
    if (std::isinf(k_factor_db) && k_factor_db > 0.0) return deterministic;
    const double k = std::pow(10.0, k_factor_db / 10.0);
    const double n_entries = static_cast<double>(deterministic.size());
    const double diffuse_scale = n_entries > 0.0 ? deterministic.norm() / std::sqrt(n_entries) : 0.0;

    Rng rng(seed);
    CMatrix w(deterministic.rows(), deterministic.cols());
    for (Eigen::Index r = 0; r < w.rows(); ++r)
        for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = complex_normal(rng);
    return std::sqrt(k / (k + 1.0)) * deterministic + (std::sqrt(1.0 / (k + 1.0)) * diffuse_scale) * w;
}

std::vector<double> subband_grid(double center_hz, int n_subbands, double bandwidth_hz)
{
    if (n_subbands < 1) throw InvalidArgument("need at least one sub-band");
    if (!(bandwidth_hz >= 0.0)) throw InvalidArgument("bandwidth must be >= 0");
    std::vector<double> grid(static_cast<std::size_t>(n_subbands));
    const double spacing = bandwidth_hz / n_subbands;
    for (int i = 0; i < n_subbands; ++i)
        grid[static_cast<std::size_t>(i)] = center_hz + (i - (n_subbands - 1) / 2.0) * spacing;
    return grid;
}

void write_channel_snapshot(const std::string& bin_path, const std::string& sidecar_path,
                            const std::vector<SubbandChannel>& channels)
{
    std::ofstream bin(bin_path, std::ios::binary);
    std::ofstream side(sidecar_path);
    if (!bin || !side) throw Error("cannot open channel snapshot output");
    Eigen::Index rows = channels.empty() ? 0 : channels.front().matrix.rows();
    Eigen::Index cols = channels.empty() ? 0 : channels.front().matrix.cols();
    side << "format = complex128-le-rowmajor-interleaved\n";
    side << "n_rx = " << rows << "\nn_tx = " << cols << "\nn_subbands = " << channels.size() << '\n';
    side << "frequencies_hz =";
    for (std::size_t i = 0; i < channels.size(); ++i) side << (i ? ", " : " ") << format_number(channels[i].center_frequency_hz);
    side << '\n';
    for (const auto& ch : channels) {
        if (ch.matrix.rows() != rows || ch.matrix.cols() != cols) throw DimensionError("sub-band matrices differ in shape");
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) {
                write_le_double(bin, ch.matrix(r, c).real());
                write_le_double(bin, ch.matrix(r, c).imag());
            }
    }
}

std::vector<SubbandChannel> read_channel_snapshot(const std::string& bin_path, const std::string& sidecar_path)
{
    std::ifstream side(sidecar_path);
    std::ifstream bin(bin_path, std::ios::binary);
    if (!side || !bin) throw Error("cannot open channel snapshot input");
    long rows = -1, cols = -1, count = -1;
    std::vector<double> freqs;
    std::string line;
    while (std::getline(side, line)) {
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "n_rx") rows = std::stol(value);
        else if (key == "n_tx") cols = std::stol(value);
        else if (key == "n_subbands") count = std::stol(value);
        else if (key == "frequencies_hz" && !value.empty()) freqs = parse_number_list(value);
    }
    if (rows < 0 || cols < 0 || count < 0 || static_cast<long>(freqs.size()) != count)
        throw Error("channel snapshot sidecar is incomplete");
    std::vector<SubbandChannel> out(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        auto& ch = out[static_cast<std::size_t>(i)];
        ch.center_frequency_hz = freqs[static_cast<std::size_t>(i)];
        ch.matrix.resize(rows, cols);
        for (long r = 0; r < rows; ++r)
            for (long c = 0; c < cols; ++c) {
                double re = read_le_double(bin);
                double im = read_le_double(bin);
                ch.matrix(r, c) = {re, im};
            }
    }
    return out;
}

}  // namespace debrisense
