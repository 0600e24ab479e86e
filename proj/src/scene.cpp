#include "debrisense/scene.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "debrisense/rng.hpp"
#include "debrisense/text_util.hpp"

namespace debrisense {
namespace {

constexpr double kRelativeTolerance = 1.0e-9;

}  // namespace

void LinkGeometry::validate() const
{
    if (!(distance_km > 0.0) || !std::isfinite(distance_km)) throw ConfigError("link distance must be > 0");
    if (!(relative_velocity_kms >= 0.0) || !std::isfinite(relative_velocity_kms))
        throw ConfigError("relative velocity must be >= 0");
}

std::string to_string(DebrisClass c)
{
    switch (c) {
    case DebrisClass::SmoothGlass: return "smooth_glass";
    case DebrisClass::RoughMetal: return "rough_metal";
    }
    return "unknown";
}

DebrisClass debris_class_from_string(const std::string& s)
{
    std::string k = to_lower(trim(s));
    if (k == "smooth_glass" || k == "glass") return DebrisClass::SmoothGlass;
    if (k == "rough_metal" || k == "metal") return DebrisClass::RoughMetal;
    throw ConfigError("unknown debris class '" + s + "'");
}

std::string material_name(DebrisClass c) { return to_string(c); }

std::string to_string(Mechanism m)
{
    switch (m) {
    case Mechanism::LoS: return "los";
    case Mechanism::Reflection: return "reflection";
    case Mechanism::Scattering: return "scattering";
    case Mechanism::Diffraction: return "diffraction";
    }
    return "unknown";
}

double SceneConfig::volume_km3() const
{
    Vec3 a = semi_axes_km();
    return 4.0 / 3.0 * kPi * a.x * a.y * a.z;
}

bool DebrisScene::contains(const Vec3& p) const
{
    Vec3 q = p - center_km();
    double r = (q.x * q.x) / (semi_axes_km.x * semi_axes_km.x) + (q.y * q.y) / (semi_axes_km.y * semi_axes_km.y) +
               (q.z * q.z) / (semi_axes_km.z * semi_axes_km.z);
    return r <= 1.0;
}

DebrisScene generate_scene(const SceneConfig& config, std::uint64_t seed)
{
    config.geometry.validate();
    if (!std::isfinite(config.density_per_km3) || config.density_per_km3 < 0.0)
        throw ConfigError("debris density must be finite and >= 0");
    if (!(config.minor_semi_axis_y_km > 0.0 && config.minor_semi_axis_z_km > 0.0))
        throw ConfigError("ellipsoid semi-axes must be > 0");
    if (config.characteristic_size_m < 0.01) throw ConfigError("debris characteristic size must be >= 0.01 m");

    DebrisScene scene;
    scene.geometry = config.geometry;
    scene.semi_axes_km = config.semi_axes_km();
    scene.density_per_km3 = config.density_per_km3;
    scene.seed = seed;

    double mean = config.density_per_km3 * config.volume_km3();
    if (mean <= 0.0) return scene;

    Rng rng(seed);
    std::poisson_distribution<long> count_dist(mean);
    long count = count_dist(rng);

    const Vec3 a = scene.semi_axes_km;
    const Vec3 c = scene.center_km();
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    scene.objects.reserve(static_cast<std::size_t>(count));
    while (static_cast<long>(scene.objects.size()) < count) {
        double x = u(rng);
        double y = u(rng);
        double z = u(rng);
        if (x * x + y * y + z * z > 1.0) continue;
        DebrisObject obj;
        obj.position_km = c + Vec3{a.x * x, a.y * y, a.z * z};
        obj.debris_class = config.debris_class;
        obj.material = config.material;
        obj.characteristic_size_m = config.characteristic_size_m;
        scene.objects.push_back(std::move(obj));
    }
    return scene;
}

PathLengths path_lengths(const Vec3& tx_km, const Vec3& rx_km, const Vec3& debris_km)
{
    if (!tx_km.finite() || !rx_km.finite() || !debris_km.finite()) throw GeometryError("non-finite position");
    PathLengths p;
    p.d_km = (rx_km - tx_km).norm();
    p.s1_km = (debris_km - tx_km).norm();
    p.s2_km = (rx_km - debris_km).norm();
    if (p.d_km <= 0.0) throw GeometryError("degenerate geometry: transmitter and receiver coincide");
    if (p.s1_km <= 0.0 || p.s2_km <= 0.0) throw GeometryError("degenerate geometry: debris coincides with a terminal");
    return p;
}

double incidence_angle(double s1, double s2, double d)
{
    if (!(s1 > 0.0 && s2 > 0.0)) throw GeometryError("incidence angle needs s1, s2 > 0");
    double arg = (s1 * s1 + s2 * s2 - d * d) / (2.0 * s1 * s2);
    if (!std::isfinite(arg) || std::abs(arg) > 1.0 + kRelativeTolerance)
        throw GeometryError("incidence angle: triangle inequality violated");
    return 0.5 * std::acos(std::clamp(arg, -1.0, 1.0));
}

double excess_delay(double s1_km, double s2_km, double d_km)
{
    double excess = s1_km + s2_km - d_km;
    if (excess < 0.0) {
        if (-excess > kRelativeTolerance * std::max(d_km, 1.0)) throw GeometryError("negative excess path length");
        excess = 0.0;
    }
    return excess * kMetersPerKm / kSpeedOfLight;
}

double diffraction_excess_path(double clearance_m, double s1_km, double s2_km)
{
    if (!(s1_km > 0.0 && s2_km > 0.0)) throw GeometryError("diffraction excess path needs s1, s2 > 0");
    if (!(clearance_m >= 0.0)) throw GeometryError("clearance must be >= 0");
    double s1 = s1_km * kMetersPerKm;
    double s2 = s2_km * kMetersPerKm;
    return clearance_m * clearance_m * (s1 + s2) / (2.0 * s1 * s2);
}

double clearance_to_segment(const Vec3& tx_km, const Vec3& rx_km, const Vec3& debris_km)
{
    Vec3 axis = rx_km - tx_km;
    double len2 = axis.dot(axis);
    if (len2 <= 0.0) throw GeometryError("degenerate geometry: transmitter and receiver coincide");
    double t = std::clamp((debris_km - tx_km).dot(axis) / len2, 0.0, 1.0);
    Vec3 foot = tx_km + t * axis;
    return (debris_km - foot).norm() * kMetersPerKm;
}

PathGeometry path_geometry(const LinkGeometry& link, const Vec3& debris_km, Mechanism mechanism)
{
    Vec3 tx = link.tx_position();
    Vec3 rx = link.rx_position();
    PathLengths p = path_lengths(tx, rx, debris_km);
    PathGeometry g;
    g.s1_km = p.s1_km;
    g.s2_km = p.s2_km;
    g.d_km = p.d_km;
    g.incidence_angle_rad = incidence_angle(p.s1_km, p.s2_km, p.d_km);
    g.clearance_m = clearance_to_segment(tx, rx, debris_km);
    g.mechanism = mechanism;
    return g;
}

std::string scene_to_text(const DebrisScene& scene)
{
    std::ostringstream os;
    os << format_number(scene.geometry.distance_km) << ',' << format_number(scene.geometry.relative_velocity_kms) << ','
       << format_number(scene.density_per_km3) << ',' << format_number(scene.semi_axes_km.x) << ','
       << format_number(scene.semi_axes_km.y) << ',' << format_number(scene.semi_axes_km.z) << ',' << scene.seed << '\n';
    for (const auto& o : scene.objects) {
        os << format_number(o.position_km.x) << ',' << format_number(o.position_km.y) << ','
           << format_number(o.position_km.z) << ',' << to_string(o.debris_class) << ','
           << format_number(o.characteristic_size_m) << '\n';
    }
    return os.str();
}

DebrisScene scene_from_text(const std::string& text, const MaterialLibrary& materials)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("scene text: missing header line");
    auto head = split_list(line);
    if (head.size() != 7) throw ConfigError("scene text: header needs 7 fields");
    DebrisScene scene;
    scene.geometry.distance_km = parse_number(head[0]);
    scene.geometry.relative_velocity_kms = parse_number(head[1]);
    scene.density_per_km3 = parse_number(head[2]);
    scene.semi_axes_km = {parse_number(head[3]), parse_number(head[4]), parse_number(head[5])};
    scene.seed = std::stoull(head[6]);
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto f = split_list(line);
        if (f.size() != 5) throw ConfigError("scene text: object line needs 5 fields");
        DebrisObject o;
        o.position_km = {parse_number(f[0]), parse_number(f[1]), parse_number(f[2])};
        o.debris_class = debris_class_from_string(f[3]);
        o.material = materials.get(material_name(o.debris_class));
        o.characteristic_size_m = parse_number(f[4]);
        scene.objects.push_back(std::move(o));
    }
    return scene;
}

}  // namespace debrisense
