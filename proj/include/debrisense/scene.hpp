#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "debrisense/common.hpp"
#include "debrisense/materials.hpp"

namespace debrisense {

/// Transmitter/receiver separation and relative speed for one snapshot.
/// The transmitter sits at the origin and the receiver at (d, 0, 0) km.
struct LinkGeometry {
    double distance_km = 500.0;
    double relative_velocity_kms = 7.0;
    double time_s = 0.0;

    void validate() const;
    Vec3 tx_position() const { return {}; }
    Vec3 rx_position() const { return {distance_km, 0.0, 0.0}; }
};

enum class DebrisClass { SmoothGlass, RoughMetal };

std::string to_string(DebrisClass c);
DebrisClass debris_class_from_string(const std::string& s);
/// Default material name for a debris class.
std::string material_name(DebrisClass c);

struct DebrisObject {
    Vec3 position_km;
    DebrisClass debris_class = DebrisClass::SmoothGlass;
    MaterialProperties material;
    double characteristic_size_m = 0.25;
};

struct SceneConfig {
    LinkGeometry geometry;
    double density_per_km3 = 0.0;
    /// Minor semi-axes of the prolate spheroid; the major semi-axis is always d/2.
    double minor_semi_axis_y_km = 60.0;
    double minor_semi_axis_z_km = 60.0;
    DebrisClass debris_class = DebrisClass::SmoothGlass;
    MaterialProperties material;
    double characteristic_size_m = 0.25;

    Vec3 semi_axes_km() const { return {geometry.distance_km / 2.0, minor_semi_axis_y_km, minor_semi_axis_z_km}; }
    double volume_km3() const;
};

struct DebrisScene {
    LinkGeometry geometry;
    Vec3 semi_axes_km;
    double density_per_km3 = 0.0;
    std::vector<DebrisObject> objects;
    std::uint64_t seed = 0;

    Vec3 center_km() const { return {geometry.distance_km / 2.0, 0.0, 0.0}; }
    bool contains(const Vec3& p) const;
};

enum class Mechanism { LoS, Reflection, Scattering, Diffraction };

std::string to_string(Mechanism m);

struct PathLengths {
    double s1_km = 0.0;
    double s2_km = 0.0;
    double d_km = 0.0;
};

struct PathGeometry {
    double s1_km = 0.0;
    double s2_km = 0.0;
    double d_km = 0.0;
    double incidence_angle_rad = 0.0;
    /// Perpendicular clearance of the debris from the tx-rx segment.
    double clearance_m = 0.0;
    Mechanism mechanism = Mechanism::LoS;
};

/// Poisson(density * volume) objects, uniform in the link ellipsoid.
DebrisScene generate_scene(const SceneConfig& config, std::uint64_t seed);

PathLengths path_lengths(const Vec3& tx_km, const Vec3& rx_km, const Vec3& debris_km);

/// Half the angle between the two ray segments meeting at the debris.
double incidence_angle(double s1, double s2, double d);

/// (s1 + s2 - d) / c in seconds, lengths in km.
double excess_delay(double s1_km, double s2_km, double d_km);

/// Knife-edge excess path [m] for clearance h_d [m] and segment lengths [km].
double diffraction_excess_path(double clearance_m, double s1_km, double s2_km);

/// Distance [m] from the debris to the tx-rx segment.
double clearance_to_segment(const Vec3& tx_km, const Vec3& rx_km, const Vec3& debris_km);

PathGeometry path_geometry(const LinkGeometry& link, const Vec3& debris_km, Mechanism mechanism);

/// Line-oriented text export: a header line with d, v, density, semi-axes and
/// seed, then one "x,y,z,class,size" line per object.
std::string scene_to_text(const DebrisScene& scene);
/// Inverse of scene_to_text; materials are resolved through the library.
DebrisScene scene_from_text(const std::string& text, const MaterialLibrary& materials);

}  // namespace debrisense
