#pragma once

#include <map>
#include <string>
#include <vector>

#include "debrisense/common.hpp"

namespace debrisense {

/// Electromagnetic and surface description of a debris material.
///
/// Refractive index and absorption are tabulated against frequency and
/// linearly interpolated; evaluating outside the tabulated range is an error.
struct MaterialProperties {
    std::string name;
    std::vector<double> frequencies_hz;
    std::vector<double> refractive_index;
    std::vector<double> absorption_per_m;
    double roughness_sigma_m = 0.0;
    double correlation_length_m = 1.0e-3;
    double facet_lx_m = 0.15;
    double facet_ly_m = 0.15;

    double refractive_index_at(double frequency_hz) const;
    double absorption_at(double frequency_hz) const;
    double facet_area() const { return facet_lx_m * facet_ly_m; }

    /// Structural checks plus the facet >= 10 wavelengths constraint at the
    /// highest simulated wavelength (lowest frequency).
    void validate() const;
    void validate_for_frequency(double frequency_hz) const;

    /// Lossless, smooth, frequency-flat material (handy for limits and tests).
    static MaterialProperties lossless(double n, double f_min = 1.0e9, double f_max = 1.0e13);
};

/// Named collection of materials, loaded from INI text (one section per material).
class MaterialLibrary {
public:
    MaterialLibrary() = default;

    void add(MaterialProperties material);
    const MaterialProperties& get(const std::string& name) const;
    bool contains(const std::string& name) const { return materials_.contains(name); }
    const std::map<std::string, MaterialProperties>& all() const { return materials_; }

    static MaterialLibrary from_ini_string(const std::string& text);
    static MaterialLibrary from_file(const std::string& path);
    std::string to_ini_string() const;

    /// Shipped defaults for the "smooth_glass" and "rough_metal" debris classes.
    static MaterialLibrary defaults();

private:
    std::map<std::string, MaterialProperties> materials_;
};

}  // namespace debrisense
