#include "debrisense/materials.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "debrisense/text_util.hpp"

namespace debrisense {
namespace {

double interpolate(const MaterialProperties& m, const std::vector<double>& values, double f)
{
    const auto& fs = m.frequencies_hz;
    if (fs.empty()) throw MaterialError("material '" + m.name + "' has no frequency table");
    if (fs.size() == 1) {
        if (f == fs.front()) return values.front();
        throw MaterialError("material '" + m.name + "' is tabulated at a single frequency");
    }
    if (!(f >= fs.front() && f <= fs.back())) {
        std::ostringstream os;
        os << "frequency " << f << " Hz outside tabulated range of material '" << m.name << "' ["
           << fs.front() << ", " << fs.back() << "]";
        throw MaterialError(os.str());
    }
    auto it = std::upper_bound(fs.begin(), fs.end(), f);
    if (it == fs.end()) return values.back();
    std::size_t hi = static_cast<std::size_t>(it - fs.begin());
    std::size_t lo = hi - 1;
    double t = (f - fs[lo]) / (fs[hi] - fs[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

}  // namespace

double MaterialProperties::refractive_index_at(double frequency_hz) const
{
    return interpolate(*this, refractive_index, frequency_hz);
}

double MaterialProperties::absorption_at(double frequency_hz) const
{
    return interpolate(*this, absorption_per_m, frequency_hz);
}

void MaterialProperties::validate() const
{
    if (frequencies_hz.empty() || frequencies_hz.size() != refractive_index.size() ||
        frequencies_hz.size() != absorption_per_m.size())
        throw ConfigError("material '" + name + "': frequency, index and absorption tables must have equal, non-zero length");
    if (!std::is_sorted(frequencies_hz.begin(), frequencies_hz.end()) ||
        std::adjacent_find(frequencies_hz.begin(), frequencies_hz.end()) != frequencies_hz.end())
        throw ConfigError("material '" + name + "': frequencies must be strictly increasing");
    for (double n : refractive_index)
        if (!(n >= 1.0)) throw ConfigError("material '" + name + "': refractive index must be >= 1");
    for (double a : absorption_per_m)
        if (!(a >= 0.0)) throw ConfigError("material '" + name + "': absorption must be >= 0");
    if (!(roughness_sigma_m >= 0.0)) throw ConfigError("material '" + name + "': roughness must be >= 0");
    if (!(correlation_length_m > 0.0)) throw ConfigError("material '" + name + "': correlation length must be > 0");
    if (!(facet_lx_m > 0.0 && facet_ly_m > 0.0)) throw ConfigError("material '" + name + "': facet dimensions must be > 0");
}

void MaterialProperties::validate_for_frequency(double frequency_hz) const
{
    double lambda = wavelength(frequency_hz);
    if (facet_lx_m < 10.0 * lambda || facet_ly_m < 10.0 * lambda) {
        std::ostringstream os;
        os << "material '" << name << "': facet " << facet_lx_m << " x " << facet_ly_m
           << " m is not >= 10 wavelengths at " << frequency_hz << " Hz";
        throw ConfigError(os.str());
    }
    (void)refractive_index_at(frequency_hz);
}

MaterialProperties MaterialProperties::lossless(double n, double f_min, double f_max)
{
    MaterialProperties m;
    m.name = "lossless";
    m.frequencies_hz = {f_min, f_max};
    m.refractive_index = {n, n};
    m.absorption_per_m = {0.0, 0.0};
    return m;
}

void MaterialLibrary::add(MaterialProperties material)
{
    material.validate();
    std::string key = material.name;
    materials_.insert_or_assign(std::move(key), std::move(material));
}

const MaterialProperties& MaterialLibrary::get(const std::string& name) const
{
    auto it = materials_.find(name);
    if (it == materials_.end()) throw MaterialError("unknown material '" + name + "'");
    return it->second;
}

MaterialLibrary MaterialLibrary::from_ini_string(const std::string& text)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("material file: ") + e.what());
    }
    MaterialLibrary lib;
    for (const auto& [section, body] : tree) {
        MaterialProperties m;
        m.name = section;
        try {
            m.frequencies_hz = parse_number_list(body.get<std::string>("frequencies_hz"));
            m.refractive_index = parse_number_list(body.get<std::string>("refractive_index"));
            m.absorption_per_m = parse_number_list(body.get<std::string>("absorption_per_m"));
            m.roughness_sigma_m = parse_number(body.get<std::string>("roughness_sigma_m"));
            m.correlation_length_m = parse_number(body.get<std::string>("correlation_length_m"));
            m.facet_lx_m = parse_number(body.get<std::string>("facet_lx_m"));
            m.facet_ly_m = parse_number(body.get<std::string>("facet_ly_m"));
        } catch (const pt::ptree_error& e) {
            throw ConfigError("material '" + section + "': " + e.what());
        }
        lib.add(std::move(m));
    }
    return lib;
}

MaterialLibrary MaterialLibrary::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open material file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return from_ini_string(buf.str());
}

std::string MaterialLibrary::to_ini_string() const
{
    std::ostringstream os;
    os << std::setprecision(17);
    bool first = true;
    for (const auto& [name, m] : materials_) {
        if (!first) os << '\n';
        first = false;
        os << '[' << name << "]\n";
        os << "frequencies_hz = " << format_number_list(m.frequencies_hz) << '\n';
        os << "refractive_index = " << format_number_list(m.refractive_index) << '\n';
        os << "absorption_per_m = " << format_number_list(m.absorption_per_m) << '\n';
        os << "roughness_sigma_m = " << format_number(m.roughness_sigma_m) << '\n';
        os << "correlation_length_m = " << format_number(m.correlation_length_m) << '\n';
        os << "facet_lx_m = " << format_number(m.facet_lx_m) << '\n';
        os << "facet_ly_m = " << format_number(m.facet_ly_m) << '\n';
    }
    return os.str();
}

MaterialLibrary MaterialLibrary::defaults()
{
    MaterialLibrary lib;

    // Glass: low-loss dielectric, absorption rising with frequency.
    MaterialProperties glass;
    glass.name = "smooth_glass";
    glass.frequencies_hz = {1.0e10, 1.0e11, 1.0e12, 1.0e13};
    glass.refractive_index = {1.95, 1.95, 1.95, 1.95};
    glass.absorption_per_m = {2.0, 20.0, 200.0, 2000.0};
    glass.roughness_sigma_m = 5.0e-6;
    glass.correlation_length_m = 5.0e-4;
    glass.facet_lx_m = 0.15;
    glass.facet_ly_m = 0.15;
    lib.add(glass);

    // Metal: conductor-like medium with n = kappa = 100, i.e. alpha = 4 pi f kappa / c.
    MaterialProperties metal;
    metal.name = "rough_metal";
    metal.frequencies_hz = {1.0e10, 1.0e13};
    metal.refractive_index = {100.0, 100.0};
    const double kappa = 100.0;
    for (double f : metal.frequencies_hz) metal.absorption_per_m.push_back(4.0 * kPi * f * kappa / kSpeedOfLight);
    metal.roughness_sigma_m = 4.0e-5;
    metal.correlation_length_m = 5.0e-4;
    metal.facet_lx_m = 0.15;
    metal.facet_ly_m = 0.15;
    lib.add(metal);
    return lib;
}

}  // namespace debrisense
