#include "debrisense/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "debrisense/text_util.hpp"

namespace debrisense {
namespace {

namespace pt = boost::property_tree;

double log_interp(const std::vector<double>& fs, const std::vector<double>& ps, double f)
{
    if (fs.size() == 1) return ps.front();
    double x = std::log10(f);
    auto it = std::upper_bound(fs.begin(), fs.end(), f);
    if (it == fs.end()) return ps.back();
    std::size_t hi = static_cast<std::size_t>(it - fs.begin());
    std::size_t lo = hi - 1;
    double x0 = std::log10(fs[lo]);
    double x1 = std::log10(fs[hi]);
    return ps[lo] + (x - x0) / (x1 - x0) * (ps[hi] - ps[lo]);
}

/// Flat key/value view of one INI section with unknown-key detection.
class Section {
public:
    Section(const pt::ptree& tree, std::string name) : name_(std::move(name))
    {
        if (auto child = tree.get_child_optional(pt::ptree::path_type(name_, '\0'))) {
            for (const auto& [key, value] : *child) values_[key] = value.data();
        }
    }

    bool has(const std::string& key) const { return values_.contains(key); }

    /// Present key whose value must not be blank.
    std::string required(const std::string& key)
    {
        std::string s = str(key, "");
        if (s.empty()) throw ConfigError("[" + name_ + "] " + key + " must not be empty");
        return s;
    }

    std::string str(const std::string& key, const std::string& fallback)
    {
        used_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? fallback : trim(it->second);
    }

    double number(const std::string& key, double fallback)
    {
        if (!has(key)) return fallback;
        return parse_number(required(key));
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback)
    {
        if (!has(key)) return fallback;
        return parse_number_list(required(key));
    }

    std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback)
    {
        std::string s = str(key, "");
        if (s.empty()) return fallback;
        try {
            std::size_t pos = 0;
            unsigned long long v = std::stoull(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("[" + name_ + "] " + key + ": not an unsigned integer: '" + s + "'");
        }
    }

    long integer(const std::string& key, long fallback)
    {
        double v = number(key, static_cast<double>(fallback));
        if (v != std::floor(v)) throw ConfigError("[" + name_ + "] " + key + " must be an integer");
        return static_cast<long>(v);
    }

    const std::map<std::string, std::string>& values() const { return values_; }
    void mark_used(const std::string& key) { used_.insert(key); }

    void reject_unknown() const
    {
        for (const auto& [k, v] : values_)
            if (!used_.contains(k)) throw ConfigError("[" + name_ + "] unknown key '" + k + "'");
    }

private:
    std::string name_;
    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

template <typename T>
std::string join(const std::vector<T>& xs, auto&& fmt)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += fmt(xs[i]);
    }
    return out;
}

}  // namespace

std::string to_string(Label l)
{
    switch (l) {
    case Label::None: return "none";
    case Label::SmoothGlass: return "smooth_glass";
    case Label::RoughMetal: return "rough_metal";
    }
    return "unknown";
}

Label label_from_string(const std::string& s)
{
    std::string k = to_lower(trim(s));
    if (k == "none") return Label::None;
    if (k == "smooth_glass" || k == "glass") return Label::SmoothGlass;
    if (k == "rough_metal" || k == "metal") return Label::RoughMetal;
    throw ConfigError("unknown label '" + s + "'");
}

DebrisClass debris_class_of(Label l)
{
    if (l == Label::SmoothGlass) return DebrisClass::SmoothGlass;
    if (l == Label::RoughMetal) return DebrisClass::RoughMetal;
    throw InvalidArgument("label 'none' has no debris class");
}

void InteractionTable::set(DebrisClass c, Entry e)
{
    const auto n = e.frequencies_hz.size();
    if (n == 0 || e.reflection.size() != n || e.scattering.size() != n || e.diffraction.size() != n)
        throw ConfigError("interaction table for " + to_string(c) + ": all rows need the same non-zero length");
    if (!std::is_sorted(e.frequencies_hz.begin(), e.frequencies_hz.end()) ||
        std::adjacent_find(e.frequencies_hz.begin(), e.frequencies_hz.end()) != e.frequencies_hz.end() ||
        !(e.frequencies_hz.front() > 0.0))
        throw ConfigError("interaction table for " + to_string(c) + ": frequencies must be positive and increasing");
    for (const auto* row : {&e.reflection, &e.scattering, &e.diffraction})
        for (double p : *row)
            if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("interaction probabilities must lie in [0, 1]");
    entries_.insert_or_assign(c, std::move(e));
}

MechanismProbabilities InteractionTable::at(DebrisClass c, double f) const
{
    auto it = entries_.find(c);
    if (it == entries_.end()) throw ConfigError("interaction table has no entry for " + to_string(c));
    const Entry& e = it->second;
    bool inside = e.frequencies_hz.size() == 1 ? f == e.frequencies_hz.front()
                                               : (f >= e.frequencies_hz.front() && f <= e.frequencies_hz.back());
    if (!inside) {
        std::ostringstream os;
        os << "interaction table for " << to_string(c) << " does not cover " << f << " Hz";
        throw ConfigError(os.str());
    }
    return {log_interp(e.frequencies_hz, e.reflection, f), log_interp(e.frequencies_hz, e.scattering, f),
            log_interp(e.frequencies_hz, e.diffraction, f)};
}

InteractionTable InteractionTable::uniform(double p, double f_min, double f_max)
{
    InteractionTable t;
    for (DebrisClass c : {DebrisClass::SmoothGlass, DebrisClass::RoughMetal})
        t.set(c, {{f_min, f_max}, {p, p}, {p, p}, {p, p}});
    return t;
}

InteractionTable InteractionTable::defaults()
{
    InteractionTable t;
    const std::vector<double> f{1.0e10, 3.0e10, 3.0e11, 3.0e12, 5.0e12, 1.0e13};
    // Glass interacts mostly through specular reflection, metal through scattering.
    t.set(DebrisClass::SmoothGlass, {f,
                                     {0.25, 0.25, 0.45, 0.85, 0.97, 0.97},
                                     {0.05, 0.05, 0.15, 0.35, 0.45, 0.50},
                                     {0.10, 0.10, 0.20, 0.40, 0.50, 0.50}});
    t.set(DebrisClass::RoughMetal, {f,
                                    {0.15, 0.15, 0.35, 0.80, 0.95, 0.95},
                                    {0.25, 0.25, 0.45, 0.75, 0.85, 0.90},
                                    {0.10, 0.10, 0.20, 0.40, 0.50, 0.50}});
    return t;
}

std::string to_string(Campaign c)
{
    switch (c) {
    case Campaign::DensityFrequency: return "density_frequency";
    case Campaign::FrequencySnr: return "frequency_snr";
    case Campaign::MimoFrequency: return "mimo_frequency";
    case Campaign::Custom: return "custom";
    }
    return "custom";
}

Campaign campaign_from_string(const std::string& s)
{
    std::string k = to_lower(trim(s));
    if (k == "density_frequency") return Campaign::DensityFrequency;
    if (k == "frequency_snr") return Campaign::FrequencySnr;
    if (k == "mimo_frequency") return Campaign::MimoFrequency;
    if (k == "custom") return Campaign::Custom;
    throw ConfigError("unknown campaign '" + s + "'");
}

void ExperimentConfig::validate() const
{
    if (frequencies_hz.empty() || snr_db.empty() || mimo_sizes.empty() || densities_per_km3.empty() || classes.empty())
        throw ConfigError("campaign lists must be non-empty");
    for (double f : frequencies_hz)
        if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("frequencies must be finite and > 0");
    for (double s : snr_db)
        if (std::isnan(s)) throw ConfigError("SNR values must not be NaN");
    for (int m : mimo_sizes)
        if (m < 1) throw ConfigError("MIMO sizes must be >= 1");
    for (double d : densities_per_km3)
        if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("densities must be finite and >= 0");
    std::set<Label> uniq(classes.begin(), classes.end());
    if (uniq.size() != classes.size()) throw ConfigError("duplicate class in campaign");
    if (samples_per_condition < 2 * static_cast<int>(classes.size()))
        throw ConfigError("samples_per_condition must allow at least 2 samples per class");
    link.validate();
    if (frame_symbols < 1) throw ConfigError("frame_symbols must be >= 1");
    if (pilots.length < 0) throw ConfigError("pilot_length must be >= 0");
    if (!(minor_semi_axis_y_km > 0.0 && minor_semi_axis_z_km > 0.0)) throw ConfigError("ellipsoid semi-axes must be > 0");
    if (characteristic_size_m < 0.01) throw ConfigError("characteristic_size_m must be >= 0.01");
    if (n_subbands < 1) throw ConfigError("n_subbands must be >= 1");
    if (!(bandwidth_hz >= 0.0)) throw ConfigError("bandwidth must be >= 0");
    if (!(element_spacing > 0.0)) throw ConfigError("element_spacing must be > 0");
    if (std::isnan(k_factor_db)) throw ConfigError("k_factor_db must not be NaN");
    if (!(scatter_tilt_rad >= 0.0 && scatter_tilt_rad < 0.5)) throw ConfigError("scatter_tilt_rad must lie in [0, 0.5)");
    if (propagation.max_series_terms < 1) throw ConfigError("max_series_terms must be >= 1");
    if (!(svm.c > 0.0)) throw ConfigError("svm c must be > 0");
    if (!(svm.tolerance > 0.0)) throw ConfigError("svm tolerance must be > 0");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");

    // Every simulated sub-band must be covered by the materials of the configured classes.
    for (Label l : classes) {
        if (l == Label::None) continue;
        DebrisClass dc = debris_class_of(l);
        const MaterialProperties& m = materials.get(material_name(dc));
        for (double f : frequencies_hz) {
            (void)interactions.at(dc, f);
            for (double fi : subband_grid(f, n_subbands, bandwidth_hz)) {
                try {
                    m.validate_for_frequency(fi);
                } catch (const MaterialError& e) {
                    throw ConfigError(e.what());
                }
            }
        }
    }
}

ExperimentConfig ExperimentConfig::from_ini_string(const std::string& text, const std::string& base_dir)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    const std::set<std::string> known{"campaign", "link", "scene", "materials", "interactions", "channel", "svm"};
    for (const auto& [name, body] : tree) {
        if (!known.contains(name)) throw ConfigError("config: unknown section [" + name + "]");
        if (body.empty() && !body.data().empty()) throw ConfigError("config: key '" + name + "' outside any section");
    }

    ExperimentConfig c;
    {
        Section s(tree, "campaign");
        c.name = s.str("name", c.name);
        c.campaign = campaign_from_string(s.str("campaign", to_string(c.campaign)));
        c.frequencies_hz = s.numbers("frequencies_hz", c.frequencies_hz);
        c.snr_db = s.numbers("snr_db", c.snr_db);
        if (s.has("mimo")) {
            c.mimo_sizes.clear();
            for (double m : s.numbers("mimo", {})) {
                if (m != std::floor(m)) throw ConfigError("[campaign] mimo sizes must be integers");
                c.mimo_sizes.push_back(static_cast<int>(m));
            }
        }
        c.densities_per_km3 = s.numbers("densities_per_km3", c.densities_per_km3);
        if (s.has("classes")) {
            c.classes.clear();
            for (const auto& item : split_list(s.str("classes", ""))) c.classes.push_back(label_from_string(item));
        }
        c.samples_per_condition = static_cast<int>(s.integer("samples_per_condition", c.samples_per_condition));
        c.master_seed = s.unsigned_int("master_seed", c.master_seed);
        s.reject_unknown();
    }
    {
        Section s(tree, "link");
        c.link.distance_km = s.number("distance_km", c.link.distance_km);
        c.link.relative_velocity_kms = s.number("velocity_kms", c.link.relative_velocity_kms);
        c.frame_symbols = static_cast<int>(s.integer("frame_symbols", c.frame_symbols));
        c.pilots.method = csi_method_from_string(s.str("csi_method", to_string(c.pilots.method)));
        c.pilots.length = static_cast<int>(s.integer("pilot_length", c.pilots.length));
        s.reject_unknown();
    }
    {
        Section s(tree, "scene");
        c.minor_semi_axis_y_km = s.number("minor_semi_axis_y_km", c.minor_semi_axis_y_km);
        c.minor_semi_axis_z_km = s.number("minor_semi_axis_z_km", c.minor_semi_axis_z_km);
        c.characteristic_size_m = s.number("characteristic_size_m", c.characteristic_size_m);
        s.reject_unknown();
    }
    {
        Section s(tree, "materials");
        c.material_file = s.str("file", "");
        if (!c.material_file.empty()) {
            std::filesystem::path p(c.material_file);
            if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
            c.materials = MaterialLibrary::from_file(p.string());
        }
        s.reject_unknown();
    }
    {
        Section s(tree, "interactions");
        std::map<DebrisClass, InteractionTable::Entry> rows;
        std::map<DebrisClass, int> seen;
        for (const auto& [key, value] : s.values()) {
            auto dot = key.find('.');
            if (dot == std::string::npos) throw ConfigError("[interactions] keys must look like <class>.<field>");
            DebrisClass dc = debris_class_from_string(key.substr(0, dot));
            std::string field = key.substr(dot + 1);
            auto& e = rows[dc];
            std::vector<double> v = parse_number_list(value);
            if (field == "frequencies_hz") e.frequencies_hz = v;
            else if (field == "reflection") e.reflection = v;
            else if (field == "scattering") e.scattering = v;
            else if (field == "diffraction") e.diffraction = v;
            else throw ConfigError("[interactions] unknown field '" + field + "'");
            ++seen[dc];
            s.mark_used(key);
        }
        for (auto& [dc, e] : rows) {
            if (seen[dc] != 4) throw ConfigError("[interactions] " + to_string(dc) + " needs frequencies_hz, reflection, scattering and diffraction");
            c.interactions.set(dc, e);
        }
        s.reject_unknown();
    }
    {
        Section s(tree, "channel");
        c.n_subbands = static_cast<int>(s.integer("n_subbands", c.n_subbands));
        c.bandwidth_hz = s.number("bandwidth_hz", c.bandwidth_hz);
        c.element_spacing = s.number("element_spacing", c.element_spacing);
        c.k_factor_db = s.number("k_factor_db", c.k_factor_db);
        c.propagation.polarization = polarization_from_string(s.str("polarization", to_string(c.propagation.polarization)));
        auto mu = s.numbers("diffraction_mu", {c.propagation.diffraction.mu1, c.propagation.diffraction.mu2,
                                               c.propagation.diffraction.mu3});
        if (mu.size() != 3) throw ConfigError("[channel] diffraction_mu needs three values");
        c.propagation.diffraction = {mu[0], mu[1], mu[2]};
        c.propagation.max_series_terms = static_cast<int>(s.integer("max_series_terms", c.propagation.max_series_terms));
        c.scatter_tilt_rad = s.number("scatter_tilt_rad", c.scatter_tilt_rad);
        s.reject_unknown();
    }
    {
        Section s(tree, "svm");
        c.svm.kernel.type = kernel_from_string(s.str("kernel", to_string(c.svm.kernel.type)));
        c.svm.kernel.gamma = s.number("gamma", c.svm.kernel.gamma);
        c.svm.c = s.number("c", c.svm.c);
        c.svm.tolerance = s.number("tolerance", c.svm.tolerance);
        c.svm.max_iterations = s.integer("max_iterations", c.svm.max_iterations);
        c.train_fraction = s.number("train_fraction", c.train_fraction);
        c.split_seed = s.unsigned_int("split_seed", c.split_seed);
        s.reject_unknown();
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::filesystem::path p(path);
    return from_ini_string(buf.str(), p.has_parent_path() ? p.parent_path().string() : ".");
}

std::string ExperimentConfig::to_ini_string() const
{
    auto num = [](double v) { return format_number(v); };
    std::ostringstream os;
    os << "[campaign]\n";
    os << "name = " << name << '\n';
    os << "campaign = " << to_string(campaign) << '\n';
    os << "frequencies_hz = " << join(frequencies_hz, num) << '\n';
    os << "snr_db = " << join(snr_db, num) << '\n';
    os << "mimo = " << join(mimo_sizes, [](int m) { return std::to_string(m); }) << '\n';
    os << "densities_per_km3 = " << join(densities_per_km3, num) << '\n';
    os << "classes = " << join(classes, [](Label l) { return to_string(l); }) << '\n';
    os << "samples_per_condition = " << samples_per_condition << '\n';
    os << "master_seed = " << master_seed << "\n\n";

    os << "[link]\n";
    os << "distance_km = " << num(link.distance_km) << '\n';
    os << "velocity_kms = " << num(link.relative_velocity_kms) << '\n';
    os << "frame_symbols = " << frame_symbols << '\n';
    os << "csi_method = " << to_string(pilots.method) << '\n';
    os << "; 0 selects 2 * n_tx\n";
    os << "pilot_length = " << pilots.length << "\n\n";

    os << "[scene]\n";
    os << "; the major semi-axis is always distance_km / 2\n";
    os << "minor_semi_axis_y_km = " << num(minor_semi_axis_y_km) << '\n';
    os << "minor_semi_axis_z_km = " << num(minor_semi_axis_z_km) << '\n';
    os << "characteristic_size_m = " << num(characteristic_size_m) << "\n\n";

    os << "[materials]\n";
    os << "; empty uses the built-in material table\n";
    os << "file = " << material_file << "\n\n";

    os << "[interactions]\n";
    for (const auto& [dc, e] : interactions.entries()) {
        std::string k = to_string(dc);
        os << k << ".frequencies_hz = " << join(e.frequencies_hz, num) << '\n';
        os << k << ".reflection = " << join(e.reflection, num) << '\n';
        os << k << ".scattering = " << join(e.scattering, num) << '\n';
        os << k << ".diffraction = " << join(e.diffraction, num) << '\n';
    }
    os << '\n';

    os << "[channel]\n";
    os << "n_subbands = " << n_subbands << '\n';
    os << "bandwidth_hz = " << num(bandwidth_hz) << '\n';
    os << "element_spacing = " << num(element_spacing) << '\n';
    os << "k_factor_db = " << num(k_factor_db) << '\n';
    os << "polarization = " << to_string(propagation.polarization) << '\n';
    os << "diffraction_mu = " << num(propagation.diffraction.mu1) << ", " << num(propagation.diffraction.mu2) << ", "
       << num(propagation.diffraction.mu3) << '\n';
    os << "max_series_terms = " << propagation.max_series_terms << '\n';
    os << "scatter_tilt_rad = " << num(scatter_tilt_rad) << "\n\n";

    os << "[svm]\n";
    os << "kernel = " << to_string(svm.kernel.type) << '\n';
    os << "; 0 selects 1 / (n_features * var(standardized features))\n";
    os << "gamma = " << num(svm.kernel.gamma) << '\n';
    os << "c = " << num(svm.c) << '\n';
    os << "tolerance = " << num(svm.tolerance) << '\n';
    os << "max_iterations = " << svm.max_iterations << '\n';
    os << "train_fraction = " << num(train_fraction) << '\n';
    os << "split_seed = " << split_seed << '\n';
    return os.str();
}

ExperimentConfig ExperimentConfig::table(int which)
{
    ExperimentConfig c;
    c.link.distance_km = 500.0;
    c.link.relative_velocity_kms = 7.0;
    c.classes = {Label::None, Label::SmoothGlass, Label::RoughMetal};
    c.samples_per_condition = 200;
    switch (which) {
    case 1:
        c.name = "table1";
        c.campaign = Campaign::DensityFrequency;
        c.frequencies_hz = {30.0e9, 300.0e9, 3.0e12, 5.0e12};
        c.mimo_sizes = {16};
        c.densities_per_km3 = {1.0e-7, 5.0e-7, 1.0e-6};
        c.snr_db = {15.0};
        break;
    case 2:
        c.name = "table2";
        c.campaign = Campaign::FrequencySnr;
        c.frequencies_hz = {30.0e9, 3.0e12, 5.0e12};
        c.snr_db = {5.0, 10.0, 15.0, 20.0};
        c.mimo_sizes = {16};
        c.densities_per_km3 = {1.0e-6};
        break;
    case 3:
        c.name = "table3";
        c.campaign = Campaign::MimoFrequency;
        c.frequencies_hz = {30.0e9, 300.0e9, 3.0e12, 5.0e12};
        c.snr_db = {20.0};
        c.mimo_sizes = {4, 16, 64};
        c.densities_per_km3 = {1.0e-6};
        break;
    default:
        throw ConfigError("table must be 1, 2 or 3");
    }
    c.validate();
    return c;
}

}  // namespace debrisense
