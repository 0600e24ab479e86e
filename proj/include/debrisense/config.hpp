#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "debrisense/channel.hpp"
#include "debrisense/link.hpp"
#include "debrisense/materials.hpp"
#include "debrisense/svm.hpp"

namespace debrisense {

enum class Label { None, SmoothGlass, RoughMetal };

std::string to_string(Label l);
Label label_from_string(const std::string& s);
DebrisClass debris_class_of(Label l);

/// Per-object activation probabilities of each interaction mechanism.
struct MechanismProbabilities {
    double reflection = 0.0;
    double scattering = 0.0;
    double diffraction = 0.0;
};

/// Frequency-dependent activation probabilities per debris class, linearly
/// interpolated in log10(frequency). Frequencies outside a class table are a
/// configuration error.
class InteractionTable {
public:
    struct Entry {
        std::vector<double> frequencies_hz;
        std::vector<double> reflection;
        std::vector<double> scattering;
        std::vector<double> diffraction;
    };

    void set(DebrisClass c, Entry entry);
    MechanismProbabilities at(DebrisClass c, double frequency_hz) const;
    const std::map<DebrisClass, Entry>& entries() const { return entries_; }

    /// Every mechanism activated with probability p at all frequencies.
    static InteractionTable uniform(double p, double f_min = 1.0e9, double f_max = 1.0e13);
    static InteractionTable defaults();

private:
    std::map<DebrisClass, Entry> entries_;
};

enum class Campaign { DensityFrequency, FrequencySnr, MimoFrequency, Custom };

std::string to_string(Campaign c);
Campaign campaign_from_string(const std::string& s);

struct ExperimentConfig {
    std::string name = "custom";
    Campaign campaign = Campaign::Custom;

    // [campaign]
    std::vector<double> frequencies_hz{3.0e12};
    std::vector<double> snr_db{15.0};
    std::vector<int> mimo_sizes{16};
    std::vector<double> densities_per_km3{1.0e-6};
    std::vector<Label> classes{Label::None, Label::SmoothGlass, Label::RoughMetal};
    int samples_per_condition = 200;

    // [link]
    LinkGeometry link;
    int frame_symbols = 500;
    PilotConfig pilots;

    // [scene]
    double minor_semi_axis_y_km = 60.0;
    double minor_semi_axis_z_km = 60.0;
    double characteristic_size_m = 0.25;

    // [materials]
    std::string material_file;
    MaterialLibrary materials = MaterialLibrary::defaults();

    // [interactions]
    InteractionTable interactions = InteractionTable::defaults();

    // [channel]
    int n_subbands = 8;
    double bandwidth_hz = 10.0e9;
    double element_spacing = 0.5;
    double k_factor_db = 10.0;
    PropagationOptions propagation;
    double scatter_tilt_rad = 0.02;

    // [svm]
    SvmParams svm;
    double train_fraction = 0.7;
    std::uint64_t split_seed = 20240601;

    /// Master seed; the CLI --seed overrides it.
    std::uint64_t master_seed = 1;

    void validate() const;

    /// Parses the sectioned INI text; relative material paths resolve against base_dir.
    static ExperimentConfig from_ini_string(const std::string& text, const std::string& base_dir = ".");
    static ExperimentConfig from_file(const std::string& path);
    /// Complete, re-loadable description including every default.
    std::string to_ini_string() const;

    /// Shipped campaign definitions (1: density x frequency, 2: frequency x SNR, 3: MIMO x frequency).
    static ExperimentConfig table(int which);
};

}  // namespace debrisense
