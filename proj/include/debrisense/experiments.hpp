#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "debrisense/config.hpp"
#include "debrisense/features.hpp"
#include "debrisense/link.hpp"
#include "debrisense/svm.hpp"

namespace debrisense {

/// One grid point of a campaign.
struct Condition {
    std::string id;
    int index = 0;
    double frequency_hz = 0.0;
    double snr_db = 0.0;
    int mimo = 16;
    double density_per_km3 = 0.0;
    // Positions in the config lists; seeds are keyed on these.
    int frequency_idx = 0;
    int snr_idx = 0;
    int mimo_idx = 0;
    int density_idx = 0;
};

/// Grid in fixed order: density, MIMO, SNR, frequency (innermost).
std::vector<Condition> enumerate_conditions(const ExperimentConfig& config);

/// Balanced floor/ceil partition of n samples over the labels, in list order.
/// A zero-density condition carries only the no-debris label.
std::vector<Label> condition_labels(const ExperimentConfig& config, const Condition& cond);

/// Independent per-object, per-mechanism Bernoulli activation. Every object
/// consumes the same number of draws whatever the probabilities are, so
/// scenes stay paired across frequencies.
std::vector<Interaction> draw_interactions(const DebrisScene& scene, double frequency_hz,
                                           const InteractionTable& table, double scatter_tilt_rad,
                                           std::uint64_t seed);

struct SampleRecord {
    std::string condition_id;
    int sample_idx = 0;
    Label label = Label::None;
    double ber = 0.0;
    FeatureVector features;
    double det_value = std::numeric_limits<double>::quiet_NaN();
    std::string pred_label;
    std::vector<std::string> flags;
    int n_objects = 0;
    int n_paths = 0;
    bool valid = true;  // false when the sample failed and carries no usable features
};

/// Intermediate products of one sample, for export and inspection.
struct SampleTrace {
    DebrisScene scene;
    std::vector<Interaction> interactions;
    std::vector<SubbandChannel> channels;  // after the small-scale term
    LinkResult link;
    FeatureVector features;
};

SampleTrace trace_sample(const ExperimentConfig& config, const Condition& cond, Label label, int sample_idx,
                         std::uint64_t master_seed);

/// scene -> interactions -> sub-band channels -> Rician -> link -> features.
SampleRecord simulate_sample(const ExperimentConfig& config, const Condition& cond, Label label, int sample_idx,
                             std::uint64_t master_seed);

std::vector<SampleRecord> run_condition(const ExperimentConfig& config, const Condition& cond,
                                        std::uint64_t master_seed, int threads = 1);

class DegenerateSplitError : public Error {
public:
    using Error::Error;
};

struct ConfusionMatrix {
    std::vector<std::string> classes;
    Eigen::MatrixXi counts;  // rows: true class, columns: predicted class

    double accuracy() const;
};

struct MetricsSummary {
    std::string condition_id;
    double mean_ber = 0.0;
    double ber_ci95 = 0.0;
    double det_acc = std::numeric_limits<double>::quiet_NaN();
    double cls_acc = std::numeric_limits<double>::quiet_NaN();
    ConfusionMatrix confusion;  // debris classes only
    int n_train = 0;
    int n_test = 0;
    int n_invalid = 0;
    double max_kkt_violation = 0.0;
    std::vector<std::string> warnings;
};

struct EvaluationResult {
    MetricsSummary metrics;
    std::optional<SvmModel> detection;       // classes {"debris", "none"}
    std::optional<SvmModel> classification;  // debris classes only
};

/// Stratified split, detection and classification training, held-out scoring.
/// Fills det_value, pred_label and the train/test flag of every record.
EvaluationResult evaluate_condition(std::vector<SampleRecord>& records, const ExperimentConfig& config,
                                    std::uint64_t split_seed);

struct CampaignResult {
    std::vector<Condition> conditions;
    std::vector<std::vector<SampleRecord>> samples;
    std::vector<EvaluationResult> evaluations;
};

CampaignResult run_campaign(const ExperimentConfig& config, std::uint64_t master_seed, int threads = 1);

extern const char* const kSampleCsvHeader;
extern const char* const kMetricsCsvHeader;

std::string samples_to_csv(const std::vector<SampleRecord>& records);
std::vector<SampleRecord> samples_from_csv(const std::string& text);
std::string metrics_to_csv(const CampaignResult& result);

/// Writes config.ini, materials.ini, samples/<id>.csv, metrics.csv,
/// confusion.csv and the plot-data CSVs into out_dir.
void write_campaign(const CampaignResult& result, const ExperimentConfig& config, const std::string& out_dir);

/// Table preset -> campaign -> files.
CampaignResult reproduce_table(int which, std::uint64_t master_seed, const std::string& out_dir, int threads = 1);

/// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first exception.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace debrisense
