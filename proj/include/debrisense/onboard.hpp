#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "debrisense/link.hpp"
#include "debrisense/svm.hpp"

namespace debrisense {

/// Decision value >= 0 means debris present.
bool detect(const FeatureVector& fv, const SvmModel& detection_model, double* decision_value = nullptr);
std::string classify(const FeatureVector& fv, const SvmModel& classification_model);

struct AlertRecord {
    double timestamp_s = 0.0;
    double detection_value = 0.0;
    std::string debris_class;
    std::vector<double> classification_values;

    std::string to_json_line() const;
    static AlertRecord from_json_line(const std::string& line);
    friend bool operator==(const AlertRecord&, const AlertRecord&) = default;
};

/// In-memory run log of alerts, optionally mirrored to a JSON-lines stream.
class AlertLog {
public:
    AlertLog() = default;
    explicit AlertLog(std::ostream* sink) : sink_(sink) {}

    void append(const AlertRecord& record);
    const std::vector<AlertRecord>& records() const { return records_; }

private:
    std::ostream* sink_ = nullptr;
    std::vector<AlertRecord> records_;
};

/// estimate -> extract -> detect -> (classify) -> alert.
class OnboardProcessor {
public:
    OnboardProcessor(SvmModel detection, SvmModel classification, AlertLog& log);

    std::optional<AlertRecord> process_csi(const std::vector<CMatrix>& csi, double timestamp_s);
    std::optional<AlertRecord> process_channel(const std::vector<CMatrix>& true_subbands, const PilotConfig& pilots,
                                               const SnrConfig& snr, std::uint64_t seed, double timestamp_s);

    long detections_run() const { return detections_; }
    long classifications_run() const { return classifications_; }
    double last_detection_value() const { return last_detection_value_; }

private:
    SvmModel detection_;
    SvmModel classification_;
    AlertLog& log_;
    long detections_ = 0;
    long classifications_ = 0;
    double last_detection_value_ = 0.0;
};

}  // namespace debrisense
