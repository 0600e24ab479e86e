#include "debrisense/onboard.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

#include "debrisense/rng.hpp"

namespace debrisense {

bool detect(const FeatureVector& fv, const SvmModel& detection_model, double* decision_value)
{
    if (detection_model.classes.size() != 2) throw InvalidArgument("detection model must be binary");
    Prediction p = detection_model.predict(fv.to_eigen());
    if (decision_value) *decision_value = p.decision;
    return p.decision >= 0.0;
}

std::string classify(const FeatureVector& fv, const SvmModel& classification_model)
{
    Prediction p = classification_model.predict(fv.to_eigen());
    return classification_model.classes.at(static_cast<std::size_t>(p.label));
}

std::string AlertRecord::to_json_line() const
{
    nlohmann::json j;
    j["timestamp_s"] = timestamp_s;
    j["detection_value"] = detection_value;
    j["debris_class"] = debris_class;
    j["classification_values"] = classification_values;
    return j.dump();
}

AlertRecord AlertRecord::from_json_line(const std::string& line)
{
    auto j = nlohmann::json::parse(line);
    AlertRecord r;
    r.timestamp_s = j.at("timestamp_s").get<double>();
    r.detection_value = j.at("detection_value").get<double>();
    r.debris_class = j.at("debris_class").get<std::string>();
    r.classification_values = j.at("classification_values").get<std::vector<double>>();
    return r;
}

void AlertLog::append(const AlertRecord& record)
{
    records_.push_back(record);
    if (sink_) *sink_ << record.to_json_line() << '\n';
}

OnboardProcessor::OnboardProcessor(SvmModel detection, SvmModel classification, AlertLog& log)
    : detection_(std::move(detection)), classification_(std::move(classification)), log_(log)
{
    if (detection_.feature_count() != classification_.feature_count())
        throw InvalidArgument("detection and classification models use different feature schemas");
    if (detection_.classes.size() != 2) throw InvalidArgument("detection model must be binary");
}

std::optional<AlertRecord> OnboardProcessor::process_csi(const std::vector<CMatrix>& csi, double timestamp_s)
{
    FeatureVector fv = extract_features(csi);
    ++detections_;
    double value = 0.0;
    bool present = detect(fv, detection_, &value);
    last_detection_value_ = value;
    if (!present) return std::nullopt;

    ++classifications_;
    Prediction p = classification_.predict(fv.to_eigen());
    AlertRecord rec;
    rec.timestamp_s = timestamp_s;
    rec.detection_value = value;
    rec.debris_class = classification_.classes.at(static_cast<std::size_t>(p.label));
    rec.classification_values = p.decisions;
    log_.append(rec);
    return rec;
}

std::optional<AlertRecord> OnboardProcessor::process_channel(const std::vector<CMatrix>& true_subbands,
                                                             const PilotConfig& pilots, const SnrConfig& snr,
                                                             std::uint64_t seed, double timestamp_s)
{
    std::vector<CMatrix> csi;
    csi.reserve(true_subbands.size());
    for (std::size_t i = 0; i < true_subbands.size(); ++i)
        csi.push_back(estimate_csi(true_subbands[i], pilots, snr, derive_seed(seed, {i})).matrix);
    return process_csi(csi, timestamp_s);
}

}  // namespace debrisense
