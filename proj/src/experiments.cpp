#include "debrisense/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <numeric>
#include <sstream>
#include <thread>

#include "debrisense/link.hpp"
#include "debrisense/onboard.hpp"
#include "debrisense/rng.hpp"
#include "debrisense/text_util.hpp"

namespace debrisense {
namespace {

// Stream tags for seed derivation.
enum : std::uint64_t { kSceneStream = 1, kInteractionStream = 2, kRicianStream = 3, kLinkStream = 4, kSplitStream = 5 };

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t u64(int v) { return static_cast<std::uint64_t>(v); }

std::string join(const std::vector<std::string>& xs, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += xs[i];
    }
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string condition_prefix(const std::string& name)
{
    std::string out;
    for (char ch : name) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_') ? ch : '_';
    return out.empty() ? "run" : out;
}

/// Held-out predictor when training data has a single class or SMO fails.
struct ConstantPredictor {
    std::string label;
};

}  // namespace

// ---------------------------------------------------------------- conditions

std::vector<Condition> enumerate_conditions(const ExperimentConfig& config)
{
    std::vector<Condition> out;
    const std::size_t total = config.densities_per_km3.size() * config.mimo_sizes.size() * config.snr_db.size() *
                              config.frequencies_hz.size();
    const int width = std::max<int>(2, static_cast<int>(std::to_string(total > 0 ? total - 1 : 0).size()));
    const std::string prefix = condition_prefix(config.name);
    for (std::size_t di = 0; di < config.densities_per_km3.size(); ++di)
        for (std::size_t mi = 0; mi < config.mimo_sizes.size(); ++mi)
            for (std::size_t si = 0; si < config.snr_db.size(); ++si)
                for (std::size_t fi = 0; fi < config.frequencies_hz.size(); ++fi) {
                    Condition c;
                    c.index = static_cast<int>(out.size());
                    std::string num = std::to_string(c.index);
                    c.id = prefix + "_c" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(num.size(), width), '0') + num;
                    c.frequency_hz = config.frequencies_hz[fi];
                    c.snr_db = config.snr_db[si];
                    c.mimo = config.mimo_sizes[mi];
                    c.density_per_km3 = config.densities_per_km3[di];
                    c.frequency_idx = static_cast<int>(fi);
                    c.snr_idx = static_cast<int>(si);
                    c.mimo_idx = static_cast<int>(mi);
                    c.density_idx = static_cast<int>(di);
                    out.push_back(c);
                }
    return out;
}

std::vector<Label> condition_labels(const ExperimentConfig& config, const Condition& cond)
{
    const int n = config.samples_per_condition;
    if (cond.density_per_km3 == 0.0) return std::vector<Label>(static_cast<std::size_t>(n), Label::None);
    const int k = static_cast<int>(config.classes.size());
    std::vector<Label> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int c = 0; c < k; ++c) {
        int count = n / k + (c < n % k ? 1 : 0);
        labels.insert(labels.end(), static_cast<std::size_t>(count), config.classes[static_cast<std::size_t>(c)]);
    }
    return labels;
}

// ---------------------------------------------------------------- sampling

std::vector<Interaction> draw_interactions(const DebrisScene& scene, double frequency_hz,
                                           const InteractionTable& table, double scatter_tilt_rad,
                                           std::uint64_t seed)
{
    std::vector<Interaction> out;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> tilt(-scatter_tilt_rad, scatter_tilt_rad);
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const DebrisObject& obj = scene.objects[i];
        MechanismProbabilities p = table.at(obj.debris_class, frequency_hz);
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
        const double u_ref = unit(rng);
        const double u_sca = unit(rng);
        const double u_dif = unit(rng);
        const double d_el = tilt(rng);
        const double d_az = tilt(rng);

        auto add = [&](Mechanism m) {
            Interaction it;
            it.object_index = i;
            it.mechanism = m;
            it.geometry = path_geometry(scene.geometry, obj.position_km, m);
            if (m == Mechanism::Scattering) {
                // Stay 1 mrad off grazing; the Beckmann factor F diverges there.
                const double hi = kPi / 2.0 - 1.0e-3;
                const double th = it.geometry.incidence_angle_rad;
                it.scatter.theta1 = std::clamp(th + d_el, 0.0, hi);
                it.scatter.theta2 = std::clamp(th - d_el, 0.0, hi);
                it.scatter.theta3 = d_az < 0.0 ? d_az + 2.0 * kPi : d_az;
                if (it.scatter.theta3 >= 2.0 * kPi) it.scatter.theta3 = 0.0;
            }
            out.push_back(it);
        };
        if (u_ref < p.reflection) add(Mechanism::Reflection);
        if (u_sca < p.scattering) add(Mechanism::Scattering);
        if (u_dif < p.diffraction) add(Mechanism::Diffraction);
    }
    return out;
}

SampleTrace trace_sample(const ExperimentConfig& config, const Condition& cond, Label label, int sample_idx,
                         std::uint64_t master_seed)
{
    const std::uint64_t d = u64(cond.density_idx);
    const std::uint64_t s = u64(sample_idx);
    SampleTrace t;

    SceneConfig sc;
    sc.geometry = config.link;
    sc.minor_semi_axis_y_km = config.minor_semi_axis_y_km;
    sc.minor_semi_axis_z_km = config.minor_semi_axis_z_km;
    sc.characteristic_size_m = config.characteristic_size_m;
    if (label == Label::None) {
        sc.density_per_km3 = 0.0;
    } else {
        sc.density_per_km3 = cond.density_per_km3;
        sc.debris_class = debris_class_of(label);
        sc.material = config.materials.get(material_name(sc.debris_class));
    }
    t.scene = generate_scene(sc, derive_seed(master_seed, {kSceneStream, d, s}));
    t.interactions = draw_interactions(t.scene, cond.frequency_hz, config.interactions, config.scatter_tilt_rad,
                                       derive_seed(master_seed, {kInteractionStream, d, s}));

    const std::vector<double> grid = subband_grid(cond.frequency_hz, config.n_subbands, config.bandwidth_hz);
    std::vector<CMatrix> matrices;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double f = grid[i];
        ArrayConfig arrays;
        arrays.n_tx = cond.mimo;
        arrays.n_rx = cond.mimo;
        // Element spacing is fixed in meters at the design frequency.
        arrays.spacing_tx = config.element_spacing * f / cond.frequency_hz;
        arrays.spacing_rx = arrays.spacing_tx;
        SubbandChannel ch = assemble_subband(build_paths(t.scene, t.interactions, f, config.propagation), arrays, f,
                                             config.link.relative_velocity_kms * kMetersPerKm);
        ch.matrix = apply_rician_smallscale(
            ch.matrix, config.k_factor_db,
            derive_seed(master_seed, {kRicianStream, d, u64(cond.mimo_idx), s, static_cast<std::uint64_t>(i)}));
        matrices.push_back(ch.matrix);
        t.channels.push_back(std::move(ch));
    }

    t.link = simulate_link(matrices, SnrConfig{cond.snr_db}, config.frame_symbols, config.pilots,
                           derive_seed(master_seed, {kLinkStream, d, u64(cond.mimo_idx), s}));
    std::vector<CMatrix> csi;
    for (const auto& e : t.link.csi) csi.push_back(e.matrix);
    t.features = extract_features(csi);
    return t;
}

SampleRecord simulate_sample(const ExperimentConfig& config, const Condition& cond, Label label, int sample_idx,
                             std::uint64_t master_seed)
{
    SampleRecord rec;
    rec.condition_id = cond.id;
    rec.sample_idx = sample_idx;
    rec.label = label;
    try {
        SampleTrace t = trace_sample(config, cond, label, sample_idx, master_seed);
        rec.n_objects = static_cast<int>(t.scene.objects.size());
        rec.n_paths = static_cast<int>(t.interactions.size());
        rec.ber = t.link.ber;
        rec.features = t.features;
        if (t.link.equalization_failed) rec.flags.push_back("zf_rank_deficient");
        if (!rec.features.finite()) {
            rec.valid = false;
            rec.flags.push_back("nonfinite_features");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        rec.valid = false;
        rec.ber = kNaN;
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == ',' || ch == ';' || ch == '\n') ch = ' ';
        rec.flags.push_back("error:" + msg);
    }
    return rec;
}

std::vector<SampleRecord> run_condition(const ExperimentConfig& config, const Condition& cond,
                                        std::uint64_t master_seed, int threads)
{
    const std::vector<Label> labels = condition_labels(config, cond);
    std::vector<SampleRecord> out(labels.size());
    parallel_for(labels.size(), threads, [&](std::size_t i) {
        out[i] = simulate_sample(config, cond, labels[i], static_cast<int>(i), master_seed);
    });
    return out;
}

// ---------------------------------------------------------------- evaluation

double ConfusionMatrix::accuracy() const
{
    const int total = counts.sum();
    return total > 0 ? static_cast<double>(counts.trace()) / total : kNaN;
}

EvaluationResult evaluate_condition(std::vector<SampleRecord>& records, const ExperimentConfig& config,
                                    std::uint64_t split_seed)
{
    EvaluationResult result;
    MetricsSummary& m = result.metrics;
    if (!records.empty()) m.condition_id = records.front().condition_id;

    // BER statistics over every usable sample.
    std::vector<double> bers;
    for (const auto& r : records) {
        if (r.valid && std::isfinite(r.ber)) bers.push_back(r.ber);
        else ++m.n_invalid;
    }
    if (!bers.empty()) {
        m.mean_ber = std::accumulate(bers.begin(), bers.end(), 0.0) / static_cast<double>(bers.size());
        if (bers.size() > 1) {
            double ss = 0.0;
            for (double b : bers) ss += (b - m.mean_ber) * (b - m.mean_ber);
            m.ber_ci95 = 1.96 * std::sqrt(ss / static_cast<double>(bers.size() - 1)) / std::sqrt(static_cast<double>(bers.size()));
        }
    } else {
        m.mean_ber = kNaN;
        m.ber_ci95 = kNaN;
    }

    // Stratified split per label, in configured class order.
    std::map<Label, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (records[i].valid) by_label[records[i].label].push_back(i);
    std::set<Label> present;
    for (const auto& r : records) present.insert(r.label);
    for (Label l : present) {
        if (by_label[l].size() < 2)
            throw DegenerateSplitError("class '" + to_string(l) + "' has fewer than 2 usable samples in " + m.condition_id);
    }

    std::vector<char> is_train(records.size(), 0);
    std::vector<std::size_t> train, test;
    for (auto& [label, idx] : by_label) {
        Rng rng(derive_seed(split_seed, {kSplitStream, static_cast<std::uint64_t>(label)}));
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t n = idx.size();
        std::size_t n_train = static_cast<std::size_t>(std::llround(config.train_fraction * static_cast<double>(n)));
        n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            if (k < n_train) {
                is_train[idx[k]] = 1;
                train.push_back(idx[k]);
            } else {
                test.push_back(idx[k]);
            }
        }
    }
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    m.n_train = static_cast<int>(train.size());
    m.n_test = static_cast<int>(test.size());

    auto make_dataset = [&](const std::vector<std::size_t>& rows, const std::vector<std::string>& classes,
                            auto&& class_of) {
        LabeledDataset ds;
        ds.classes = classes;
        ds.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(FeatureVector::kSize));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            ds.features.row(static_cast<Eigen::Index>(r)) = records[rows[r]].features.to_eigen().transpose();
            ds.labels.push_back(class_of(records[rows[r]].label));
        }
        return ds;
    };

    auto train_or_constant = [&](const LabeledDataset& ds, const char* what,
                                 std::optional<ConstantPredictor>& constant) -> std::optional<SvmModel> {
        std::vector<int> counts(ds.classes.size(), 0);
        for (int l : ds.labels) ++counts[static_cast<std::size_t>(l)];
        const auto majority = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        int n_present = 0;
        for (int c : counts) n_present += c > 0 ? 1 : 0;
        if (n_present < 2) {
            constant = ConstantPredictor{ds.classes[majority]};
            m.warnings.push_back(std::string(what) + ": single training class, constant predictor");
            return std::nullopt;
        }
        try {
            SvmModel model = svm_train(ds, config.svm);
            for (const auto& bm : model.machines) m.max_kkt_violation = std::max(m.max_kkt_violation, bm.max_kkt_violation);
            return model;
        } catch (const SvmTrainingError& e) {
            constant = ConstantPredictor{ds.classes[majority]};
            m.warnings.push_back(std::string(what) + ": " + e.what() + ", constant predictor");
            return std::nullopt;
        }
    };

    // Detection: debris (positive) vs none.
    const std::vector<std::string> det_classes{"debris", "none"};
    auto det_class = [](Label l) { return l == Label::None ? 1 : 0; };
    std::optional<ConstantPredictor> det_const;
    result.detection = train_or_constant(make_dataset(train, det_classes, det_class), "detection", det_const);

    // Classification: debris rows only, classes in configured order.
    std::vector<std::string> cls_classes;
    std::map<Label, int> cls_index;
    for (Label l : config.classes)
        if (l != Label::None && present.contains(l)) {
            cls_index[l] = static_cast<int>(cls_classes.size());
            cls_classes.push_back(to_string(l));
        }
    std::vector<std::size_t> cls_train;
    for (std::size_t i : train)
        if (records[i].label != Label::None) cls_train.push_back(i);
    std::optional<ConstantPredictor> cls_const;
    if (!cls_classes.empty()) {
        result.classification = train_or_constant(
            make_dataset(cls_train, cls_classes, [&](Label l) { return cls_index.at(l); }), "classification", cls_const);
    }

    m.confusion.classes = cls_classes;
    m.confusion.counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(cls_classes.size()),
                                               static_cast<Eigen::Index>(cls_classes.size()));
    int det_correct = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        SampleRecord& r = records[i];
        if (!r.valid) continue;
        r.flags.insert(r.flags.begin(), is_train[i] ? "train" : "test");

        bool debris;
        if (result.detection) {
            debris = detect(r.features, *result.detection, &r.det_value);
        } else {
            debris = det_const->label == "debris";
            r.det_value = kNaN;
        }
        std::string cls;
        if (result.classification) cls = classify(r.features, *result.classification);
        else if (cls_const) cls = cls_const->label;
        r.pred_label = debris ? (cls.empty() ? "debris" : cls) : "none";

        if (is_train[i]) continue;
        if (debris == (r.label != Label::None)) ++det_correct;
        if (r.label != Label::None && !cls.empty()) {
            auto t = cls_index.at(r.label);
            auto it = std::find(cls_classes.begin(), cls_classes.end(), cls);
            m.confusion.counts(t, static_cast<Eigen::Index>(it - cls_classes.begin())) += 1;
        }
    }
    m.det_acc = test.empty() ? kNaN : static_cast<double>(det_correct) / static_cast<double>(test.size());
    m.cls_acc = m.confusion.accuracy();
    return result;
}

// ---------------------------------------------------------------- campaign

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
    if (n == 0) return;
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

CampaignResult run_campaign(const ExperimentConfig& config, std::uint64_t master_seed, int threads)
{
    config.validate();
    CampaignResult result;
    result.conditions = enumerate_conditions(config);
    const std::size_t nc = result.conditions.size();
    result.samples.resize(nc);

    std::vector<std::vector<Label>> labels(nc);
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t c = 0; c < nc; ++c) {
        labels[c] = condition_labels(config, result.conditions[c]);
        result.samples[c].resize(labels[c].size());
        for (std::size_t s = 0; s < labels[c].size(); ++s) jobs.emplace_back(c, s);
    }
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        auto [c, s] = jobs[j];
        result.samples[c][s] = simulate_sample(config, result.conditions[c], labels[c][s], static_cast<int>(s), master_seed);
    });

    result.evaluations.resize(nc);
    parallel_for(nc, threads, [&](std::size_t c) {
        try {
            result.evaluations[c] = evaluate_condition(result.samples[c], config, config.split_seed);
        } catch (const DegenerateSplitError& e) {
            EvaluationResult ev;
            ev.metrics.condition_id = result.conditions[c].id;
            ev.metrics.mean_ber = kNaN;
            ev.metrics.ber_ci95 = kNaN;
            ev.metrics.warnings.push_back(std::string("degenerate split: ") + e.what());
            result.evaluations[c] = std::move(ev);
        }
    });
    return result;
}

// ---------------------------------------------------------------- CSV

const char* const kSampleCsvHeader = "condition_id,sample_idx,label,ber,f_mean,f_var,f_max,f_min,f_skew,det_value,pred_label,flags";
const char* const kMetricsCsvHeader = "condition_id,frequency_hz,mimo,snr_db,density,mean_ber,ber_ci95,det_acc,cls_acc";

std::string samples_to_csv(const std::vector<SampleRecord>& records)
{
    std::ostringstream os;
    os << kSampleCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.condition_id << ',' << r.sample_idx << ',' << to_string(r.label) << ',' << format_number(r.ber);
        for (double v : r.features.to_array()) os << ',' << format_number(v);
        os << ',' << format_number(r.det_value) << ',' << r.pred_label << ',' << join(r.flags, ';') << '\n';
    }
    return os.str();
}

std::vector<SampleRecord> samples_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != kSampleCsvHeader)
        throw ConfigError("sample CSV header does not match '" + std::string(kSampleCsvHeader) + "'");
    std::vector<SampleRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        if (cells.size() != 12) throw ConfigError("sample CSV line " + std::to_string(line_no) + ": expected 12 fields");
        try {
            SampleRecord r;
            r.condition_id = cells[0];
            r.sample_idx = static_cast<int>(parse_number(cells[1]));
            r.label = label_from_string(cells[2]);
            r.ber = parse_number(cells[3]);
            std::array<double, FeatureVector::kSize> f{};
            for (std::size_t k = 0; k < f.size(); ++k) f[k] = parse_number(cells[4 + k]);
            r.features = FeatureVector::from_array(f);
            r.det_value = parse_number(cells[9]);
            r.pred_label = cells[10];
            if (!cells[11].empty()) r.flags = split_list(cells[11], ';');
            r.valid = r.features.finite() && std::isfinite(r.ber);
            out.push_back(std::move(r));
        } catch (const ConfigError& e) {
            throw ConfigError("sample CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::string metrics_to_csv(const CampaignResult& result)
{
    std::ostringstream os;
    os << kMetricsCsvHeader << '\n';
    for (std::size_t c = 0; c < result.conditions.size(); ++c) {
        const Condition& cond = result.conditions[c];
        const MetricsSummary& m = result.evaluations[c].metrics;
        os << cond.id << ',' << format_number(cond.frequency_hz) << ',' << cond.mimo << ',' << format_number(cond.snr_db)
           << ',' << format_number(cond.density_per_km3) << ',' << format_number(m.mean_ber) << ','
           << format_number(m.ber_ci95) << ',' << format_number(m.det_acc) << ',' << format_number(m.cls_acc) << '\n';
    }
    return os.str();
}

namespace {

std::string series_name(const ExperimentConfig& config, const Condition& c)
{
    std::vector<std::string> parts;
    if (config.densities_per_km3.size() > 1) parts.push_back("density=" + format_number(c.density_per_km3));
    if (config.mimo_sizes.size() > 1) parts.push_back("mimo=" + std::to_string(c.mimo));
    if (config.snr_db.size() > 1) parts.push_back("snr_db=" + format_number(c.snr_db));
    return parts.empty() ? "all" : join(parts, ';');
}

std::string plot_csv(const CampaignResult& r, const ExperimentConfig& config, double MetricsSummary::*field)
{
    std::ostringstream os;
    os << "x,series,value\n";
    for (std::size_t c = 0; c < r.conditions.size(); ++c)
        os << format_number(r.conditions[c].frequency_hz) << ',' << series_name(config, r.conditions[c]) << ','
           << format_number(r.evaluations[c].metrics.*field) << '\n';
    return os.str();
}

}  // namespace

void write_campaign(const CampaignResult& result, const ExperimentConfig& config, const std::string& out_dir)
{
    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    std::error_code ec;
    fs::create_directories(root / "samples", ec);
    if (ec) throw Error("cannot create output directory '" + out_dir + "': " + ec.message());

    ExperimentConfig written = config;
    written.material_file = "materials.ini";
    write_text(root / "config.ini", written.to_ini_string());
    write_text(root / "materials.ini", config.materials.to_ini_string());

    for (std::size_t c = 0; c < result.conditions.size(); ++c)
        write_text(root / "samples" / (result.conditions[c].id + ".csv"), samples_to_csv(result.samples[c]));
    write_text(root / "metrics.csv", metrics_to_csv(result));

    std::ostringstream conf;
    conf << "condition_id,true_class,pred_class,count\n";
    std::ostringstream diag;
    diag << "condition_id,n_train,n_test,n_invalid,max_kkt_violation,warnings\n";
    for (std::size_t c = 0; c < result.conditions.size(); ++c) {
        const MetricsSummary& m = result.evaluations[c].metrics;
        for (Eigen::Index t = 0; t < m.confusion.counts.rows(); ++t)
            for (Eigen::Index p = 0; p < m.confusion.counts.cols(); ++p)
                conf << result.conditions[c].id << ',' << m.confusion.classes[static_cast<std::size_t>(t)] << ','
                     << m.confusion.classes[static_cast<std::size_t>(p)] << ',' << m.confusion.counts(t, p) << '\n';
        std::vector<std::string> w = m.warnings;
        for (auto& s : w) std::replace(s.begin(), s.end(), ',', ' ');
        diag << result.conditions[c].id << ',' << m.n_train << ',' << m.n_test << ',' << m.n_invalid << ','
             << format_number(m.max_kkt_violation) << ',' << join(w, ';') << '\n';
    }
    write_text(root / "confusion.csv", conf.str());
    write_text(root / "diagnostics.csv", diag.str());

    write_text(root / "plot_ber_vs_frequency.csv", plot_csv(result, config, &MetricsSummary::mean_ber));
    write_text(root / "plot_det_acc_vs_frequency.csv", plot_csv(result, config, &MetricsSummary::det_acc));
    write_text(root / "plot_cls_acc_vs_frequency.csv", plot_csv(result, config, &MetricsSummary::cls_acc));

    // Mean BER per true label, for the class-resolved BER figure.
    std::ostringstream ber_cls;
    ber_cls << "x,series,value\n";
    for (std::size_t c = 0; c < result.conditions.size(); ++c) {
        std::map<Label, std::pair<double, int>> acc;
        for (const auto& r : result.samples[c])
            if (r.valid && std::isfinite(r.ber)) {
                acc[r.label].first += r.ber;
                acc[r.label].second += 1;
            }
        for (const auto& [label, sum] : acc)
            ber_cls << format_number(result.conditions[c].frequency_hz) << ','
                    << series_name(config, result.conditions[c]) << ";label=" << to_string(label) << ','
                    << format_number(sum.first / sum.second) << '\n';
    }
    write_text(root / "plot_ber_by_class_vs_frequency.csv", ber_cls.str());
}

CampaignResult reproduce_table(int which, std::uint64_t master_seed, const std::string& out_dir, int threads)
{
    ExperimentConfig config = ExperimentConfig::table(which);
    config.master_seed = master_seed;
    CampaignResult result = run_campaign(config, master_seed, threads);
    write_campaign(result, config, out_dir);
    return result;
}

}  // namespace debrisense
