#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "debrisense/experiments.hpp"
#include "debrisense/onboard.hpp"
#include "debrisense/text_util.hpp"

namespace ds = debrisense;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ds::ConfigError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void print_summary(const ds::CampaignResult& r, const std::string& out_dir)
{
    std::cout << "conditions: " << r.conditions.size() << "  output: " << out_dir << '\n';
    for (std::size_t c = 0; c < r.conditions.size(); ++c) {
        const auto& cond = r.conditions[c];
        const auto& m = r.evaluations[c].metrics;
        std::cout << "  " << cond.id << "  f=" << ds::format_number(cond.frequency_hz)
                  << "  snr=" << ds::format_number(cond.snr_db) << "  mimo=" << cond.mimo
                  << "  density=" << ds::format_number(cond.density_per_km3) << "  ber=" << ds::format_number(m.mean_ber)
                  << "  det=" << ds::format_number(m.det_acc) << "  cls=" << ds::format_number(m.cls_acc) << '\n';
        for (const auto& w : m.warnings) std::cout << "    warning: " << w << '\n';
    }
}

/// Maps CSV labels onto the class list of a model; rows without a matching
/// class are skipped.
ds::LabeledDataset dataset_for(const std::vector<ds::SampleRecord>& rows, const std::vector<std::string>& classes)
{
    const bool detection = classes == std::vector<std::string>{"debris", "none"};
    std::vector<std::pair<int, const ds::SampleRecord*>> picked;
    for (const auto& r : rows) {
        if (!r.valid) continue;
        std::string name = ds::to_string(r.label);
        if (detection) name = r.label == ds::Label::None ? "none" : "debris";
        auto it = std::find(classes.begin(), classes.end(), name);
        if (it == classes.end()) continue;
        picked.emplace_back(static_cast<int>(it - classes.begin()), &r);
    }
    ds::LabeledDataset data;
    data.classes = classes;
    data.features.resize(static_cast<Eigen::Index>(picked.size()), static_cast<Eigen::Index>(ds::FeatureVector::kSize));
    for (std::size_t i = 0; i < picked.size(); ++i) {
        data.features.row(static_cast<Eigen::Index>(i)) = picked[i].second->features.to_eigen().transpose();
        data.labels.push_back(picked[i].first);
    }
    return data;
}

std::vector<std::string> task_classes(const std::string& task, const std::vector<ds::SampleRecord>& rows)
{
    if (task == "detection") return {"debris", "none"};
    std::vector<std::string> classes;
    for (ds::Label l : {ds::Label::None, ds::Label::SmoothGlass, ds::Label::RoughMetal}) {
        if (task == "classification" && l == ds::Label::None) continue;
        bool seen = std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r.valid && r.label == l; });
        if (seen) classes.push_back(ds::to_string(l));
    }
    return classes;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Space-debris sensing over THz inter-satellite links: channel simulation, link simulation and SVM sensing"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);

    // reproduce
    auto* reproduce = app.add_subcommand("reproduce", "Run one of the shipped campaign tables");
    int table = 1;
    std::uint64_t seed = 1;
    std::string out_dir;
    int samples_override = 0;
    reproduce->add_option("--table", table, "Campaign table")->required()->check(CLI::IsMember({1, 2, 3}));
    reproduce->add_option("--seed", seed, "Master seed")->required();
    reproduce->add_option("--out", out_dir, "Output directory")->required();
    reproduce->add_option("--samples", samples_override, "Override samples per condition")->check(CLI::PositiveNumber);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run a campaign described by a config file");
    std::string config_path;
    simulate->add_option("--config", config_path, "Experiment config (INI)")->required();
    simulate->add_option("--seed", seed, "Master seed")->required();
    simulate->add_option("--out", out_dir, "Output directory")->required();

    // export-sample
    auto* export_sample = app.add_subcommand("export-sample", "Write the scene and channel snapshot of one sample");
    int condition_idx = 0;
    int sample_idx = 0;
    export_sample->add_option("--config", config_path, "Experiment config (INI); defaults to table 1");
    export_sample->add_option("--seed", seed, "Master seed")->required();
    export_sample->add_option("--condition", condition_idx, "Condition index")->check(CLI::NonNegativeNumber);
    export_sample->add_option("--sample", sample_idx, "Sample index")->check(CLI::NonNegativeNumber);
    export_sample->add_option("--out", out_dir, "Output directory")->required();

    // train
    auto* train = app.add_subcommand("train", "Train an SVM on a sample CSV");
    std::string data_path;
    std::string model_path;
    std::string kernel = "rbf";
    double c_value = 1.0;
    double gamma = 0.0;
    std::string task = "label";
    train->add_option("--data", data_path, "Sample CSV")->required();
    train->add_option("--model", model_path, "Output model file")->required();
    train->add_option("--kernel", kernel, "Kernel")->check(CLI::IsMember({"linear", "rbf"}));
    train->add_option("--c", c_value, "Soft-margin penalty")->check(CLI::PositiveNumber);
    train->add_option("--gamma", gamma, "RBF width (0 = auto)");
    train->add_option("--task", task, "label: all labels; detection: debris vs none; classification: debris labels")
        ->check(CLI::IsMember({"label", "detection", "classification"}));
    std::uint64_t train_seed = 0;
    train->add_option("--seed", train_seed, "Solver scan-order seed (0 = deterministic order)");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "Score a model on a sample CSV");
    evaluate->add_option("--data", data_path, "Sample CSV")->required();
    evaluate->add_option("--model", model_path, "Model file")->required();

    // defaults
    auto* defaults = app.add_subcommand("defaults", "Write the default config and material files");
    defaults->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*reproduce) {
            ds::ExperimentConfig config = ds::ExperimentConfig::table(table);
            config.master_seed = seed;
            if (samples_override > 0) config.samples_per_condition = samples_override;
            ds::CampaignResult r = ds::run_campaign(config, seed, threads);
            ds::write_campaign(r, config, out_dir);
            print_summary(r, out_dir);
        } else if (*simulate) {
            ds::ExperimentConfig config = ds::ExperimentConfig::from_file(config_path);
            config.master_seed = seed;
            ds::CampaignResult r = ds::run_campaign(config, seed, threads);
            ds::write_campaign(r, config, out_dir);
            print_summary(r, out_dir);
        } else if (*export_sample) {
            ds::ExperimentConfig config =
                config_path.empty() ? ds::ExperimentConfig::table(1) : ds::ExperimentConfig::from_file(config_path);
            auto conds = ds::enumerate_conditions(config);
            if (condition_idx >= static_cast<int>(conds.size())) throw ds::ConfigError("condition index out of range");
            const auto& cond = conds[static_cast<std::size_t>(condition_idx)];
            auto labels = ds::condition_labels(config, cond);
            if (sample_idx >= static_cast<int>(labels.size())) throw ds::ConfigError("sample index out of range");
            ds::SampleTrace t = ds::trace_sample(config, cond, labels[static_cast<std::size_t>(sample_idx)], sample_idx, seed);
            fs::create_directories(out_dir);
            std::ofstream(fs::path(out_dir) / "scene.txt", std::ios::binary) << ds::scene_to_text(t.scene);
            ds::write_channel_snapshot((fs::path(out_dir) / "channel.bin").string(),
                                       (fs::path(out_dir) / "channel.txt").string(), t.channels);
            std::cout << cond.id << " sample " << sample_idx << ": " << t.scene.objects.size() << " objects, "
                      << t.interactions.size() << " debris paths, ber " << ds::format_number(t.link.ber) << '\n';
        } else if (*train) {
            auto rows = ds::samples_from_csv(read_file(data_path));
            ds::LabeledDataset data = dataset_for(rows, task_classes(task, rows));
            ds::SvmParams params;
            params.kernel.type = ds::kernel_from_string(kernel);
            params.kernel.gamma = gamma;
            params.c = c_value;
            params.seed = train_seed;
            ds::SvmModel model = ds::svm_train(data, params);
            model.save(model_path);
            std::cout << "trained " << model.machines.size() << " machine(s) on " << data.size() << " rows, classes:";
            for (const auto& c : model.classes) std::cout << ' ' << c;
            std::cout << '\n';
        } else if (*evaluate) {
            auto rows = ds::samples_from_csv(read_file(data_path));
            ds::SvmModel model = ds::SvmModel::load(model_path);
            ds::LabeledDataset data = dataset_for(rows, model.classes);
            if (data.size() == 0) throw ds::ConfigError("no rows match the model classes");
            const std::size_t k = model.classes.size();
            std::vector<std::vector<int>> confusion(k, std::vector<int>(k, 0));
            int correct = 0;
            for (std::size_t i = 0; i < data.size(); ++i) {
                int pred = model.predict(data.features.row(static_cast<Eigen::Index>(i)).transpose()).label;
                confusion[static_cast<std::size_t>(data.labels[i])][static_cast<std::size_t>(pred)] += 1;
                correct += pred == data.labels[i] ? 1 : 0;
            }
            std::cout << "rows: " << data.size() << "\naccuracy: "
                      << ds::format_number(static_cast<double>(correct) / static_cast<double>(data.size())) << '\n';
            std::cout << "confusion (rows true, columns predicted):\n";
            for (std::size_t t = 0; t < k; ++t) {
                std::cout << "  " << model.classes[t];
                for (int n : confusion[t]) std::cout << ' ' << n;
                std::cout << '\n';
            }
        } else if (*defaults) {
            fs::create_directories(out_dir);
            ds::ExperimentConfig config;
            config.material_file = "materials.ini";
            std::ofstream(fs::path(out_dir) / "experiment.ini", std::ios::binary) << config.to_ini_string();
            std::ofstream(fs::path(out_dir) / "materials.ini", std::ios::binary)
                << ds::MaterialLibrary::defaults().to_ini_string();
            for (int t = 1; t <= 3; ++t) {
                ds::ExperimentConfig tc = ds::ExperimentConfig::table(t);
                tc.material_file = "materials.ini";
                std::ofstream(fs::path(out_dir) / ("table" + std::to_string(t) + ".ini"), std::ios::binary)
                    << tc.to_ini_string();
            }
        }
    } catch (const ds::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
