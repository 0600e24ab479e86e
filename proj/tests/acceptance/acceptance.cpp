// End-to-end acceptance run. Prints one PASS/FAIL line per criterion, with
// the measured numbers, and exits non-zero when an unexpected criterion fails.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "debrisense/experiments.hpp"
#include "debrisense/propagation.hpp"
#include "debrisense/rng.hpp"
#include "debrisense/scene.hpp"
#include "oracles.hpp"

namespace ds = debrisense;
namespace fs = std::filesystem;

namespace {

constexpr double kDeg = M_PI / 180.0;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

std::string fmt(double v, int digits = 6)
{
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- physics

Outcome physics_goldens()
{
    Outcome o;
    double a = ds::fspl_amplitude(3e11, 5e5);
    long double exact = oracle::kC / (4.0L * oracle::kPiL * 3.0e11L * 5.0e5L);
    o.detail << "fspl " << fmt(a, 8);
    o.check(std::abs(a - 1.5915e-10) <= 1e-14, "fspl vs 1.5915e-10");
    o.check(std::abs(a - static_cast<double>(exact)) <= 1e-14 * static_cast<double>(exact), "fspl vs c/(4 pi f r)");

    double rho = ds::roughness_coefficient(3e11, 50e-6, 30.0 * kDeg);
    o.detail << ", rho " << fmt(rho, 6);
    o.check(std::abs(rho - 0.8624) <= 1e-3, "roughness 0.8624");

    double d1 = ds::diffraction_loss(1.0);
    o.detail << ", D(1) " << fmt(d1, 7) << " (0.5 e^-0.95 = " << fmt(0.5 * std::exp(-0.95), 7) << ")";
    o.check(std::abs(d1 - 0.19343) <= 1e-5, "D(1) vs 0.19343");

    double d10 = ds::diffraction_loss(10.0);
    o.detail << ", D(10) " << fmt(d10, 7);
    o.check(d10 == 0.0225, "D(10) == 0.0225");

    double th = ds::incidence_angle(300.0, 300.0, 300.0);
    o.detail << ", theta " << fmt(th / kDeg, 12) << " deg";
    o.check(std::abs(th - 30.0 * kDeg) <= 1e-9, "incidence 30 deg");
    return o;
}

Outcome fresnel_limits()
{
    Outcome o;
    ds::Complex z = ds::wave_impedance(1e11, ds::MaterialProperties::lossless(1.0));
    o.detail << "eta0 " << fmt(std::abs(z), 9);
    o.check(std::abs(z - ds::Complex(376.73, 0.0)) <= 0.01, "eta0");

    auto two = ds::MaterialProperties::lossless(2.0);
    double g0 = std::abs(ds::fresnel_coefficients(1e11, 0.0, two).te);
    o.detail << ", |G(0)| " << fmt(g0, 12);
    o.check(std::abs(g0 - 1.0 / 3.0) <= 1e-9, "normal incidence 1/3");

    double gz = std::abs(ds::fresnel_coefficients(1e11, 89.9 * kDeg, two).te);
    double gz2 = std::abs(ds::fresnel_coefficients(1e11, 89.99 * kDeg, two).te);
    double gm = std::abs(ds::fresnel_coefficients(3e12, 89.9 * kDeg, ds::MaterialLibrary::defaults().get("rough_metal")).te);
    o.detail << ", n=2 |G_TE(89.9)| " << fmt(gz, 6) << ", |G_TE(89.99)| " << fmt(gz2, 6) << ", rough_metal |G_TE(89.9)| "
             << fmt(gm, 6);
    o.check(1.0 - gz <= 1e-3, "n=2 grazing at 89.9 deg");
    return o;
}

Outcome beckmann()
{
    Outcome o;
    auto r = ds::beckmann_series(1.0, 0.0);
    double ref = oracle::beckmann_partial_sum(1.0L);
    o.detail << "S(1, 0) " << fmt(r.sum, 8) << " oracle " << fmt(ref, 8);
    o.check(std::abs(r.sum - 1.3179) <= 1e-3, "1.3179");
    o.check(std::abs(r.sum - ref) <= 1e-12, "partial-sum oracle");

    auto lib = ds::MaterialLibrary::defaults();
    double worst = 0.0;
    int tested = 0;
    for (const auto& [name, m] : lib.all())
        for (double f : {3e10, 3e11, 3e12, 5e12})
            for (double t1 : {0.05, 0.3, 0.6, 0.9, 1.2, 1.45})
                for (double dt : {-0.02, 0.0, 0.02})
                    for (double t3 : {0.0, 0.01, 2.0 * M_PI - 0.02}) {
                        ds::ScatterGeometry geo{t1, std::clamp(t1 + dt, 0.0, 1.5), t3};
                        auto a = ds::scattering_coefficient(f, geo, m, ds::Polarization::TE, 200);
                        auto b = ds::scattering_coefficient(f, geo, m, ds::Polarization::TE, 400);
                        double scale = std::abs(b.value);
                        if (scale > 0.0) worst = std::max(worst, std::abs(a.value - b.value) / scale);
                        ++tested;
                    }
    o.detail << ", cap doubling worst rel change " << fmt(worst, 3) << " over " << tested << " S values";
    o.check(worst < 1e-9, "term cap doubling");
    return o;
}

// ---------------------------------------------------------------- link

Outcome link_oracle()
{
    Outcome o;
    const ds::CMatrix h = ds::CMatrix::Identity(1, 1);
    std::uint64_t seed = 101;
    for (double ebn0_db : {2.0, 4.0, 6.0, 8.0}) {
        const double snr_db = ebn0_db + 10.0 * std::log10(2.0);
        auto r = ds::simulate_link({h}, {snr_db}, 500000, {ds::CsiMethod::Perfect, 0}, seed++);
        double p = oracle::q_function(std::sqrt(2.0 * std::pow(10.0, ebn0_db / 10.0)));
        double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(r.bits));
        double z = (r.ber - p) / sd;
        o.detail << (ebn0_db > 2.0 ? ", " : "") << fmt(ebn0_db, 2) << " dB: " << fmt(r.ber, 5) << " vs " << fmt(p, 5)
                 << " (z " << fmt(z, 2) << ")";
        o.check(r.bits == 1000000u, "bit count");
        o.check(std::abs(z) < 3.0, "Eb/N0 " + fmt(ebn0_db, 2) + " dB");
    }
    return o;
}

// ---------------------------------------------------------------- svm

struct Toy {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

Toy random_instance(int n, std::uint64_t seed)
{
    ds::Rng rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Toy t{Eigen::MatrixXd(n, 2), Eigen::VectorXd(n)};
    for (int i = 0; i < n; ++i) {
        double yi = i % 2 ? 1.0 : -1.0;
        t.y[i] = yi;
        t.x(i, 0) = g(rng) + 0.6 * yi;
        t.x(i, 1) = g(rng) - 0.3 * yi;
    }
    return t;
}

Toy xor_instance()
{
    Toy t{Eigen::MatrixXd(12, 2), Eigen::VectorXd(12)};
    ds::Rng rng(55);
    std::normal_distribution<double> jitter(0.0, 0.15);
    const double corners[4][2] = {{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
    for (int i = 0; i < 12; ++i) {
        int c = i % 4;
        t.x(i, 0) = corners[c][0] + jitter(rng);
        t.x(i, 1) = corners[c][1] + jitter(rng);
        t.y[i] = c < 2 ? 1.0 : -1.0;
    }
    return t;
}

Outcome svm_oracle(const std::vector<ds::CampaignResult>& campaigns)
{
    Outcome o;
    double worst_gap = 0.0;
    auto compare = [&](const Toy& t, const ds::Kernel& k, double c, const std::string& tag) {
        auto gram = k.gram(t.x);
        auto sol = ds::smo_solve(gram, t.y, c, 1e-3, 100000);
        double best = oracle::svm_dual_optimum(gram, t.y, c);
        double gap = std::abs(sol.dual_objective - best) / std::abs(best);
        worst_gap = std::max(worst_gap, gap);
        o.check(gap <= 1e-3, tag);
    };
    for (int inst = 0; inst < 10; ++inst) {
        ds::Kernel k{inst % 2 ? ds::KernelType::Linear : ds::KernelType::Rbf, 0.5 + 0.1 * inst};
        compare(random_instance(8 + inst % 5, 900 + inst), k, inst % 3 == 0 ? 0.5 : (inst % 3 == 1 ? 1.0 : 10.0),
                "instance " + std::to_string(inst));
    }
    compare(xor_instance(), {ds::KernelType::Rbf, 1.0}, 10.0, "xor");
    o.detail << "worst dual gap " << fmt(worst_gap, 3) << " over 11 instances";

    int models = 0, machines = 0;
    double worst_kkt = 0.0, worst_sum = 0.0;
    bool box_ok = true;
    for (const auto& camp : campaigns)
        for (const auto& ev : camp.evaluations)
            for (const auto* m : {&ev.detection, &ev.classification}) {
                if (!m->has_value()) continue;
                ++models;
                for (const auto& bm : (*m)->machines) {
                    ++machines;
                    worst_kkt = std::max(worst_kkt, bm.max_kkt_violation);
                    worst_sum = std::max(worst_sum, std::abs(bm.alpha_y_sum));
                    for (Eigen::Index i = 0; i < bm.coefficients.size(); ++i)
                        box_ok = box_ok && std::abs(bm.coefficients[i]) <= (*m)->c * (1.0 + 1e-12);
                }
            }
    o.detail << "; campaign models " << models << " (" << machines << " machines), worst KKT " << fmt(worst_kkt, 3)
             << ", worst |sum a y| " << fmt(worst_sum, 3);
    o.check(models > 0, "campaign models present");
    o.check(worst_kkt <= 1e-3, "KKT violation");
    o.check(worst_sum <= 1e-6, "equality constraint");
    o.check(box_ok, "box constraint");
    return o;
}

// ---------------------------------------------------------------- features

Outcome feature_oracle()
{
    Outcome o;
    ds::Rng rng(606);
    std::uniform_int_distribution<int> dim(1, 24);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        ds::CMatrix m(dim(rng), dim(rng));
        for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = ds::complex_normal(rng, 1e-7);
        std::vector<double> mag;
        for (Eigen::Index i = 0; i < m.size(); ++i) mag.push_back(std::abs(m(i)));
        auto ref = oracle::moments(mag);
        auto f = ds::extract_features(m);
        const double got[] = {f.mean, f.variance, f.max, f.min, f.skewness};
        const double want[] = {ref.mean, ref.var, ref.max, ref.min, ref.skew};
        for (int k = 0; k < 5; ++k) {
            double err = std::abs(got[k] - want[k]);
            double rel = want[k] != 0.0 ? err / std::abs(want[k]) : (err == 0.0 ? 0.0 : err / 1e-300);
            worst = std::max(worst, rel);
        }
    }
    o.detail << "worst relative error " << fmt(worst, 3) << " over 100 matrices";
    o.check(worst <= 1e-12, "moments");
    return o;
}

// ---------------------------------------------------------------- trends

ds::ExperimentConfig trend_config_frequency_snr()
{
    ds::ExperimentConfig c;
    c.name = "trend-frequency-snr";
    c.frequencies_hz = {3e10, 3e12, 5e12};
    c.snr_db = {5.0, 20.0};
    c.samples_per_condition = 100;
    return c;
}

ds::ExperimentConfig trend_config_density()
{
    ds::ExperimentConfig c;
    c.name = "trend-density";
    c.frequencies_hz = {3e10};
    c.densities_per_km3 = {1e-7, 1e-6};
    c.snr_db = {15.0};
    c.samples_per_condition = 100;
    return c;
}

double metric_at(const ds::CampaignResult& r, double f, double snr, double density, bool detection)
{
    for (std::size_t i = 0; i < r.conditions.size(); ++i) {
        const auto& c = r.conditions[i];
        if (c.frequency_hz == f && c.snr_db == snr && c.density_per_km3 == density) {
            const auto& m = r.evaluations[i].metrics;
            return detection ? m.det_acc : m.cls_acc;
        }
    }
    throw std::runtime_error("condition not found");
}

double ber_at(const ds::CampaignResult& r, double f, double snr)
{
    for (std::size_t i = 0; i < r.conditions.size(); ++i)
        if (r.conditions[i].frequency_hz == f && r.conditions[i].snr_db == snr) return r.evaluations[i].metrics.mean_ber;
    throw std::runtime_error("condition not found");
}

Outcome trend_suite(const std::vector<ds::CampaignResult>& fs_runs, const std::vector<ds::CampaignResult>& dens_runs)
{
    Outcome o;
    const double dens = ds::ExperimentConfig{}.densities_per_km3.front();
    const int seeds = static_cast<int>(fs_runs.size());

    // (a) at 20 dB
    int det_wins = 0, cls_wins = 0;
    double det5 = 0.0, det30 = 0.0;
    for (const auto& r : fs_runs) {
        double d5 = metric_at(r, 5e12, 20.0, dens, true), d30 = metric_at(r, 3e10, 20.0, dens, true);
        double c5 = metric_at(r, 5e12, 20.0, dens, false), c30 = metric_at(r, 3e10, 20.0, dens, false);
        det_wins += d5 > d30;
        cls_wins += c5 > c30;
        det5 += d5 / seeds;
        det30 += d30 / seeds;
    }
    o.detail << "(a) 5 THz beats 30 GHz: det " << det_wins << "/" << seeds << ", cls " << cls_wins << "/" << seeds
             << ", mean det 5 THz " << fmt(det5, 3) << ", 30 GHz " << fmt(det30, 3);
    o.check(det_wins >= 4 && cls_wins >= 4, "(a) seed wins");
    o.check(det5 >= 0.90, "(a) 5 THz detection >= 0.90");
    o.check(det30 <= 0.85, "(a) 30 GHz detection <= 0.85");

    // (b) seed-averaged, per frequency
    o.detail << "; (b) det 5 dB -> 20 dB:";
    for (double f : {3e10, 3e12, 5e12}) {
        double lo = 0.0, hi = 0.0;
        for (const auto& r : fs_runs) {
            lo += metric_at(r, f, 5.0, dens, true) / seeds;
            hi += metric_at(r, f, 20.0, dens, true) / seeds;
        }
        o.detail << " " << fmt(f, 2) << " Hz " << fmt(lo, 3) << " -> " << fmt(hi, 3);
        o.check(hi >= lo, "(b) SNR ordering at " + fmt(f, 2) + " Hz");
    }

    // (c)
    double sparse = 0.0, dense = 0.0;
    for (const auto& r : dens_runs) {
        sparse += metric_at(r, 3e10, 15.0, 1e-7, true) / seeds;
        dense += metric_at(r, 3e10, 15.0, 1e-6, true) / seeds;
    }
    o.detail << "; (c) 30 GHz det at 1e-7 " << fmt(sparse, 3) << ", at 1e-6 " << fmt(dense, 3);
    o.check(dense > sparse, "(c) density ordering");

    // (d)
    double b5 = 0.0, b20 = 0.0;
    for (const auto& r : fs_runs) {
        b5 += ber_at(r, 3e10, 5.0) / seeds;
        b20 += ber_at(r, 3e10, 20.0) / seeds;
    }
    o.detail << "; (d) 30 GHz BER 5 dB " << fmt(b5, 4) << ", 20 dB " << fmt(b20, 4);
    o.check(b20 < b5, "(d) BER falls with SNR");
    return o;
}

// ---------------------------------------------------------------- determinism

std::map<std::string, std::string> csv_files(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        out[fs::relative(e.path(), dir).generic_string()] = buf.str();
    }
    return out;
}

Outcome determinism(const std::string& cli, const fs::path& work)
{
    Outcome o;
    if (cli.empty()) {
        o.check(false, "no --cli binary given");
        return o;
    }
    std::vector<std::map<std::string, std::string>> runs;
    for (const char* tag : {"run_a", "run_b"}) {
        fs::path out = work / "determinism" / tag;
        fs::remove_all(out);
        std::string cmd = "\"" + cli + "\" reproduce --table 2 --seed 7 --out \"" + out.string() + "\" > \"" +
                          (work / (std::string(tag) + ".log")).string() + "\" 2>&1";
        int rc = std::system(cmd.c_str());
        o.check(rc == 0, std::string("reproduce exit status (") + tag + ")");
        if (rc != 0) return o;
        runs.push_back(csv_files(out));
    }
    std::size_t bytes = 0;
    for (const auto& [name, text] : runs[0]) bytes += text.size();
    o.detail << runs[0].size() << " CSV files, " << bytes << " bytes";
    o.check(!runs[0].empty(), "CSV output present");
    o.check(runs[0] == runs[1], "byte-identical CSVs");
    return o;
}

Outcome properties(const std::string& binary, const fs::path& work)
{
    Outcome o;
    if (binary.empty()) {
        o.check(false, "no --properties binary given");
        return o;
    }
    fs::path log = work / "properties.log";
    int rc = std::system(("\"" + binary + "\" > \"" + log.string() + "\" 2>&1").c_str());
    std::ifstream in(log);
    std::string line, summary;
    while (std::getline(in, line))
        if (line.find("test cases:") != std::string::npos) summary = line.substr(line.find("test cases:"));
    o.detail << summary;
    o.check(rc == 0, "property suite exit status");
    return o;
}

std::set<int> parse_list(const std::string& s)
{
    std::set<int> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ','))
        if (!tok.empty()) out.insert(std::stoi(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"acceptance run"};
    std::string work_dir = "acceptance_work";
    std::string cli;
    std::string property_binary;
    std::string known;
    int threads = 0;
    app.add_option("--work-dir", work_dir, "Scratch directory");
    app.add_option("--cli", cli, "debrisense executable");
    app.add_option("--properties", property_binary, "property test executable");
    app.add_option("--known-failures", known, "Comma-separated criteria that are expected to fail");
    app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> expected_failures = parse_list(known);
    fs::create_directories(work_dir);

    // The trend campaigns also feed the KKT check, so run them first.
    auto t0 = std::chrono::steady_clock::now();
    std::vector<ds::CampaignResult> fs_runs, dens_runs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        fs_runs.push_back(ds::run_campaign(trend_config_frequency_snr(), seed, threads));
        dens_runs.push_back(ds::run_campaign(trend_config_density(), seed, threads));
    }
    const double trend_seconds = seconds_since(t0);
    std::vector<ds::CampaignResult> all = fs_runs;
    all.insert(all.end(), dens_runs.begin(), dens_runs.end());

    struct Row {
        int id;
        std::function<Outcome()> run;
    };
    const std::vector<Row> rows = {
        {1, physics_goldens},
        {2, fresnel_limits},
        {3, beckmann},
        {4, link_oracle},
        {5, [&] { return svm_oracle(all); }},
        {6, feature_oracle},
        {7, [&] { return trend_suite(fs_runs, dens_runs); }},
        {8, [&] { return determinism(cli, work_dir); }},
        {9, [&] { return properties(property_binary, work_dir); }},
    };

    int unexpected = 0;
    for (const auto& row : rows) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = row.run();
        } catch (const std::exception& e) {
            o.check(false, std::string("exception: ") + e.what());
        }
        double secs = seconds_since(start) + (row.id == 7 ? trend_seconds : 0.0);
        const bool known_fail = expected_failures.count(row.id) > 0;
        std::cout << "criterion " << row.id << ": " << (o.pass ? "PASS" : "FAIL") << (!o.pass && known_fail ? " (known)" : "")
                  << "  [" << fmt(secs, 3) << " s]  " << o.detail.str() << std::endl;
        if (!o.pass && !known_fail) ++unexpected;
        if (o.pass && known_fail) std::cout << "  note: criterion " << row.id << " is listed as a known failure but passed\n";
    }
    return unexpected == 0 ? 0 : 1;
}
