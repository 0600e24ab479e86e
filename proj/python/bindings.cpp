#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "debrisense/experiments.hpp"
#include "debrisense/propagation.hpp"
#include "debrisense/scene.hpp"

namespace py = pybind11;
namespace ds = debrisense;

namespace {

py::dict metrics_dict(const ds::Condition& c, const ds::MetricsSummary& m)
{
    py::dict d;
    d["condition_id"] = c.id;
    d["frequency_hz"] = c.frequency_hz;
    d["mimo"] = c.mimo;
    d["snr_db"] = c.snr_db;
    d["density"] = c.density_per_km3;
    d["mean_ber"] = m.mean_ber;
    d["ber_ci95"] = m.ber_ci95;
    d["det_acc"] = m.det_acc;
    d["cls_acc"] = m.cls_acc;
    d["n_invalid"] = m.n_invalid;
    d["warnings"] = m.warnings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Debris sensing over THz inter-satellite links (C++ core)";

    auto base = py::register_exception<ds::Error>(m, "Error");
    py::register_exception<ds::ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ds::InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<ds::GeometryError>(m, "GeometryError", base.ptr());
    py::register_exception<ds::MaterialError>(m, "MaterialError", base.ptr());

    m.attr("SPEED_OF_LIGHT") = ds::kSpeedOfLight;

    // geometry and propagation
    m.def("fspl_amplitude", &ds::fspl_amplitude, py::arg("frequency_hz"), py::arg("range_m"));
    m.def("incidence_angle", &ds::incidence_angle, py::arg("s1"), py::arg("s2"), py::arg("d"));
    m.def("excess_delay", &ds::excess_delay, py::arg("s1_km"), py::arg("s2_km"), py::arg("d_km"));
    m.def("roughness_coefficient", &ds::roughness_coefficient, py::arg("frequency_hz"), py::arg("sigma_m"),
          py::arg("incidence_rad"));
    m.def("fresnel_kirchhoff_parameter", &ds::fresnel_kirchhoff_parameter, py::arg("clearance_m"),
          py::arg("frequency_hz"), py::arg("s1_m"), py::arg("s2_m"));
    m.def(
        "diffraction_loss", [](double v, double mu1, double mu2, double mu3) { return ds::diffraction_loss(v, {mu1, mu2, mu3}); },
        py::arg("v"), py::arg("mu1") = 1.0, py::arg("mu2") = 1.0, py::arg("mu3") = 1.0);
    m.def(
        "beckmann_series",
        [](double g, double a, int max_terms) {
            auto r = ds::beckmann_series(g, a, max_terms);
            return py::make_tuple(r.sum, r.terms, r.converged);
        },
        py::arg("g_sca"), py::arg("a") = 0.0, py::arg("max_terms") = 200,
        "Returns (sum, terms used, converged).");

    py::class_<ds::MaterialProperties>(m, "Material")
        .def_readonly("name", &ds::MaterialProperties::name)
        .def_readwrite("roughness_sigma_m", &ds::MaterialProperties::roughness_sigma_m)
        .def("refractive_index_at", &ds::MaterialProperties::refractive_index_at)
        .def("absorption_at", &ds::MaterialProperties::absorption_at)
        .def_static("lossless", &ds::MaterialProperties::lossless, py::arg("n"), py::arg("f_min") = 1.0e9,
                    py::arg("f_max") = 1.0e13);
    m.def("default_material", [](const std::string& name) { return ds::MaterialLibrary::defaults().get(name); },
          py::arg("name"));
    m.def("wave_impedance", &ds::wave_impedance, py::arg("frequency_hz"), py::arg("material"));
    m.def(
        "fresnel_coefficients",
        [](double f, double theta, const ds::MaterialProperties& mat) {
            auto r = ds::fresnel_coefficients(f, theta, mat);
            return py::make_tuple(r.te, r.tm);
        },
        py::arg("frequency_hz"), py::arg("incidence_rad"), py::arg("material"), "Returns (gamma_te, gamma_tm).");

    // features
    m.def(
        "extract_features",
        [](const ds::CMatrix& csi) {
            auto f = ds::extract_features(csi);
            py::dict d;
            for (std::size_t i = 0; i < ds::FeatureVector::kSize; ++i) d[py::str(ds::FeatureVector::names()[i])] = f.to_array()[i];
            return d;
        },
        py::arg("csi"));

    // link
    m.def("q_function", &ds::q_function, py::arg("x"));
    m.def(
        "simulate_link",
        [](const std::vector<ds::CMatrix>& subbands, double snr_db, int frame_symbols, bool perfect_csi,
           std::uint64_t seed) {
            ds::PilotConfig pilots;
            pilots.method = perfect_csi ? ds::CsiMethod::Perfect : ds::CsiMethod::LeastSquares;
            auto r = ds::simulate_link(subbands, {snr_db}, frame_symbols, pilots, seed);
            return py::make_tuple(r.ber, r.bits);
        },
        py::arg("subbands"), py::arg("snr_db"), py::arg("frame_symbols"), py::arg("perfect_csi") = false,
        py::arg("seed") = 1, "Returns (ber, bits).");

    // experiments
    py::class_<ds::ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_static("table", &ds::ExperimentConfig::table, py::arg("which"))
        .def_static("from_ini", &ds::ExperimentConfig::from_ini_string, py::arg("text"), py::arg("base_dir") = ".")
        .def_static("from_file", &ds::ExperimentConfig::from_file, py::arg("path"))
        .def("to_ini", &ds::ExperimentConfig::to_ini_string)
        .def("validate", &ds::ExperimentConfig::validate)
        .def_readwrite("frequencies_hz", &ds::ExperimentConfig::frequencies_hz)
        .def_readwrite("snr_db", &ds::ExperimentConfig::snr_db)
        .def_readwrite("mimo_sizes", &ds::ExperimentConfig::mimo_sizes)
        .def_readwrite("densities_per_km3", &ds::ExperimentConfig::densities_per_km3)
        .def_readwrite("samples_per_condition", &ds::ExperimentConfig::samples_per_condition)
        .def_readwrite("k_factor_db", &ds::ExperimentConfig::k_factor_db)
        .def_readwrite("n_subbands", &ds::ExperimentConfig::n_subbands);

    m.def(
        "run_campaign",
        [](const ds::ExperimentConfig& config, std::uint64_t seed, int threads) {
            ds::CampaignResult r;
            {
                py::gil_scoped_release release;
                r = ds::run_campaign(config, seed, threads);
            }
            py::list metrics;
            for (std::size_t i = 0; i < r.conditions.size(); ++i) metrics.append(metrics_dict(r.conditions[i], r.evaluations[i].metrics));
            std::string csv;
            for (std::size_t i = 0; i < r.samples.size(); ++i) {
                std::string part = ds::samples_to_csv(r.samples[i]);
                csv += i == 0 ? part : part.substr(part.find('\n') + 1);
            }
            return py::make_tuple(metrics, csv);
        },
        py::arg("config"), py::arg("seed"), py::arg("threads") = 1,
        "Runs every condition. Returns (per-condition metric dicts, sample CSV text).");
    m.attr("SAMPLE_CSV_HEADER") = std::string(ds::kSampleCsvHeader);
    m.attr("METRICS_CSV_HEADER") = std::string(ds::kMetricsCsvHeader);
}
