#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "shapesel/data.hpp"
#include "shapesel/distance.hpp"
#include "shapesel/error.hpp"
#include "shapesel/forecast.hpp"
#include "shapesel/pipeline.hpp"
#include "shapesel/select.hpp"
#include "shapesel/sidl.hpp"
#include "shapesel/synth.hpp"

namespace py = pybind11;
using namespace shapesel;

namespace {

py::dict selection_dict(const Selection& s) {
    py::dict d;
    d["dropped"] = s.dropped;
    d["retained"] = s.retained;
    d["dp"] = s.dp;
    d["method"] = std::string(to_string(s.method));
    if (s.seed) d["seed"] = *s.seed;
    return d;
}

py::dict report_dict(const RunReport& r) {
    py::list summary;
    for (const SummaryRow& row : r.summary) {
        py::dict d;
        d["forecaster"] = row.forecaster;
        d["no_drop_mse"] = row.no_drop_mse;
        d["random_mse"] = row.random_mse;
        d["shapelet_mse"] = row.shapelet_mse;
        d["coverage"] = row.coverage;
        d["random_mse_retained"] = row.random_mse_retained;
        d["shapelet_mse_retained"] = row.shapelet_mse_retained;
        summary.append(d);
    }
    py::dict out;
    out["dataset"] = r.dataset;
    out["val_windows"] = r.val_windows;
    out["test_windows"] = r.test_windows;
    out["tau"] = r.threshold.tau;
    out["high_error_count"] = r.high_error_count;
    out["summary"] = summary;
    out["warnings"] = r.warnings;
    return out;
}

}  // namespace

PYBIND11_MODULE(_shapesel, m) {
    m.doc() = "Shapelet-guided selective forecasting";

    static PyObject* error_type = PyErr_NewException("shapesel.ShapeselError", PyExc_RuntimeError, nullptr);
    m.attr("ShapeselError") = py::handle(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst = py::reinterpret_borrow<py::object>(error_type)(e.what());
            inst.attr("kind") = std::string(to_string(e.kind()));
            inst.attr("stage") = e.stage();
            PyErr_SetObject(error_type, inst.ptr());
        }
    });

    m.def(
        "load_series",
        [](const std::filesystem::path& path, const std::string& column) {
            const TimeSeries ts = load_series(path, column);
            return std::vector<double>(ts.values().begin(), ts.values().end());
        },
        py::arg("path"), py::arg("column") = "OT");

    m.def("znorm", [](const std::vector<double>& v) { return znorm(v); });
    m.def("znorm_ed", [](const std::vector<double>& a, const std::vector<double>& b) { return znorm_ed(a, b); });
    m.def(
        "sliding_min_distance",
        [](const std::vector<double>& context, const std::vector<double>& shapelet) {
            const Match match = sliding_min_distance(context, shapelet);
            return py::make_tuple(match.distance, match.position);
        },
        py::arg("context"), py::arg("shapelet"));

    m.def(
        "compute_threshold",
        [](double mean_err, double std_err, double delta) { return compute_threshold(mean_err, std_err, delta).tau; },
        py::arg("mean_err"), py::arg("std_err"), py::arg("delta") = 2.0);
    m.def(
        "filter_high_error",
        [](const std::vector<double>& errors, double tau) {
            return filter_high_error(ErrorVector::from_errors(errors), tau);
        },
        py::arg("errors"), py::arg("tau"));
    m.def("drop_count", &drop_count, py::arg("dp"), py::arg("n"));
    m.def(
        "discard_by_distance",
        [](double dp, const std::vector<double>& min_distances) {
            return selection_dict(discard_by_distance(dp, min_distances));
        },
        py::arg("dp"), py::arg("min_distances"));
    m.def(
        "random_selection",
        [](double dp, std::size_t n, std::uint64_t seed) { return selection_dict(random_selection(dp, n, seed)); },
        py::arg("dp"), py::arg("n"), py::arg("seed"));
    m.def(
        "selective_mse",
        [](const std::vector<double>& errors, std::vector<std::size_t> dropped) {
            Selection sel;
            std::sort(dropped.begin(), dropped.end());
            std::vector<bool> mask(errors.size(), false);
            for (std::size_t i : dropped) {
                if (i >= errors.size()) throw Error(ErrorKind::IndexMismatch, "dropped index out of range");
                mask[i] = true;
            }
            sel.dropped = std::move(dropped);
            for (std::size_t i = 0; i < errors.size(); ++i) {
                if (!mask[i]) sel.retained.push_back(i);
            }
            const EvaluationReport r = selective_mse(ErrorVector::from_errors(errors), sel);
            py::dict d;
            d["mse_zeroed"] = r.mse_zeroed;
            d["mse_retained"] = r.mse_retained;
            d["coverage"] = r.coverage;
            d["no_retained"] = r.no_retained;
            return d;
        },
        py::arg("errors"), py::arg("dropped"));

    m.def(
        "learn_dictionary",
        [](const Samples& samples, std::size_t atoms, std::size_t atom_length, double lam, double norm_bound,
           std::size_t max_iters, std::uint64_t seed, std::size_t top_k, double dedup_threshold) {
            SidlConfig cfg;
            cfg.atoms = atoms;
            cfg.atom_length = atom_length;
            cfg.lambda = lam;
            cfg.norm_bound = norm_bound;
            cfg.max_iters = max_iters;
            cfg.seed = seed;
            const LearnResult r = learn_dictionary(samples, cfg);
            const ShapeletSet ranked = rank_top_k(r.dictionary, r.codes, top_k, dedup_threshold);
            std::vector<std::vector<double>> shapelets;
            std::vector<double> scores;
            for (const Shapelet& s : ranked.shapelets) {
                shapelets.push_back(s.values);
                scores.push_back(s.score);
            }
            py::dict d;
            d["atoms"] = r.dictionary.atoms;
            d["objective_trace"] = r.dictionary.objective_trace;
            d["shapelets"] = shapelets;
            d["scores"] = scores;
            return d;
        },
        py::arg("samples"), py::arg("atoms") = 8, py::arg("atom_length") = 32, py::arg("lam") = 0.1,
        py::arg("norm_bound") = 1.0, py::arg("max_iters") = 100, py::arg("seed") = 0, py::arg("top_k") = 5,
        py::arg("dedup_threshold") = 1.0);

    m.def("default_motif", &default_motif, py::arg("q") = 32);
    m.def(
        "generate_planted",
        [](std::size_t length, const std::string& base, double motif_rate, double burst_std, double noise_std,
           std::size_t burst_length, std::size_t motif_length, std::uint64_t seed) {
            SynthSpec spec;
            spec.length = length;
            spec.base = base;
            spec.motif = default_motif(motif_length);
            spec.motif_rate = motif_rate;
            spec.burst_std = burst_std;
            spec.noise_std = noise_std;
            spec.burst_length = burst_length;
            spec.seed = seed;
            const PlantedSeries p = generate_planted(spec);
            py::dict d;
            d["values"] = std::vector<double>(p.series.values().begin(), p.series.values().end());
            d["motif_starts"] = p.motif_starts;
            d["motif_length"] = p.motif_length;
            d["burst_length"] = p.burst_length;
            return d;
        },
        py::arg("length") = 20000, py::arg("base") = "sine", py::arg("motif_rate") = 0.3, py::arg("burst_std") = 0.5,
        py::arg("noise_std") = 0.1, py::arg("burst_length") = 96, py::arg("motif_length") = 32, py::arg("seed") = 0);

    m.def(
        "run_pipeline",
        [](const std::filesystem::path& config, const std::map<std::string, std::string>& settings,
           const std::filesystem::path& output_dir) {
            RunConfig c = config.empty() ? RunConfig{} : load_run_config(config);
            for (const auto& [key, value] : settings) apply_setting(c, key, value);
            c.output_dir = output_dir;
            RunReport r;
            {
                py::gil_scoped_release release;
                r = run_pipeline(c);
            }
            return report_dict(r);
        },
        py::arg("config") = std::filesystem::path{}, py::arg("settings") = std::map<std::string, std::string>{},
        py::arg("output_dir") = std::filesystem::path{});
}
