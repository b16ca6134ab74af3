#include "shapesel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "shapesel/error.hpp"
#include "shapesel/text.hpp"

namespace shapesel {

namespace {

template <class F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (!e.stage().empty()) {
            throw;
        }
        throw e.with_stage(stage);
    }
}

[[noreturn]] void bad_setting(const std::string& key, const std::string& value, const std::string& why) {
    throw Error(ErrorKind::ConfigInvalid, "setting '" + key + "' = '" + value + "': " + why);
}

double to_double(const std::string& key, const std::string& value) {
    const auto v = text::parse_double(value);
    if (!v) bad_setting(key, value, "expected a number");
    return *v;
}

std::size_t to_size(const std::string& key, const std::string& value) {
    const auto v = text::parse_int(value);
    if (!v || *v < 0) bad_setting(key, value, "expected a non-negative integer");
    return static_cast<std::size_t>(*v);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_setting(key, value, "expected true or false");
}

template <class T, class Parse>
std::vector<T> to_list(const std::string& key, const std::string& value, Parse parse) {
    std::vector<T> out;
    for (auto field : text::split(value, ',')) {
        const std::string item(text::trim(field));
        if (item.empty()) bad_setting(key, value, "empty list item");
        out.push_back(parse(key, item));
    }
    return out;
}

std::filesystem::path to_path(const std::string& value, const std::filesystem::path& base_dir) {
    std::filesystem::path p(value);
    if (p.is_relative() && !base_dir.empty()) {
        p = base_dir / p;
    }
    return p;
}

template <class T>
std::string list_string(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        if constexpr (std::is_floating_point_v<T>) {
            out += text::format_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

SynthSpec& synth_of(RunConfig& config) {
    if (!config.synth) {
        config.synth = SynthSpec{};
        config.synth->burst_length = config.fl;
    }
    return *config.synth;
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& value,
                   const std::filesystem::path& base_dir) {
    if (key == "dataset") {
        c.dataset_name = value;
    } else if (key == "data_path") {
        c.data_path = to_path(value, base_dir);
    } else if (key == "column") {
        c.column = value;
    } else if (key == "split") {
        if (value == "ett_hourly") {
            c.split = SplitSpec::ett_hourly();
        } else if (value == "ett_minutely") {
            c.split = SplitSpec::ett_minutely();
        } else {
            const auto f = to_list<double>(key, value, to_double);
            if (f.size() != 3) bad_setting(key, value, "expected three fractions or a preset name");
            c.split = SplitSpec::fractions(f[0], f[1], f[2]);
        }
    } else if (key == "split_boundaries") {
        const auto b = to_list<std::size_t>(key, value, to_size);
        if (b.size() != 2) bad_setting(key, value, "expected train_end,val_end");
        c.split = SplitSpec::boundaries(b[0], b[1]);
    } else if (key == "sl") {
        c.sl = to_size(key, value);
    } else if (key == "fl") {
        c.fl = to_size(key, value);
        if (c.synth && !c.synth_burst_explicit) c.synth->burst_length = c.fl;
    } else if (key == "val_stride") {
        c.val_stride = to_size(key, value);
    } else if (key == "test_stride") {
        c.test_stride = to_size(key, value);
    } else if (key == "forecaster") {
        if (value == "baseline") {
            c.forecaster = ForecasterKind::Baseline;
        } else if (value == "external") {
            c.forecaster = ForecasterKind::External;
        } else {
            bad_setting(key, value, "expected baseline or external");
        }
    } else if (key == "ridge") {
        c.ridge = to_double(key, value);
    } else if (key == "primary_name") {
        c.primary_name = value;
    } else if (key == "val_predictions") {
        c.val_predictions = to_path(value, base_dir);
    } else if (key == "test_predictions") {
        c.test_predictions = to_path(value, base_dir);
    } else if (key == "secondary_name") {
        c.secondary_name = value;
    } else if (key == "secondary_test_predictions") {
        c.secondary_test_predictions = to_path(value, base_dir);
    } else if (key == "delta") {
        c.delta = to_double(key, value);
    } else if (key == "dp") {
        c.dp = to_double(key, value);
    } else if (key == "grid_search") {
        c.use_grid_search = to_bool(key, value);
    } else if (key == "grid_atoms") {
        c.grid.atoms = to_list<std::size_t>(key, value, to_size);
    } else if (key == "grid_lengths") {
        c.grid.lengths = to_list<std::size_t>(key, value, to_size);
    } else if (key == "grid_lambdas") {
        c.grid.lambdas = to_list<double>(key, value, to_double);
    } else if (key == "atoms") {
        c.sidl.atoms = to_size(key, value);
    } else if (key == "atom_length") {
        c.sidl.atom_length = to_size(key, value);
    } else if (key == "lambda") {
        c.sidl.lambda = to_double(key, value);
    } else if (key == "norm_bound") {
        c.sidl.norm_bound = to_double(key, value);
    } else if (key == "max_iters") {
        c.sidl.max_iters = to_size(key, value);
    } else if (key == "inner_iters") {
        c.sidl.inner_iters = to_size(key, value);
    } else if (key == "rel_tol") {
        c.sidl.rel_tol = to_double(key, value);
    } else if (key == "folds") {
        c.folds = to_size(key, value);
    } else if (key == "znorm_samples") {
        c.znorm_samples = to_bool(key, value);
    } else if (key == "max_samples") {
        c.max_samples = to_size(key, value);
    } else if (key == "top_k") {
        c.top_k = to_size(key, value);
    } else if (key == "dedup_threshold") {
        c.dedup_threshold = to_double(key, value);
    } else if (key == "seeds") {
        c.seeds.clear();
        for (std::size_t s : to_list<std::size_t>(key, value, to_size)) {
            c.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    } else if (key == "output_dir") {
        c.output_dir = to_path(value, base_dir);
    } else if (key == "synth.length") {
        synth_of(c).length = to_size(key, value);
    } else if (key == "synth.base") {
        synth_of(c).base = value;
    } else if (key == "synth.motif_length") {
        synth_of(c).motif = default_motif(to_size(key, value));
    } else if (key == "synth.motif_rate") {
        synth_of(c).motif_rate = to_double(key, value);
    } else if (key == "synth.burst_std") {
        synth_of(c).burst_std = to_double(key, value);
    } else if (key == "synth.noise_std") {
        synth_of(c).noise_std = to_double(key, value);
    } else if (key == "synth.burst_length") {
        synth_of(c).burst_length = to_size(key, value);
        c.synth_burst_explicit = true;
    } else if (key == "synth.sine_period") {
        synth_of(c).sine_period = to_double(key, value);
    } else if (key == "synth.sine_amplitude") {
        synth_of(c).sine_amplitude = to_double(key, value);
    } else if (key == "synth.ar_coef") {
        synth_of(c).ar_coef = to_double(key, value);
    } else if (key == "synth.seed") {
        synth_of(c).seed = to_size(key, value);
    } else {
        throw Error(ErrorKind::ConfigInvalid, "unknown setting '" + key + "'");
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const std::string contents = text::read_file(path);
    RunConfig config;
    const auto base_dir = path.parent_path();
    std::size_t line_no = 0;
    for (auto line : text::lines(contents)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = text::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::ParseError,
                        path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'", line_no);
        }
        apply_setting(config, std::string(text::trim(line.substr(0, eq))), std::string(text::trim(line.substr(eq + 1))),
                      base_dir);
    }
    return config;
}

SidlGrid RunConfig::effective_grid() const {
    const SidlGrid defaults = SidlGrid::defaults(sl);
    SidlGrid g = grid;
    if (g.atoms.empty()) g.atoms = defaults.atoms;
    if (g.lengths.empty()) g.lengths = defaults.lengths;
    if (g.lambdas.empty()) g.lambdas = defaults.lambdas;
    return g;
}

void RunConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); };
    if (sl == 0 || fl == 0) fail("sl and fl must be positive");
    if (val_stride == 0 || test_stride == 0) fail("strides must be positive");
    if (!(dp >= 0.0 && dp <= 1.0)) fail("dp must lie in [0, 1]");
    if (!std::isfinite(delta)) fail("delta must be finite");
    if (seeds.empty()) fail("at least one seed is required");
    if (top_k == 0) fail("top_k must be positive");
    if (folds < 2) fail("folds must be at least 2");
    if (!(ridge >= 0.0)) fail("ridge must be non-negative");

    auto require = [](const std::filesystem::path& p, const char* what) {
        if (p.empty()) {
            throw Error(ErrorKind::ConfigInvalid, std::string(what) + " is required");
        }
        if (!std::filesystem::exists(p)) {
            throw Error(ErrorKind::FileNotFound, std::string(what) + " '" + p.string() + "' does not exist");
        }
    };
    if (synth) {
        synth->validate();
    } else {
        require(data_path, "data_path");
    }
    if (forecaster == ForecasterKind::External) {
        require(val_predictions, "val_predictions");
        require(test_predictions, "test_predictions");
    }
    if (!secondary_test_predictions.empty()) {
        require(secondary_test_predictions, "secondary_test_predictions");
    }
    if (!use_grid_search) {
        if (sidl.atom_length > sl) fail("atom_length exceeds sl");
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::snapshot() const {
    std::vector<std::pair<std::string, std::string>> s;
    const SidlGrid g = effective_grid();
    s.emplace_back("dataset", dataset_name);
    if (synth) {
        s.emplace_back("synth.length", std::to_string(synth->length));
        s.emplace_back("synth.base", synth->base);
        s.emplace_back("synth.motif_length", std::to_string(synth->motif.empty() ? 32 : synth->motif.size()));
        s.emplace_back("synth.motif_rate", text::format_double(synth->motif_rate));
        s.emplace_back("synth.burst_std", text::format_double(synth->burst_std));
        s.emplace_back("synth.noise_std", text::format_double(synth->noise_std));
        s.emplace_back("synth.burst_length", std::to_string(synth->burst_length));
        s.emplace_back("synth.sine_period", text::format_double(synth->sine_period));
        s.emplace_back("synth.sine_amplitude", text::format_double(synth->sine_amplitude));
        s.emplace_back("synth.ar_coef", text::format_double(synth->ar_coef));
        s.emplace_back("synth.seed", std::to_string(synth->seed));
    } else {
        s.emplace_back("data_path", data_path.string());
        s.emplace_back("column", column);
    }
    s.emplace_back("split", split.describe());
    s.emplace_back("sl", std::to_string(sl));
    s.emplace_back("fl", std::to_string(fl));
    s.emplace_back("val_stride", std::to_string(val_stride));
    s.emplace_back("test_stride", std::to_string(test_stride));
    s.emplace_back("forecaster", forecaster == ForecasterKind::Baseline ? "baseline" : "external");
    s.emplace_back("ridge", text::format_double(ridge));
    s.emplace_back("primary_name", primary_name);
    if (forecaster == ForecasterKind::External) {
        s.emplace_back("val_predictions", val_predictions.string());
        s.emplace_back("test_predictions", test_predictions.string());
    }
    if (!secondary_test_predictions.empty()) {
        s.emplace_back("secondary_name", secondary_name);
        s.emplace_back("secondary_test_predictions", secondary_test_predictions.string());
    }
    s.emplace_back("delta", text::format_double(delta));
    s.emplace_back("dp", text::format_double(dp));
    s.emplace_back("grid_search", use_grid_search ? "true" : "false");
    s.emplace_back("grid_atoms", list_string(g.atoms));
    s.emplace_back("grid_lengths", list_string(g.lengths));
    s.emplace_back("grid_lambdas", list_string(g.lambdas));
    s.emplace_back("atoms", std::to_string(sidl.atoms));
    s.emplace_back("atom_length", std::to_string(sidl.atom_length));
    s.emplace_back("lambda", text::format_double(sidl.lambda));
    s.emplace_back("norm_bound", text::format_double(sidl.norm_bound));
    s.emplace_back("max_iters", std::to_string(sidl.max_iters));
    s.emplace_back("inner_iters", std::to_string(sidl.inner_iters));
    s.emplace_back("rel_tol", text::format_double(sidl.rel_tol));
    s.emplace_back("folds", std::to_string(folds));
    s.emplace_back("znorm_samples", znorm_samples ? "true" : "false");
    s.emplace_back("max_samples", std::to_string(max_samples));
    s.emplace_back("top_k", std::to_string(top_k));
    s.emplace_back("dedup_threshold", text::format_double(dedup_threshold));
    s.emplace_back("seeds", list_string(seeds));
    s.emplace_back("std_convention", "population");
    return s;
}

AblationAxis parse_ablation_axis(const std::string& name) {
    if (name == "delta") return AblationAxis::Delta;
    if (name == "dp") return AblationAxis::DropPercentage;
    throw Error(ErrorKind::ConfigInvalid, "ablation axis must be 'delta' or 'dp', got '" + name + "'");
}

std::string_view to_string(AblationAxis axis) { return axis == AblationAxis::Delta ? "delta" : "dp"; }

PreparedInputs prepare_inputs(const RunConfig& config) {
    const TimeSeries series = staged("ingest", [&] {
        if (config.synth) {
            return generate_planted(*config.synth).series;
        }
        return load_series(config.data_path, config.column);
    });
    std::string dataset = config.dataset_name;
    if (dataset.empty()) {
        dataset = config.synth ? "synthetic" : config.data_path.stem().string();
    }

    const SplitSeries parts = staged("split", [&] { return split_series(series, config.split, config.sl + config.fl); });
    WindowSet val = staged("window", [&] { return make_windows(parts.val, config.sl, config.fl, config.val_stride); });
    WindowSet test = staged("window", [&] { return make_windows(parts.test, config.sl, config.fl, config.test_stride); });

    std::vector<std::string> names{config.primary_name};
    std::vector<ErrorVector> test_errors;
    ErrorVector val_errors = staged("forecast", [&] {
        if (config.forecaster == ForecasterKind::Baseline) {
            const BaselineModel model = fit_baseline(parts.train, config.sl, config.fl, config.ridge);
            test_errors.push_back(per_window_mse(predict(model, test), test));
            return per_window_mse(predict(model, val), val);
        }
        const auto val_preds = load_external_predictions(config.val_predictions, val, config.primary_name);
        const auto test_preds = load_external_predictions(config.test_predictions, test, config.primary_name);
        test_errors.push_back(per_window_mse(test_preds, test));
        return per_window_mse(val_preds, val);
    });
    if (!config.secondary_test_predictions.empty()) {
        staged("forecast", [&] {
            const auto preds = load_external_predictions(config.secondary_test_predictions, test, config.secondary_name);
            test_errors.push_back(per_window_mse(preds, test));
            return 0;
        });
        names.push_back(config.secondary_name);
    }
    return PreparedInputs{std::move(dataset), parts.bounds, std::move(val), std::move(test), std::move(val_errors),
                  std::move(names), std::move(test_errors)};
}

namespace {

Samples high_error_samples(const RunConfig& config, const PreparedInputs& in, const std::vector<std::size_t>& indices) {
    std::vector<std::size_t> picked = indices;
    if (config.max_samples > 0 && picked.size() > config.max_samples) {
        // Evenly spaced subsample keeps coverage of the whole validation split.
        std::vector<std::size_t> thinned;
        thinned.reserve(config.max_samples);
        for (std::size_t j = 0; j < config.max_samples; ++j) {
            thinned.push_back(picked[j * picked.size() / config.max_samples]);
        }
        picked = std::move(thinned);
    }
    Samples samples;
    samples.reserve(picked.size());
    for (std::size_t i : picked) {
        const auto ctx = in.val.context(i);
        samples.push_back(config.znorm_samples ? znorm(ctx) : std::vector<double>(ctx.begin(), ctx.end()));
    }
    return samples;
}

}  // namespace

LearnedShapelets learn_shapelets(const RunConfig& config, const PreparedInputs& in) {
    LearnedShapelets out;
    out.threshold = compute_threshold(in.val_errors.mean, in.val_errors.std, config.delta);
    const auto high = filter_high_error(in.val_errors, out.threshold.tau);
    out.high_error_count = high.size();
    const Samples samples = high_error_samples(config, in, high);

    if (samples.empty()) {
        out.warnings.push_back("EmptySampleSet: no validation window exceeds tau = " +
                               text::format_double(out.threshold.tau) + " (delta = " +
                               text::format_double(config.delta) + "); reporting no-drop results for shapelet selection");
    }

    for (std::uint64_t seed : config.seeds) {
        SeedShapelets s;
        s.seed = seed;
        s.chosen = config.sidl;
        s.chosen.seed = seed;
        if (!samples.empty()) {
            staged("learn-shapelets", [&] {
                if (config.use_grid_search && samples.size() >= config.folds) {
                    auto gs = grid_search(samples, config.effective_grid(), s.chosen, config.folds);
                    s.chosen = gs.best;
                    s.chosen.seed = seed;
                    s.grid = std::move(gs.cells);
                } else if (config.use_grid_search) {
                    out.warnings.push_back("seed " + std::to_string(seed) + ": only " + std::to_string(samples.size()) +
                                           " high-error samples, grid search skipped");
                }
                auto learned = learn_dictionary(samples, s.chosen);
                s.shapelets = rank_top_k(learned.dictionary, learned.codes, config.top_k, config.dedup_threshold);
                s.dictionary = std::move(learned.dictionary);
                return 0;
            });
            if (s.shapelets.empty()) {
                out.warnings.push_back("seed " + std::to_string(seed) +
                                       ": no shapelet survived ranking; reporting no-drop results for shapelet selection");
            }
        }
        if (!s.shapelets.empty()) {
            s.distances = staged("distance", [&] { return build_distance_matrix(in.test, s.shapelets); });
        }
        out.seeds.push_back(std::move(s));
    }
    return out;
}

namespace {

SummaryRow average(const std::string& name, const std::vector<SeedRun>& seeds, std::size_t f) {
    SummaryRow row;
    row.forecaster = name;
    row.coverage = 0.0;
    const double n = static_cast<double>(seeds.size());
    for (const auto& s : seeds) {
        const auto& e = s.evals[f];
        row.no_drop_mse += e.no_drop.mse_zeroed;
        row.random_mse += e.random.mse_zeroed;
        row.shapelet_mse += e.shapelet.mse_zeroed;
        row.coverage += e.shapelet.coverage;
        row.random_mse_retained += e.random.mse_retained;
        row.shapelet_mse_retained += e.shapelet.mse_retained;
    }
    row.no_drop_mse /= n;
    row.random_mse /= n;
    row.shapelet_mse /= n;
    row.coverage /= n;
    row.random_mse_retained /= n;
    row.shapelet_mse_retained /= n;
    return row;
}

}  // namespace

RunReport evaluate_selection(const RunConfig& config, const PreparedInputs& in, const LearnedShapelets& learned,
                             double dp) {
    RunReport r;
    r.dataset = in.dataset;
    r.bounds = in.bounds;
    r.val_windows = in.val.size();
    r.test_windows = in.test.size();
    r.dp = dp;
    r.threshold = learned.threshold;
    r.high_error_count = learned.high_error_count;
    r.forecasters = in.names;
    r.test_errors = in.test_errors;
    r.warnings = learned.warnings;
    RunConfig effective = config;
    effective.dp = dp;
    r.config = effective.snapshot();

    const std::size_t n = in.test.size();
    staged("select", [&] {
        for (const auto& sl : learned.seeds) {
            SeedRun run;
            run.seed = sl.seed;
            run.chosen = sl.chosen;
            run.grid = sl.grid;
            run.dictionary = sl.dictionary;
            run.shapelets = sl.shapelets;
            run.distances = sl.distances;
            run.shapelet_selection = sl.distances ? discard(dp, *sl.distances) : keep_all(n);
            run.random_selection = random_selection(dp, n, sl.seed);
            const Selection none = keep_all(n);
            for (std::size_t f = 0; f < in.names.size(); ++f) {
                ForecasterEval e;
                e.forecaster = in.names[f];
                e.no_drop = selective_mse(in.test_errors[f], none);
                e.random = selective_mse(in.test_errors[f], run.random_selection);
                e.shapelet = selective_mse(in.test_errors[f], run.shapelet_selection);
                run.evals.push_back(std::move(e));
            }
            r.seeds.push_back(std::move(run));
        }
        return 0;
    });
    for (std::size_t f = 0; f < in.names.size(); ++f) {
        r.summary.push_back(average(in.names[f], r.seeds, f));
    }
    return r;
}

RunReport run_pipeline(const RunConfig& config) {
    staged("config", [&] {
        config.validate();
        return 0;
    });
    const PreparedInputs in = prepare_inputs(config);
    const LearnedShapelets learned = learn_shapelets(config, in);
    RunReport report = evaluate_selection(config, in, learned, config.dp);
    if (!config.output_dir.empty()) {
        staged("report", [&] {
            emit_report(report, config.output_dir);
            return 0;
        });
    }
    return report;
}

std::vector<RunReport> run_ablation(const RunConfig& config, AblationAxis axis, const std::vector<double>& values) {
    if (values.empty()) {
        throw Error(ErrorKind::ConfigInvalid, "ablation needs at least one value");
    }
    staged("config", [&] {
        config.validate();
        for (double v : values) {
            if (axis == AblationAxis::DropPercentage && !(v >= 0.0 && v <= 1.0)) {
                throw Error(ErrorKind::ConfigInvalid, "dp values must lie in [0, 1]");
            }
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::ConfigInvalid, "ablation values must be finite");
            }
        }
        return 0;
    });
    const PreparedInputs in = prepare_inputs(config);
    std::vector<RunReport> reports;
    if (axis == AblationAxis::DropPercentage) {
        const LearnedShapelets learned = learn_shapelets(config, in);
        for (double dp : values) {
            reports.push_back(evaluate_selection(config, in, learned, dp));
        }
    } else {
        for (double delta : values) {
            RunConfig c = config;
            c.delta = delta;
            const LearnedShapelets learned = learn_shapelets(c, in);
            reports.push_back(evaluate_selection(c, in, learned, c.dp));
        }
    }
    if (!config.output_dir.empty()) {
        staged("report", [&] {
            std::filesystem::create_directories(config.output_dir);
            for (std::size_t i = 0; i < reports.size(); ++i) {
                const std::string sub = std::string(to_string(axis)) + "_" + text::format_double(values[i]);
                emit_report(reports[i], config.output_dir / sub);
            }
            emit_ablation(reports, axis, values, config.output_dir / ("ablation_" + std::string(to_string(axis)) + ".csv"));
            return 0;
        });
    }
    return reports;
}

}  // namespace shapesel
