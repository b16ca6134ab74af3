// Command-line front end. Every subcommand builds a RunConfig from an
// optional --config file, then --set key=value overrides, then dedicated
// flags, so the same keys work everywhere.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "shapesel/data.hpp"
#include "shapesel/error.hpp"
#include "shapesel/forecast.hpp"
#include "shapesel/pipeline.hpp"
#include "shapesel/report.hpp"
#include "shapesel/select.hpp"
#include "shapesel/sidl.hpp"
#include "shapesel/synth.hpp"
#include "shapesel/text.hpp"

namespace fs = std::filesystem;
using namespace shapesel;

namespace {

struct CommonOptions {
    std::string config;
    std::vector<std::string> sets;
    std::string data;
    std::string column;
    std::string split;
    std::optional<std::size_t> sl;
    std::optional<std::size_t> fl;
    std::optional<std::size_t> stride;
    std::string forecaster;
    std::string predictions;
    std::string val_predictions;
    std::optional<double> ridge;
    std::optional<double> dp;
    std::optional<double> delta;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config, "run-config file (key = value lines)");
    app->add_option("--set", o.sets, "override a config key, e.g. --set top_k=8");
    app->add_option("--data", o.data, "dataset CSV");
    app->add_option("--column", o.column, "column to forecast");
    app->add_option("--split", o.split, "fractions 'a,b,c' or ett_hourly / ett_minutely");
    app->add_option("--sl", o.sl, "context length (default 512)");
    app->add_option("--fl", o.fl, "forecast length (default 96)");
    app->add_option("--stride", o.stride, "window stride for validation and test (default 1)");
    app->add_option("--forecaster", o.forecaster, "baseline | external")->check(CLI::IsMember({"baseline", "external"}));
    app->add_option("--predictions", o.predictions, "external test-split prediction file");
    app->add_option("--val-predictions", o.val_predictions, "external validation-split prediction file");
    app->add_option("--ridge", o.ridge, "ridge penalty of the baseline forecaster (default 1e-3)");
    app->add_option("--dp", o.dp, "drop percentage in [0, 1] (default 0.2)");
    app->add_option("--delta", o.delta, "error threshold multiplier (default 2)");
    app->add_option("--seed", o.seed, "single seed (replaces the seed list)");
    app->add_option("--out", o.out, "output directory");
}

RunConfig build_config(const CommonOptions& o) {
    RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    for (const auto& kv : o.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::ConfigInvalid, "--set expects key=value, got '" + kv + "'");
        }
        apply_setting(c, std::string(text::trim(kv.substr(0, eq))), std::string(text::trim(kv.substr(eq + 1))));
    }
    if (!o.data.empty()) apply_setting(c, "data_path", o.data);
    if (!o.column.empty()) apply_setting(c, "column", o.column);
    if (!o.split.empty()) apply_setting(c, "split", o.split);
    if (o.sl) apply_setting(c, "sl", std::to_string(*o.sl));
    if (o.fl) apply_setting(c, "fl", std::to_string(*o.fl));
    if (o.stride) c.val_stride = c.test_stride = *o.stride;
    if (!o.forecaster.empty()) apply_setting(c, "forecaster", o.forecaster);
    if (!o.predictions.empty()) c.test_predictions = o.predictions;
    if (!o.val_predictions.empty()) c.val_predictions = o.val_predictions;
    if (o.ridge) c.ridge = *o.ridge;
    if (o.dp) c.dp = *o.dp;
    if (o.delta) c.delta = *o.delta;
    if (o.seed) c.seeds = {*o.seed};
    if (!o.out.empty()) c.output_dir = o.out;
    return c;
}

fs::path require_out(const RunConfig& c) {
    if (c.output_dir.empty()) {
        throw Error(ErrorKind::ConfigInvalid, "an output directory is required (--out or output_dir)");
    }
    fs::create_directories(c.output_dir);
    return c.output_dir;
}

void print_summary(const RunReport& r) {
    std::cout << "dataset " << r.dataset << ": split " << r.bounds.train_end << "/" << r.bounds.val_end << "/"
              << r.bounds.total << ", " << r.val_windows << " validation and " << r.test_windows << " test windows\n";
    std::cout << "tau = " << text::format_double(r.threshold.tau) << " (mean " << text::format_double(r.threshold.mean_err)
              << ", std " << text::format_double(r.threshold.std_err) << "), " << r.high_error_count
              << " high-error validation windows\n";
    for (const auto& s : r.summary) {
        std::cout << s.forecaster << ": no-drop " << text::format_double(s.no_drop_mse) << ", random "
                  << text::format_double(s.random_mse) << ", shapelet " << text::format_double(s.shapelet_mse)
                  << ", coverage " << text::format_double(s.coverage) << "\n";
    }
    for (const auto& w : r.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
}

int cmd_ingest(const CommonOptions& o) {
    const RunConfig c = build_config(o);
    const TimeSeries ts = load_series(c.data_path, c.column);
    const SplitSeries parts = split_series(ts, c.split, c.sl + c.fl);
    std::cout << "series length " << ts.size() << "\n";
    std::cout << "split " << c.split.describe() << " -> train [0," << parts.bounds.train_end << "), val ["
              << parts.bounds.train_end << "," << parts.bounds.val_end << "), test [" << parts.bounds.val_end << ","
              << parts.bounds.total << ")\n";
    std::cout << "windows (sl=" << c.sl << ", fl=" << c.fl << "): val "
              << window_count(parts.val.size(), c.sl, c.fl, c.val_stride) << ", test "
              << window_count(parts.test.size(), c.sl, c.fl, c.test_stride) << "\n";
    if (!c.output_dir.empty()) {
        fs::create_directories(c.output_dir);
        for (const auto& [name, part] : {std::pair{"train", &parts.train}, {"val", &parts.val}, {"test", &parts.test}}) {
            std::string out = c.column + "\n";
            for (double v : part->values()) {
                out += text::format_double(v) + "\n";
            }
            text::write_file(c.output_dir / (std::string(name) + ".csv"), out);
        }
    }
    return 0;
}

int cmd_forecast(const CommonOptions& o) {
    RunConfig c = build_config(o);
    c.secondary_test_predictions.clear();
    if (c.forecaster == ForecasterKind::Baseline && !c.synth) {
        const fs::path out = require_out(c);
        const TimeSeries ts = load_series(c.data_path, c.column);
        const SplitSeries parts = split_series(ts, c.split, c.sl + c.fl);
        const BaselineModel model = fit_baseline(parts.train, c.sl, c.fl, c.ridge);
        const WindowSet val = make_windows(parts.val, c.sl, c.fl, c.val_stride);
        const WindowSet test = make_windows(parts.test, c.sl, c.fl, c.test_stride);
        const PredictionSet vp = predict(model, val);
        const PredictionSet tp = predict(model, test);
        write_predictions(out / "val_predictions.csv", vp);
        write_predictions(out / "test_predictions.csv", tp);
        const ErrorVector ve = per_window_mse(vp, val);
        const ErrorVector te = per_window_mse(tp, test);
        std::cout << "validation MSE " << text::format_double(ve.mean) << " (std " << text::format_double(ve.std)
                  << "), test MSE " << text::format_double(te.mean) << " (std " << text::format_double(te.std) << ")\n";
        return 0;
    }
    const PreparedInputs in = prepare_inputs(c);
    std::cout << "validation MSE " << text::format_double(in.val_errors.mean) << " (std "
              << text::format_double(in.val_errors.std) << "), test MSE "
              << text::format_double(in.test_errors.front().mean) << "\n";
    return 0;
}

int cmd_learn(const CommonOptions& o) {
    RunConfig c = build_config(o);
    const fs::path out = require_out(c);
    c.seeds.resize(1);
    c.output_dir.clear();
    const PreparedInputs in = prepare_inputs(c);
    const LearnedShapelets learned = learn_shapelets(c, in);
    for (const auto& w : learned.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    const auto& s = learned.seeds.front();
    save_shapelets(out / "shapelets.json", s.shapelets, s.dictionary.atoms.empty() ? nullptr : &s.dictionary);
    std::cout << "tau = " << text::format_double(learned.threshold.tau) << ", " << learned.high_error_count
              << " high-error samples, K=" << s.chosen.atoms << " q=" << s.chosen.atom_length
              << " lambda=" << text::format_double(s.chosen.lambda) << ", " << s.shapelets.size()
              << " shapelets -> " << (out / "shapelets.json").string() << "\n";
    return 0;
}

int cmd_select(const CommonOptions& o, const std::string& shapelet_path, const std::string& method) {
    RunConfig c = build_config(o);
    const fs::path out = require_out(c);
    const TimeSeries ts = c.synth ? generate_planted(*c.synth).series : load_series(c.data_path, c.column);
    const SplitSeries parts = split_series(ts, c.split, c.sl + c.fl);
    const WindowSet test = make_windows(parts.test, c.sl, c.fl, c.test_stride);
    Selection sel;
    std::vector<double> mins;
    if (method == "random") {
        sel = random_selection(c.dp, test.size(), c.seeds.front());
    } else {
        if (shapelet_path.empty()) {
            throw Error(ErrorKind::ConfigInvalid, "--shapelets is required for shapelet selection");
        }
        const ShapeletSet shapelets = load_shapelets(shapelet_path);
        const DistanceMatrix dm = build_distance_matrix(test, shapelets);
        write_distance_matrix(out / "distances.csv", dm);
        mins = dm.min_distances();
        sel = discard(c.dp, dm);
    }
    write_selection(out / "selection.csv", sel, mins);
    std::cout << sel.dropped.size() << " of " << test.size() << " test windows dropped ("
              << to_string(sel.method) << ")\n";
    if (c.forecaster == ForecasterKind::External && !c.test_predictions.empty()) {
        const auto preds = load_external_predictions(c.test_predictions, test, c.primary_name);
        const auto report = selective_mse(per_window_mse(preds, test), sel);
        std::cout << "selective MSE (zeroed) " << text::format_double(report.mse_zeroed) << ", retained-only "
                  << text::format_double(report.mse_retained) << ", coverage " << text::format_double(report.coverage)
                  << "\n";
    }
    return 0;
}

int cmd_evaluate(const CommonOptions& o) {
    const RunConfig c = build_config(o);
    const RunReport r = run_pipeline(c);
    print_summary(r);
    return 0;
}

int cmd_ablate(const CommonOptions& o, const std::string& axis_name, const std::vector<double>& values) {
    const RunConfig c = build_config(o);
    const AblationAxis axis = parse_ablation_axis(axis_name);
    const auto reports = run_ablation(c, axis, values);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (const auto& s : reports[i].summary) {
            std::cout << to_string(axis) << "=" << text::format_double(values[i]) << " " << s.forecaster
                      << ": shapelet " << text::format_double(s.shapelet_mse) << ", random "
                      << text::format_double(s.random_mse) << ", no-drop " << text::format_double(s.no_drop_mse)
                      << "\n";
        }
        for (const auto& w : reports[i].warnings) {
            std::cerr << "warning (" << to_string(axis) << "=" << text::format_double(values[i]) << "): " << w << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shapelet-guided selective forecasting"};
    app.require_subcommand(1);

    CommonOptions ingest_o, forecast_o, learn_o, select_o, evaluate_o, ablate_o;
    auto* ingest = app.add_subcommand("ingest", "load, split and window a dataset");
    add_common(ingest, ingest_o);
    auto* forecast = app.add_subcommand("forecast", "fit the baseline and write prediction files, or score external ones");
    add_common(forecast, forecast_o);
    auto* learn = app.add_subcommand("learn-shapelets", "learn shapelets from high-error validation windows");
    add_common(learn, learn_o);

    auto* select = app.add_subcommand("select", "drop test windows closest to learned shapelets");
    add_common(select, select_o);
    std::string shapelet_path;
    std::string method = "shapelet";
    select->add_option("--shapelets", shapelet_path, "shapelets.json from learn-shapelets");
    select->add_option("--method", method, "shapelet | random")->check(CLI::IsMember({"shapelet", "random"}));

    auto* evaluate = app.add_subcommand("evaluate", "run the full pipeline from a run-config file");
    add_common(evaluate, evaluate_o);

    auto* ablate = app.add_subcommand("ablate", "re-run the pipeline over delta or dp values");
    add_common(ablate, ablate_o);
    std::string axis;
    std::vector<double> values;
    ablate->add_option("--axis", axis, "delta | dp")->required()->check(CLI::IsMember({"delta", "dp"}));
    ablate->add_option("--values", values, "comma-separated values")->required()->delimiter(',');

    auto* synth = app.add_subcommand("synth", "generate a planted-motif series");
    SynthSpec spec;
    std::size_t motif_length = 32;
    std::string synth_out;
    std::string truth_out;
    synth->add_option("--length", spec.length, "series length");
    synth->add_option("--base", spec.base, "sine | ar1")->check(CLI::IsMember({"sine", "ar1"}));
    synth->add_option("--motif-length", motif_length, "planted motif length");
    synth->add_option("--motif-rate", spec.motif_rate, "fraction of the series covered by motif + burst");
    synth->add_option("--burst-std", spec.burst_std, "burst noise standard deviation");
    synth->add_option("--noise-std", spec.noise_std, "background noise standard deviation");
    synth->add_option("--burst-length", spec.burst_length, "burst length (one forecast horizon)");
    synth->add_option("--seed", spec.seed, "generator seed");
    synth->add_option("--out", synth_out, "series CSV (column 'value')")->required();
    synth->add_option("--truth", truth_out, "ground-truth positions CSV")->required();

    auto* report = app.add_subcommand("report", "results-table arithmetic and run cross-checks");
    std::string table;
    std::string check_dir;
    report->add_option("--table", table, "CSV with dataset,forecaster,no_drop_mse,random_mse,shapelet_mse");
    report->add_option("--check", check_dir, "run directory to cross-check against its per-window files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return cmd_ingest(ingest_o);
        if (*forecast) return cmd_forecast(forecast_o);
        if (*learn) return cmd_learn(learn_o);
        if (*select) return cmd_select(select_o, shapelet_path, method);
        if (*evaluate) return cmd_evaluate(evaluate_o);
        if (*ablate) return cmd_ablate(ablate_o, axis, values);
        if (*synth) {
            spec.motif = default_motif(motif_length);
            const PlantedSeries planted = generate_planted(spec);
            write_planted(synth_out, truth_out, planted);
            std::cout << planted.series.size() << " points, " << planted.motif_starts.size() << " planted motifs\n";
            return 0;
        }
        if (*report) {
            if (table.empty() && check_dir.empty()) {
                std::cerr << "report: pass --table and/or --check\n";
                return 2;
            }
            int status = 0;
            if (!table.empty()) {
                const auto rows = load_result_rows(table);
                std::cout << format_reductions(summarize_reductions(rows));
            }
            if (!check_dir.empty()) {
                const auto problems = cross_check_run(check_dir);
                for (const auto& p : problems) {
                    std::cerr << "mismatch: " << p << "\n";
                }
                std::cout << (problems.empty() ? "cross-check passed\n" : "cross-check FAILED\n");
                status = problems.empty() ? 0 : 1;
            }
            return status;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
