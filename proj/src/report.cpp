#include "shapesel/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "shapesel/error.hpp"
#include "shapesel/pipeline.hpp"
#include "shapesel/text.hpp"

namespace shapesel {

namespace {

namespace fs = std::filesystem;
using text::format_double;

constexpr const char* kSummaryHeader =
    "dataset,forecaster,no_drop_mse,random_mse,shapelet_mse,coverage,random_mse_retained,shapelet_mse_retained\n";

std::string summary_line(const std::string& dataset, const SummaryRow& s) {
    return dataset + ',' + s.forecaster + ',' + format_double(s.no_drop_mse) + ',' + format_double(s.random_mse) + ',' +
           format_double(s.shapelet_mse) + ',' + format_double(s.coverage) + ',' +
           format_double(s.random_mse_retained) + ',' + format_double(s.shapelet_mse_retained) + '\n';
}

std::string seed_dir_name(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

std::string errors_file_name(const std::string& forecaster) { return "errors_" + forecaster + ".csv"; }

}  // namespace

void emit_report(const RunReport& report, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorKind::IoError, "cannot create '" + dir.string() + "': " + ec.message());
    }

    std::string summary = kSummaryHeader;
    for (const auto& row : report.summary) {
        summary += summary_line(report.dataset, row);
    }
    text::write_file(dir / "summary.csv", summary);

    std::string per_seed =
        "seed,forecaster,no_drop_mse,random_mse,shapelet_mse,coverage,random_mse_retained,shapelet_mse_retained,"
        "shapelets,atoms,atom_length,lambda\n";
    for (const auto& s : report.seeds) {
        for (const auto& e : s.evals) {
            per_seed += std::to_string(s.seed) + ',' + e.forecaster + ',' + format_double(e.no_drop.mse_zeroed) + ',' +
                        format_double(e.random.mse_zeroed) + ',' + format_double(e.shapelet.mse_zeroed) + ',' +
                        format_double(e.shapelet.coverage) + ',' + format_double(e.random.mse_retained) + ',' +
                        format_double(e.shapelet.mse_retained) + ',' + std::to_string(s.shapelets.size()) + ',' +
                        std::to_string(s.chosen.atoms) + ',' + std::to_string(s.chosen.atom_length) + ',' +
                        format_double(s.chosen.lambda) + '\n';
        }
    }
    text::write_file(dir / "per_seed.csv", per_seed);

    std::string run;
    for (const auto& [k, v] : report.config) {
        run += k + " = " + v + '\n';
    }
    run += "# realised\n";
    run += "# dataset = " + report.dataset + '\n';
    run += "# split_bounds = " + std::to_string(report.bounds.train_end) + ',' + std::to_string(report.bounds.val_end) +
           ',' + std::to_string(report.bounds.total) + '\n';
    run += "# val_windows = " + std::to_string(report.val_windows) + '\n';
    run += "# test_windows = " + std::to_string(report.test_windows) + '\n';
    run += "# val_mean_error = " + format_double(report.threshold.mean_err) + '\n';
    run += "# val_std_error = " + format_double(report.threshold.std_err) + '\n';
    run += "# tau = " + format_double(report.threshold.tau) + '\n';
    run += "# high_error_samples = " + std::to_string(report.high_error_count) + '\n';
    run += "# grid_objective = heldout reconstruction error\n";
    for (const auto& w : report.warnings) {
        run += "# warning: " + w + '\n';
    }
    text::write_file(dir / "run.txt", run);

    for (const auto& s : report.seeds) {
        const fs::path sd = dir / seed_dir_name(s.seed);
        fs::create_directories(sd, ec);
        if (ec) {
            throw Error(ErrorKind::IoError, "cannot create '" + sd.string() + "': " + ec.message());
        }
        save_shapelets(sd / "shapelets.json", s.shapelets, s.dictionary.atoms.empty() ? nullptr : &s.dictionary);

        std::vector<double> mins;
        if (s.distances) {
            mins = s.distances->min_distances();
            write_distance_matrix(sd / "distances.csv", *s.distances);
        }
        write_selection(sd / "selection.csv", s.shapelet_selection, mins);

        std::string grid = "atoms,atom_length,lambda,heldout_error\n";
        for (const auto& c : s.grid) {
            grid += std::to_string(c.config.atoms) + ',' + std::to_string(c.config.atom_length) + ',' +
                    format_double(c.config.lambda) + ',' + format_double(c.heldout_error) + '\n';
        }
        text::write_file(sd / "grid.csv", grid);

        for (std::size_t f = 0; f < s.evals.size(); ++f) {
            const auto& e = s.evals[f];
            std::string out = "window_index,error,shapelet_dropped,shapelet_error,random_dropped,random_error\n";
            for (std::size_t i = 0; i < e.no_drop.per_window.size(); ++i) {
                const double err = e.no_drop.per_window[i].error;
                const bool sd_drop = e.shapelet.per_window[i].dropped;
                const bool rd_drop = e.random.per_window[i].dropped;
                out += std::to_string(i) + ',' + format_double(err) + ',' + (sd_drop ? "1," : "0,") +
                       format_double(sd_drop ? 0.0 : err) + ',' + (rd_drop ? "1," : "0,") +
                       format_double(rd_drop ? 0.0 : err) + '\n';
            }
            text::write_file(sd / errors_file_name(e.forecaster), out);
        }
    }
}

void emit_ablation(const std::vector<RunReport>& reports, AblationAxis axis, const std::vector<double>& values,
                   const fs::path& path) {
    std::string out =
        "axis,value,forecaster,no_drop_mse,random_mse,shapelet_mse,coverage,random_mse_retained,shapelet_mse_retained,"
        "high_error_samples,warnings\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (const auto& s : reports[i].summary) {
            out += std::string(to_string(axis)) + ',' + format_double(values[i]) + ',' + s.forecaster + ',' +
                   format_double(s.no_drop_mse) + ',' + format_double(s.random_mse) + ',' +
                   format_double(s.shapelet_mse) + ',' + format_double(s.coverage) + ',' +
                   format_double(s.random_mse_retained) + ',' + format_double(s.shapelet_mse_retained) + ',' +
                   std::to_string(reports[i].high_error_count) + ',' + std::to_string(reports[i].warnings.size()) +
                   '\n';
        }
    }
    text::write_file(path, out);
}

double reduction_pct(double baseline, double value) {
    if (baseline == 0.0) {
        throw Error(ErrorKind::InvalidArgument, "reduction relative to a zero baseline is undefined");
    }
    return 100.0 * (baseline - value) / baseline;
}

std::vector<ReductionSummary> summarize_reductions(std::span<const ResultRow> rows) {
    std::vector<ReductionSummary> out;
    for (const auto& row : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.forecaster == row.forecaster; });
        if (it == out.end()) {
            out.push_back(ReductionSummary{});
            out.back().forecaster = row.forecaster;
            it = out.end() - 1;
        }
        it->datasets.push_back(row.dataset);
        it->reduction_pct.push_back(reduction_pct(row.no_drop_mse, row.shapelet_mse));
        it->margin_over_random_pct.push_back(reduction_pct(row.random_mse, row.shapelet_mse));
    }
    for (auto& s : out) {
        double sum = 0.0;
        for (double r : s.reduction_pct) {
            sum += r;
        }
        s.mean_reduction_pct = sum / static_cast<double>(s.reduction_pct.size());
        std::size_t best = 0;
        for (std::size_t i = 1; i < s.margin_over_random_pct.size(); ++i) {
            if (s.margin_over_random_pct[i] > s.margin_over_random_pct[best]) {
                best = i;
            }
        }
        s.max_margin_over_random_pct = s.margin_over_random_pct[best];
        s.max_margin_dataset = s.datasets[best];
    }
    return out;
}

std::vector<ResultRow> load_result_rows(const fs::path& path) {
    const std::string contents = text::read_file(path);
    const auto rows = text::lines(contents);
    if (rows.empty()) {
        throw Error(ErrorKind::ParseError, "'" + path.string() + "' is empty", 0);
    }
    const auto header = text::split(rows.front(), ',');
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[std::string(text::trim(header[i]))] = i;
    }
    for (const char* needed : {"dataset", "forecaster", "no_drop_mse", "random_mse", "shapelet_mse"}) {
        if (!col.contains(needed)) {
            throw Error(ErrorKind::ColumnMissing, "'" + path.string() + "' lacks column '" + needed + "'");
        }
    }
    std::vector<ResultRow> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (text::trim(rows[r]).empty()) {
            continue;
        }
        const auto f = text::split(rows[r], ',');
        auto number = [&](const char* name) {
            const std::size_t c = col[name];
            const auto v = c < f.size() ? text::parse_double(f[c]) : std::nullopt;
            if (!v) {
                throw Error(ErrorKind::ParseError, "row " + std::to_string(r - 1) + " column " + name + " is not a number",
                            r - 1);
            }
            return *v;
        };
        auto field = [&](const char* name) {
            const std::size_t c = col[name];
            return c < f.size() ? std::string(text::trim(f[c])) : std::string{};
        };
        out.push_back(ResultRow{field("dataset"), field("forecaster"), number("no_drop_mse"), number("random_mse"),
                                number("shapelet_mse")});
    }
    return out;
}

std::string format_reductions(std::span<const ReductionSummary> summaries) {
    std::ostringstream ss;
    ss.setf(std::ios::fixed);
    ss.precision(2);
    for (const auto& s : summaries) {
        ss << "forecaster " << s.forecaster << '\n';
        for (std::size_t i = 0; i < s.datasets.size(); ++i) {
            ss << "  " << s.datasets[i] << ": reduction " << s.reduction_pct[i] << "%, over random "
               << s.margin_over_random_pct[i] << "%\n";
        }
        ss << "  mean reduction " << s.mean_reduction_pct << "%\n";
        ss << "  best margin over random " << s.max_margin_over_random_pct << "% (" << s.max_margin_dataset << ")\n";
    }
    return ss.str();
}

namespace {

struct Recomputed {
    double no_drop = 0.0;
    double shapelet = 0.0;
    double random = 0.0;
};

// Mean error, and zeroed-convention MSE for each selection, from one
// per-window error file.
Recomputed recompute_errors_file(const fs::path& path) {
    const std::string contents = text::read_file(path);
    const auto rows = text::lines(contents);
    double n = 0.0;
    double all = 0.0, shapelet = 0.0, random = 0.0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (text::trim(rows[r]).empty()) {
            continue;
        }
        const auto f = text::split(rows[r], ',');
        const auto err = f.size() >= 6 ? text::parse_double(f[1]) : std::nullopt;
        if (!err) {
            throw Error(ErrorKind::ParseError, "'" + path.string() + "' row " + std::to_string(r - 1) + " is malformed",
                        r - 1);
        }
        n += 1.0;
        all += *err;
        if (text::trim(f[2]) == "0") shapelet += *err;
        if (text::trim(f[4]) == "0") random += *err;
    }
    if (n == 0.0) {
        throw Error(ErrorKind::ParseError, "'" + path.string() + "' has no rows", 0);
    }
    return {all / n, shapelet / n, random / n};
}

}  // namespace

std::vector<std::string> cross_check_run(const fs::path& dir, double rel_tol) {
    std::vector<std::string> problems;
    const auto summary = load_result_rows(dir / "summary.csv");

    std::vector<fs::path> seed_dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && entry.path().filename().string().rfind("seed_", 0) == 0) {
            seed_dirs.push_back(entry.path());
        }
    }
    std::sort(seed_dirs.begin(), seed_dirs.end());
    if (seed_dirs.empty()) {
        problems.push_back("no seed_* directories under " + dir.string());
        return problems;
    }

    auto close = [&](double a, double b) {
        return std::abs(a - b) <= rel_tol * std::max({std::abs(a), std::abs(b), 1e-300});
    };
    for (const auto& row : summary) {
        Recomputed avg;
        for (const auto& sd : seed_dirs) {
            const Recomputed r = recompute_errors_file(sd / errors_file_name(row.forecaster));
            avg.no_drop += r.no_drop;
            avg.shapelet += r.shapelet;
            avg.random += r.random;
        }
        const double k = static_cast<double>(seed_dirs.size());
        const std::pair<const char*, std::pair<double, double>> checks[] = {
            {"no_drop_mse", {avg.no_drop / k, row.no_drop_mse}},
            {"random_mse", {avg.random / k, row.random_mse}},
            {"shapelet_mse", {avg.shapelet / k, row.shapelet_mse}},
        };
        for (const auto& [name, values] : checks) {
            if (!close(values.first, values.second)) {
                problems.push_back(row.dataset + "/" + row.forecaster + " " + name + ": summary " +
                                   format_double(values.second) + " vs recomputed " + format_double(values.first));
            }
        }
    }
    return problems;
}

}  // namespace shapesel
