#include "shapesel/sidl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "shapesel/distance.hpp"
#include "shapesel/error.hpp"

namespace shapesel {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double soft_threshold(double v, double t) {
    if (v > t) {
        return v - t;
    }
    if (v < -t) {
        return v + t;
    }
    return 0.0;
}

void check_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw Error(ErrorKind::NonFiniteInput, "sample contains a non-finite value");
        }
    }
}

void check_geometry(std::span<const double> x, const Dictionary& dict) {
    if (dict.atoms.empty()) {
        throw Error(ErrorKind::ShapeMismatch, "dictionary has no atoms");
    }
    if (dict.atom_length() > x.size()) {
        throw Error(ErrorKind::ShapeMismatch, "atom length " + std::to_string(dict.atom_length()) +
                                                  " exceeds sample length " + std::to_string(x.size()));
    }
}

void check_row(const CodeRow& row, const Dictionary& dict, std::size_t p) {
    const std::size_t K = dict.size();
    if (row.alpha.size() != K || row.offsets.size() != K) {
        throw Error(ErrorKind::ShapeMismatch, "code row does not have one entry per atom");
    }
    for (std::size_t t : row.offsets) {
        if (t + dict.atom_length() > p) {
            throw Error(ErrorKind::ShapeMismatch, "offset " + std::to_string(t) + " places the atom past the sample end");
        }
    }
}

// Iterative soft thresholding on the Gram form with offsets held fixed.
void ista(std::span<const double> x, const Dictionary& dict, double lambda, CodeRow& row) {
    const std::size_t K = dict.size();
    const std::size_t q = dict.atom_length();

    Eigen::VectorXd b(static_cast<Eigen::Index>(K));
    Eigen::MatrixXd G(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k < K; ++k) {
        b(static_cast<Eigen::Index>(k)) = dot(x.subspan(row.offsets[k], q), dict.atoms[k]);
        for (std::size_t l = k; l < K; ++l) {
            const std::size_t tk = row.offsets[k];
            const std::size_t tl = row.offsets[l];
            const std::size_t lo = std::max(tk, tl);
            const std::size_t hi = std::min(tk, tl) + q;
            double g = 0.0;
            for (std::size_t j = lo; j < hi; ++j) {
                g += dict.atoms[k][j - tk] * dict.atoms[l][j - tl];
            }
            G(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = g;
            G(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = g;
        }
    }

    double L = 0.0;
    if (K == 1) {
        L = G(0, 0);
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
        L = eig.eigenvalues().maxCoeff();
    }
    if (!(L > 0.0)) {
        std::fill(row.alpha.begin(), row.alpha.end(), 0.0);
        return;
    }
    // Slight overestimate keeps each step a guaranteed descent step under rounding.
    L *= 1.0 + 1e-12;

    Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(row.alpha.data(), static_cast<Eigen::Index>(K));
    const double threshold = lambda / L;
    const double tol = dict.config.rel_tol;
    for (std::size_t it = 0; it < dict.config.inner_iters; ++it) {
        const Eigen::VectorXd grad = G * alpha - b;
        double change = 0.0;
        double scale = 1.0;
        for (Eigen::Index k = 0; k < alpha.size(); ++k) {
            const double next = soft_threshold(alpha(k) - grad(k) / L, threshold);
            change = std::max(change, std::abs(next - alpha(k)));
            scale = std::max(scale, std::abs(next));
            alpha(k) = next;
        }
        if (change < tol * scale) {
            break;
        }
    }
    std::copy(alpha.data(), alpha.data() + alpha.size(), row.alpha.begin());
}

Dictionary initial_dictionary(const Samples& samples, const SidlConfig& config) {
    std::mt19937_64 rng(config.seed);
    const std::size_t p = samples.front().size();
    const std::size_t q = config.atom_length;
    std::uniform_int_distribution<std::size_t> pick_sample(0, samples.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_offset(0, p - q);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Dictionary dict;
    dict.config = config;
    dict.atoms.reserve(config.atoms);
    const double radius = std::sqrt(config.norm_bound);
    for (std::size_t k = 0; k < config.atoms; ++k) {
        const auto& x = samples[pick_sample(rng)];
        const std::size_t t = pick_offset(rng);
        std::vector<double> atom(x.begin() + static_cast<std::ptrdiff_t>(t),
                                 x.begin() + static_cast<std::ptrdiff_t>(t + q));
        const double mean = std::accumulate(atom.begin(), atom.end(), 0.0) / static_cast<double>(q);
        for (double& v : atom) {
            v -= mean;
        }
        double norm = std::sqrt(squared_norm(atom));
        if (norm < 1e-12) {
            for (double& v : atom) {
                v = gauss(rng);
            }
            norm = std::sqrt(squared_norm(atom));
        }
        for (double& v : atom) {
            v *= radius / norm;
        }
        dict.atoms.push_back(std::move(atom));
    }
    return dict;
}

void validate_samples(const Samples& samples) {
    if (samples.empty()) {
        throw Error(ErrorKind::EmptySampleSet, "no samples to learn shapelets from");
    }
    const std::size_t p = samples.front().size();
    for (const auto& x : samples) {
        if (x.size() != p) {
            throw Error(ErrorKind::ShapeMismatch, "all samples must share one length");
        }
        check_finite(x);
    }
}

}  // namespace

void SidlConfig::validate(std::size_t sample_length) const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); };
    if (atoms < 1) fail("K must be at least 1");
    if (atom_length < 1) fail("atom length q must be at least 1");
    if (atom_length > sample_length) {
        fail("atom length q = " + std::to_string(atom_length) + " exceeds sample length p = " +
             std::to_string(sample_length));
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be finite and non-negative");
    if (!(norm_bound > 0.0) || !std::isfinite(norm_bound)) fail("norm bound must be positive");
    if (max_iters < 1 || inner_iters < 1) fail("iteration limits must be positive");
    if (!(rel_tol > 0.0)) fail("rel_tol must be positive");
}

std::vector<double> shift_atom(std::span<const double> atom, std::size_t t, std::size_t p) {
    if (atom.size() > p || t > p - atom.size()) {
        throw Error(ErrorKind::OffsetOutOfRange, "offset " + std::to_string(t) + " is outside [0, " +
                                                     std::to_string(p >= atom.size() ? p - atom.size() : 0) + "]");
    }
    std::vector<double> out(p, 0.0);
    std::copy(atom.begin(), atom.end(), out.begin() + static_cast<std::ptrdiff_t>(t));
    return out;
}

void project_to_ball(std::span<double> atom, double bound) {
    const double sq = squared_norm(atom);
    if (sq > bound) {
        const double scale = std::sqrt(bound / sq);
        for (double& v : atom) {
            v *= scale;
        }
    }
}

std::vector<double> reconstruct(const CodeRow& row, const Dictionary& dict, std::size_t p) {
    check_row(row, dict, p);
    std::vector<double> out(p, 0.0);
    const std::size_t q = dict.atom_length();
    for (std::size_t k = 0; k < dict.size(); ++k) {
        const double a = row.alpha[k];
        if (a == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < q; ++j) {
            out[row.offsets[k] + j] += a * dict.atoms[k][j];
        }
    }
    return out;
}

CodeRow sparse_code(std::span<const double> x, const Dictionary& dict, double lambda) {
    check_geometry(x, dict);
    check_finite(x);
    const std::size_t K = dict.size();
    const std::size_t q = dict.atom_length();
    const std::size_t p = x.size();

    CodeRow row{std::vector<double>(K, 0.0), std::vector<std::size_t>(K, 0)};
    std::vector<double> residual(x.begin(), x.end());
    for (std::size_t k = 0; k < K; ++k) {
        const auto& d = dict.atoms[k];
        const double dd = squared_norm(d);
        if (dd <= 0.0) {
            continue;
        }
        std::size_t best_t = 0;
        double best = -1.0;
        for (std::size_t t = 0; t + q <= p; ++t) {
            const double c = std::abs(dot(std::span<const double>(residual).subspan(t, q), d));
            if (c > best) {
                best = c;
                best_t = t;
            }
        }
        const double a = dot(std::span<const double>(residual).subspan(best_t, q), d) / dd;
        for (std::size_t j = 0; j < q; ++j) {
            residual[best_t + j] -= a * d[j];
        }
        row.offsets[k] = best_t;
        row.alpha[k] = a;
    }
    ista(x, dict, lambda, row);
    return row;
}

CodeRow refine_code(std::span<const double> x, const Dictionary& dict, double lambda, const CodeRow& init) {
    check_geometry(x, dict);
    check_finite(x);
    check_row(init, dict, x.size());
    CodeRow row = init;
    ista(x, dict, lambda, row);
    return row;
}

double sample_objective(std::span<const double> x, const Dictionary& dict, const CodeRow& row, double lambda) {
    const auto recon = reconstruct(row, dict, x.size());
    double ss = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double r = x[j] - recon[j];
        ss += r * r;
    }
    double l1 = 0.0;
    for (double a : row.alpha) {
        l1 += std::abs(a);
    }
    return 0.5 * ss + lambda * l1;
}

double sidl_objective(const Samples& samples, const Dictionary& dict, const SparseCode& codes, double lambda) {
    if (codes.size() != samples.size()) {
        throw Error(ErrorKind::ShapeMismatch, "codes have " + std::to_string(codes.size()) + " rows for " +
                                                  std::to_string(samples.size()) + " samples");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (dict.atom_length() > samples[i].size()) {
            throw Error(ErrorKind::ShapeMismatch, "atom longer than sample");
        }
        total += sample_objective(samples[i], dict, codes.rows[i], lambda);
    }
    return total;
}

std::vector<std::vector<double>> dict_gradient(const Samples& samples, const Dictionary& dict,
                                               const SparseCode& codes) {
    if (codes.size() != samples.size()) {
        throw Error(ErrorKind::ShapeMismatch, "codes and samples disagree in count");
    }
    const std::size_t q = dict.atom_length();
    std::vector<std::vector<double>> grad(dict.size(), std::vector<double>(q, 0.0));
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& x = samples[i];
        const auto& row = codes.rows[i];
        const auto recon = reconstruct(row, dict, x.size());
        for (std::size_t k = 0; k < dict.size(); ++k) {
            const double a = row.alpha[k];
            if (a == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < q; ++j) {
                const std::size_t pos = row.offsets[k] + j;
                grad[k][j] -= a * (x[pos] - recon[pos]);
            }
        }
    }
    return grad;
}

Dictionary dict_update(const Dictionary& dict, const Samples& samples, const SparseCode& codes, double step) {
    if (codes.size() != samples.size()) {
        throw Error(ErrorKind::ShapeMismatch, "codes and samples disagree in count");
    }
    Dictionary next = dict;
    const std::size_t q = dict.atom_length();
    const double bound = dict.config.norm_bound;

    std::vector<std::vector<double>> residuals;
    residuals.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        auto r = reconstruct(codes.rows[i], dict, samples[i].size());
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] = samples[i][j] - r[j];
        }
        residuals.push_back(std::move(r));
    }

    std::vector<double> grad(q);
    std::vector<double> candidate(q);
    std::vector<double> delta(q);
    for (std::size_t k = 0; k < next.size(); ++k) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double curvature = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double a = codes.rows[i].alpha[k];
            if (a == 0.0) {
                continue;
            }
            curvature += a * a;
            const std::size_t t = codes.rows[i].offsets[k];
            for (std::size_t j = 0; j < q; ++j) {
                grad[j] -= a * residuals[i][t + j];
            }
        }
        if (curvature == 0.0) {
            continue;
        }
        for (double g : grad) {
            if (!std::isfinite(g)) {
                throw Error(ErrorKind::NonFiniteGradient, "gradient for atom " + std::to_string(k) + " is not finite");
            }
        }

        // The reconstruction term is quadratic in d_k with Hessian
        // curvature * I, so the change for a move delta is exact:
        // <grad, delta> + curvature/2 * ||delta||^2.
        auto& atom = next.atoms[k];
        double s = step > 0.0 ? step : 1.0 / curvature;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            for (std::size_t j = 0; j < q; ++j) {
                candidate[j] = atom[j] - s * grad[j];
            }
            project_to_ball(candidate, bound);
            for (std::size_t j = 0; j < q; ++j) {
                delta[j] = candidate[j] - atom[j];
            }
            const double change = dot(grad, delta) + 0.5 * curvature * squared_norm(delta);
            if (change <= 0.0) {
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            continue;
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double a = codes.rows[i].alpha[k];
            if (a == 0.0) {
                continue;
            }
            const std::size_t t = codes.rows[i].offsets[k];
            for (std::size_t j = 0; j < q; ++j) {
                residuals[i][t + j] -= a * delta[j];
            }
        }
        atom = candidate;
    }
    return next;
}

LearnResult learn_dictionary(const Samples& samples, const SidlConfig& config) {
    validate_samples(samples);
    config.validate(samples.front().size());

    Dictionary dict = initial_dictionary(samples, config);
    SparseCode codes;
    codes.rows.reserve(samples.size());
    double objective = 0.0;
    for (const auto& x : samples) {
        codes.rows.push_back(sparse_code(x, dict, config.lambda));
        objective += sample_objective(x, dict, codes.rows.back(), config.lambda);
    }
    dict.objective_trace.push_back(objective);

    for (std::size_t it = 0; it < config.max_iters; ++it) {
        auto trace = std::move(dict.objective_trace);
        dict = dict_update(dict, samples, codes, 0.0);
        dict.objective_trace = std::move(trace);

        double next_objective = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            // Fresh offsets may land in a worse local optimum than the
            // current ones; keep whichever code is better for this sample.
            CodeRow warm = refine_code(samples[i], dict, config.lambda, codes.rows[i]);
            CodeRow fresh = sparse_code(samples[i], dict, config.lambda);
            const double warm_obj = sample_objective(samples[i], dict, warm, config.lambda);
            const double fresh_obj = sample_objective(samples[i], dict, fresh, config.lambda);
            if (fresh_obj < warm_obj) {
                codes.rows[i] = std::move(fresh);
                next_objective += fresh_obj;
            } else {
                codes.rows[i] = std::move(warm);
                next_objective += warm_obj;
            }
        }
        dict.objective_trace.push_back(next_objective);

        const double denom = std::max(std::abs(objective), std::numeric_limits<double>::min());
        const bool converged = std::abs(objective - next_objective) <= config.rel_tol * denom;
        objective = next_objective;
        if (converged) {
            break;
        }
    }
    return LearnResult{std::move(dict), std::move(codes)};
}

ShapeletSet rank_top_k(const Dictionary& dict, const SparseCode& codes, std::size_t top_k, double dedup_threshold) {
    const std::size_t K = dict.size();
    std::vector<double> score(K, 0.0);
    std::vector<double> signed_sum(K, 0.0);
    for (const auto& row : codes.rows) {
        if (row.alpha.size() != K) {
            throw Error(ErrorKind::ShapeMismatch, "code row does not match dictionary size");
        }
        for (std::size_t k = 0; k < K; ++k) {
            score[k] += std::abs(row.alpha[k]);
            signed_sum[k] += row.alpha[k];
        }
    }
    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

    ShapeletSet out;
    out.top_k = top_k;
    out.dedup_threshold = dedup_threshold;
    for (std::size_t k : order) {
        if (out.shapelets.size() >= top_k || !(score[k] > 0.0)) {
            break;
        }
        std::vector<double> values = dict.atoms[k];
        if (signed_sum[k] < 0.0) {
            for (double& v : values) {
                v = -v;
            }
        }
        bool duplicate = false;
        for (const auto& kept : out.shapelets) {
            if (kept.values.size() == values.size() && znorm_ed(kept.values, values) < dedup_threshold) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            out.shapelets.push_back(Shapelet{std::move(values), score[k], k});
        }
    }
    return out;
}

SidlGrid SidlGrid::defaults(std::size_t sl) {
    SidlGrid g;
    g.atoms = {4, 8, 16};
    for (std::size_t div : {16, 8, 4}) {
        const std::size_t q = std::max<std::size_t>(1, (sl + div / 2) / div);
        if (std::find(g.lengths.begin(), g.lengths.end(), q) == g.lengths.end()) {
            g.lengths.push_back(q);
        }
    }
    g.lambdas = {0.01, 0.1, 1.0};
    return g;
}

namespace {

bool preferred(const SidlConfig& a, const SidlConfig& b) {
    if (a.atoms != b.atoms) return a.atoms < b.atoms;
    if (a.atom_length != b.atom_length) return a.atom_length < b.atom_length;
    return a.lambda > b.lambda;
}

}  // namespace

GridSearchResult grid_search(const Samples& samples, const SidlGrid& grid, const SidlConfig& base, std::size_t folds) {
    if (folds < 2) {
        throw Error(ErrorKind::ConfigInvalid, "cross-validation needs at least 2 folds");
    }
    if (samples.size() < folds) {
        throw Error(ErrorKind::TooFewSamples, std::to_string(samples.size()) + " samples cannot fill " +
                                                  std::to_string(folds) + " folds");
    }
    validate_samples(samples);
    if (grid.atoms.empty() || grid.lengths.empty() || grid.lambdas.empty()) {
        throw Error(ErrorKind::ConfigInvalid, "every grid axis needs at least one value");
    }
    const std::size_t p = samples.front().size();

    std::vector<std::size_t> perm(samples.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(base.seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Samples> train(folds);
    std::vector<Samples> held(folds);
    for (std::size_t j = 0; j < perm.size(); ++j) {
        const std::size_t f = j % folds;
        for (std::size_t g = 0; g < folds; ++g) {
            (g == f ? held[g] : train[g]).push_back(samples[perm[j]]);
        }
    }

    GridSearchResult result;
    bool have_best = false;
    double best_error = 0.0;
    for (std::size_t K : grid.atoms) {
        for (std::size_t q : grid.lengths) {
            if (q > p) {
                continue;
            }
            for (double lambda : grid.lambdas) {
                SidlConfig cfg = base;
                cfg.atoms = K;
                cfg.atom_length = q;
                cfg.lambda = lambda;
                cfg.validate(p);

                double total = 0.0;
                for (std::size_t f = 0; f < folds; ++f) {
                    SidlConfig fold_cfg = cfg;
                    fold_cfg.seed = base.seed + 1 + f;
                    const auto learned = learn_dictionary(train[f], fold_cfg);
                    double fold_err = 0.0;
                    for (const auto& x : held[f]) {
                        const CodeRow row = sparse_code(x, learned.dictionary, lambda);
                        fold_err += sample_objective(x, learned.dictionary, row, 0.0);
                    }
                    total += fold_err / static_cast<double>(held[f].size());
                }
                const double avg = total / static_cast<double>(folds);
                result.cells.push_back(GridCell{cfg, avg});

                const double tie = 1e-12 * std::max(std::abs(avg), std::abs(best_error));
                if (!have_best || avg < best_error - tie ||
                    (std::abs(avg - best_error) <= tie && preferred(cfg, result.best))) {
                    result.best = cfg;
                    best_error = avg;
                    have_best = true;
                }
            }
        }
    }
    if (!have_best) {
        throw Error(ErrorKind::ConfigInvalid, "no grid length fits samples of length " + std::to_string(p));
    }
    return result;
}

}  // namespace shapesel
