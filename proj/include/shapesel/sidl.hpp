#pragma once

// Shift-invariant dictionary learning. Each sample x_i (length p) is
// approximated by sum_k alpha_ik * T(d_k, t_ik), where T places the length-q
// atom d_k at offset t_ik inside a zero vector of length p. The learner
// minimises
//
//   1/2 sum_i ||x_i - sum_k alpha_ik T(d_k, t_ik)||^2 + lambda sum_i ||alpha_i||_1
//   subject to ||d_k||^2 <= norm_bound
//
// by alternating sparse coding (offset search + iterative soft thresholding)
// with projected gradient steps on the atoms.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace shapesel {

using Samples = std::vector<std::vector<double>>;

struct SidlConfig {
    std::size_t atoms = 8;         // K
    std::size_t atom_length = 32;  // q
    double lambda = 0.1;
    double norm_bound = 1.0;
    std::size_t max_iters = 100;
    std::size_t inner_iters = 200;
    double rel_tol = 1e-5;
    std::uint64_t seed = 0;

    /// Throws ConfigInvalid unless the config is usable on samples of length p.
    void validate(std::size_t sample_length) const;
};

struct Dictionary {
    std::vector<std::vector<double>> atoms;
    SidlConfig config;
    std::vector<double> objective_trace;

    std::size_t size() const noexcept { return atoms.size(); }
    std::size_t atom_length() const noexcept { return atoms.empty() ? 0 : atoms.front().size(); }
};

/// Coefficients and offsets of one sample, one entry per atom.
struct CodeRow {
    std::vector<double> alpha;
    std::vector<std::size_t> offsets;
};

struct SparseCode {
    std::vector<CodeRow> rows;

    std::size_t size() const noexcept { return rows.size(); }
    double alpha(std::size_t i, std::size_t k) const { return rows[i].alpha[k]; }
    std::size_t offset(std::size_t i, std::size_t k) const { return rows[i].offsets[k]; }
};

struct Shapelet {
    std::vector<double> values;
    double score = 0.0;
    std::size_t atom_index = 0;
};

struct ShapeletSet {
    std::vector<Shapelet> shapelets;
    std::size_t top_k = 0;
    double dedup_threshold = 0.0;

    bool empty() const noexcept { return shapelets.empty(); }
    std::size_t size() const noexcept { return shapelets.size(); }
};

std::vector<double> shift_atom(std::span<const double> atom, std::size_t t, std::size_t p);

/// Scales `atom` onto the ball ||d||^2 <= bound when it lies outside.
void project_to_ball(std::span<double> atom, double bound);

std::vector<double> reconstruct(const CodeRow& row, const Dictionary& dict, std::size_t p);

/// Per-atom offset search against the running residual (atoms in index order,
/// best absolute correlation, smallest offset on ties) followed by iterative
/// soft thresholding over the K shifted atoms.
CodeRow sparse_code(std::span<const double> x, const Dictionary& dict, double lambda);

/// Soft-thresholding iterations with the offsets of `init` held fixed,
/// warm-started from its coefficients. Never increases the sample objective.
CodeRow refine_code(std::span<const double> x, const Dictionary& dict, double lambda, const CodeRow& init);

double sample_objective(std::span<const double> x, const Dictionary& dict, const CodeRow& row, double lambda);

double sidl_objective(const Samples& samples, const Dictionary& dict, const SparseCode& codes, double lambda);

/// Gradient of the reconstruction term with respect to every atom, codes fixed.
std::vector<std::vector<double>> dict_gradient(const Samples& samples, const Dictionary& dict,
                                               const SparseCode& codes);

/// One projected gradient step per atom (in index order) on the
/// reconstruction term. `step <= 0` selects the per-atom step 1/sum_i alpha_ik^2.
/// The step is halved until the objective does not increase.
Dictionary dict_update(const Dictionary& dict, const Samples& samples, const SparseCode& codes, double step);

struct LearnResult {
    Dictionary dictionary;
    SparseCode codes;
};

LearnResult learn_dictionary(const Samples& samples, const SidlConfig& config);

/// Scores atoms by sum_i |alpha_ik|, keeps the best `top_k` whose z-normalised
/// distance to every already kept shapelet is at least `dedup_threshold`.
/// Atoms are sign-oriented so that their summed coefficient is non-negative.
ShapeletSet rank_top_k(const Dictionary& dict, const SparseCode& codes, std::size_t top_k,
                       double dedup_threshold);

struct SidlGrid {
    std::vector<std::size_t> atoms;
    std::vector<std::size_t> lengths;
    std::vector<double> lambdas;

    /// K in {4, 8, 16}, q in {sl/16, sl/8, sl/4}, lambda in {0.01, 0.1, 1}.
    static SidlGrid defaults(std::size_t sl);
};

struct GridCell {
    SidlConfig config;
    double heldout_error = 0.0;
};

struct GridSearchResult {
    SidlConfig best;
    std::vector<GridCell> cells;
};

/// k-fold cross-validated held-out reconstruction error per grid point.
/// Ties go to smaller K, then smaller q, then larger lambda.
GridSearchResult grid_search(const Samples& samples, const SidlGrid& grid, const SidlConfig& base,
                             std::size_t folds = 3);

void save_shapelets(const std::filesystem::path& path, const ShapeletSet& shapelets, const Dictionary* dict = nullptr);
ShapeletSet load_shapelets(const std::filesystem::path& path);

}  // namespace shapesel
