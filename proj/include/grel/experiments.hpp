#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "grel/core.hpp"
#include "grel/datagen.hpp"
#include "grel/pairwise_kernels.hpp"
#include "grel/rng.hpp"

// Experiment drivers: edge sampling, hyperparameter grid search, the four
// benchmark protocols, and significance testing. Every run is a pure function
// of (seed, config); repetition i uses derive_seed(master, i), so repetitions
// are independent and the set of results does not depend on execution order.

namespace grel {

struct GridSpec {
  std::vector<double> lambdas;
  std::vector<double> gammas;

  // 2^lo ... 2^hi inclusive, ascending.
  static std::vector<double> powers_of_two(int lo, int hi);
};

struct ExperimentResult {
  std::string method;
  std::vector<double> mses;  // one entry per repetition
  double mean_mse = 0.0;     // arithmetic mean of `mses`
};

// q distinct ordered pairs over nodes {0..n_nodes-1}, uniformly without
// replacement; self-pairs excluded by default. Throws if q exceeds the
// number of available pairs.
std::vector<Edge> sample_edges(int n_nodes, int q, std::uint64_t seed,
                               bool exclude_self = true);
std::vector<Edge> sample_edges(int n_nodes, int q, Rng& rng,
                               bool exclude_self = true);

struct GridChoice {
  double lambda = 0.0;
  double gamma = 0.0;
  double val_mse = 0.0;
};

// Fits closed-form RLS at every (lambda, gamma) grid point on `train` and
// returns the pair minimizing validation MSE on `val`. Ties break toward
// larger lambda, then larger gamma (stronger regularization first). With
// center_labels, the training-label mean is subtracted before solving and
// added back to predictions (the experiment protocols regress centered
// labels; see the module notes in experiments.cpp).
GridChoice grid_search(const EdgeDataset& train, const EdgeDataset& val,
                       const GridSpec& grid, const EdgeKernelConfig& cfg_template,
                       bool center_labels = false);

// Method-name strings accepted by the drivers: "mpred" plus the pairwise
// kernel names ("kron", "kron_sym", "kron_rec", "cartesian", "cartesian_sym",
// "mlpk", "rank_rec", "rank_sym").

// Partially observed graph: per repetition, 100 noisy bitset nodes; 1500
// ordered non-self pairs sampled without replacement and split into
// 500/500/500 train/validation/test (disjoint as ordered pairs); labels from
// the similarity member; grid search over lambda, gamma in 2^-20..2^1.
std::vector<ExperimentResult> run_partial_graph_experiment(
    const SimilarityParams& member,
    const std::vector<std::string>& methods = {"mpred", "kron", "kron_sym",
                                               "mlpk", "cartesian",
                                               "cartesian_sym"},
    int reps = 100, std::uint64_t seed = 0, int threads = 1);

// Generalization to new nodes: three disjoint 100-node sets with 500 edges
// sampled within each. Cartesian kernels are rejected (they cannot reach
// edges between unseen nodes).
std::vector<ExperimentResult> run_new_nodes_experiment(
    const SimilarityParams& member,
    const std::vector<std::string>& methods = {"mpred", "kron", "kron_sym",
                                               "mlpk"},
    int reps = 100, std::uint64_t seed = 0, int threads = 1);

// Species competition: 400 species (9 uniform limiting factors, matching the
// reference tournament's label variance; see README) split 200/100/100;
// 1200/600/600 unordered species pairs, unique across the whole run, in
// random orientation; labels are dominance probabilities; grids lambda in
// 2^-20..2^4, gamma in 2^-10..2^1.
std::vector<ExperimentResult> run_species_experiment(
    const std::vector<std::string>& methods = {"mpred", "kron", "kron_rec",
                                               "mlpk"},
    int reps = 100, std::uint64_t seed = 0, int threads = 1);

// Document similarity: disjoint train/validation/test node sets (equal
// thirds of the corpus); for each training-edge count q in `sizes`, fit kron
// and kron_sym by conjugate gradient with early stopping (linear node
// kernel, patience 10) and evaluate on all non-self test pairs.
struct SizeCurve {
  std::string method;
  std::vector<int> sizes;
  std::vector<double> mses;  // one entry per size
};

std::vector<SizeCurve> run_document_experiment(
    const BowCorpus& corpus, const std::vector<int>& sizes,
    std::uint64_t seed = 0,
    const std::vector<std::string>& methods = {"mpred", "kron", "kron_sym"});

// Paired two-sided Wilcoxon signed-rank test. Zero differences are dropped;
// tied absolute differences get average ranks. Exact distribution (all 2^n
// sign assignments) for n <= 15 effective differences, normal approximation
// with continuity and tie correction above. Throws if fewer than min_n pairs
// are supplied or all differences are zero.
double wilcoxon_signed_rank(const std::vector<double>& a,
                            const std::vector<double>& b, int min_n = 5);

// decision_i = (p_i < alpha / m) with m = pvals.size().
std::vector<bool> bonferroni(const std::vector<double>& pvals,
                             double alpha = 0.05);

// One row per repetition per method ("method<TAB>rep<TAB>mse"), then a
// summary block with per-method means. Floats at 17 significant digits.
// `metadata` lines are written first as "# key value" comments.
void write_results_file(const std::string& path,
                        const std::vector<ExperimentResult>& results,
                        const std::vector<std::string>& metadata);
void write_curves_file(const std::string& path,
                       const std::vector<SizeCurve>& curves,
                       const std::vector<std::string>& metadata);

}  // namespace grel
