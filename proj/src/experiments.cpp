#include "grel/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "grel/node_kernels.hpp"
#include "grel/rls.hpp"

// Protocol notes shared by the table experiments:
//
//  * Labels are centered: the training-label mean is subtracted before the
//    RLS solve and added back to predictions. Most pairwise kernels cannot
//    represent the constant relation (kron_rec is antisymmetric; mlpk and the
//    rank kernels vanish on self-pairs), so regressing raw [0,1] labels
//    leaves every method fighting the offset instead of the structure.
//    Centering affects neither the mean predictor nor the symmetry /
//    antisymmetry structure of the learned part.
//
//  * Hyperparameter sweeps share one edge Gram per (gamma, kernel) and solve
//    (K + q*lambda*I) a = y per lambda by Cholesky. grid_search() below is
//    the reference implementation of the same selection rule; the drivers
//    inline it to reuse Gram matrices across the lambda grid.
//
//  * Repetition i draws everything from Rng(derive_seed(master, i)), so
//    repetitions are independent and may run in any order or in parallel.

namespace grel {

std::vector<double> GridSpec::powers_of_two(int lo, int hi) {
  if (lo > hi) throw std::invalid_argument("powers_of_two: empty range");
  std::vector<double> out;
  for (int e = lo; e <= hi; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

// ---------------------------------------------------------------------------
// Edge sampling
// ---------------------------------------------------------------------------

std::vector<Edge> sample_edges(int n_nodes, int q, Rng& rng, bool exclude_self) {
  if (n_nodes < 0) throw std::invalid_argument("sample_edges: negative node count");
  const std::int64_t n = n_nodes;
  const std::int64_t total = exclude_self ? n * (n - 1) : n * n;
  if (q < 0 || q > total) {
    throw std::invalid_argument("sample_edges: q exceeds the number of pairs");
  }
  // Enumerate ordered pairs (row-major, self-pairs skipped) and take a
  // partial Fisher-Yates sample.
  std::vector<std::size_t> picks =
      rng.sample_without_replacement(static_cast<std::size_t>(total),
                                     static_cast<std::size_t>(q));
  std::vector<Edge> edges;
  edges.reserve(q);
  for (std::size_t code : picks) {
    int i, j;
    if (exclude_self) {
      i = static_cast<int>(code / (n - 1));
      int r = static_cast<int>(code % (n - 1));
      j = r + (r >= i ? 1 : 0);
    } else {
      i = static_cast<int>(code / n);
      j = static_cast<int>(code % n);
    }
    edges.push_back({i, j});
  }
  return edges;
}

std::vector<Edge> sample_edges(int n_nodes, int q, std::uint64_t seed,
                               bool exclude_self) {
  Rng rng(seed);
  return sample_edges(n_nodes, q, rng, exclude_self);
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

namespace {

// Tie-break: better validation MSE wins; on ties prefer larger lambda, then
// larger gamma (stronger regularization first).
struct GridBest {
  double vm = std::numeric_limits<double>::infinity();
  double lambda = 0.0;
  double gamma = 0.0;

  void offer(double v, double l, double g) {
    if (v < vm || (v == vm && (l > lambda || (l == lambda && g > gamma)))) {
      vm = v;
      lambda = l;
      gamma = g;
    }
  }
};

Eigen::VectorXd solve_ridge(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                            double lambda) {
  Eigen::MatrixXd A = K;
  A.diagonal().array() += static_cast<double>(K.rows()) * lambda;
  return Eigen::LLT<Eigen::MatrixXd>(A).solve(y);
}

}  // namespace

GridChoice grid_search(const EdgeDataset& train, const EdgeDataset& val,
                       const GridSpec& grid, const EdgeKernelConfig& cfg_template,
                       bool center_labels) {
  if (grid.lambdas.empty()) throw std::invalid_argument("grid_search: empty grid");
  const bool rbf = cfg_template.node.kind == NodeKernelKind::gaussian_rbf;
  if (rbf && grid.gammas.empty()) {
    throw std::invalid_argument("grid_search: RBF kernel needs a gamma grid");
  }
  const std::vector<double> gammas = rbf ? grid.gammas
                                         : std::vector<double>{cfg_template.node.gamma};
  Eigen::VectorXd ytr = train.labels();
  Eigen::VectorXd yva = val.labels();
  const double mu = center_labels ? ytr.mean() : 0.0;
  Eigen::VectorXd ytc = ytr.array() - mu;
  std::vector<Edge> Etr = train.edge_list();
  std::vector<Edge> Eva = val.edge_list();

  GridBest best;
  for (double gamma : gammas) {
    EdgeKernelConfig cfg = cfg_template;
    cfg.node.gamma = gamma;
    Eigen::MatrixXd K = edge_gram(*train.nodes, Etr, Etr, cfg);
    Eigen::MatrixXd Kv = edge_gram(*val.nodes, Eva, *train.nodes, Etr, cfg);
    for (double lambda : grid.lambdas) {
      Eigen::VectorXd a = solve_ridge(K, ytc, lambda);
      Eigen::VectorXd pred = (Kv * a).array() + mu;
      best.offer(mse(pred, yva), lambda, gamma);
    }
  }
  return {best.lambda, best.gamma, best.vm};
}

// ---------------------------------------------------------------------------
// Shared driver machinery
// ---------------------------------------------------------------------------

namespace {

// One split of a repetition: edges index into their universe's node list.
// Universes may coincide (partially observed graph) or be disjoint (new
// nodes, species).
struct SplitData {
  const std::vector<Node>* train_nodes = nullptr;
  const std::vector<Node>* val_nodes = nullptr;
  const std::vector<Node>* test_nodes = nullptr;
  std::vector<Edge> Etr, Eva, Ete;
  Eigen::VectorXd ytr, yva, yte;
};

// id_match for Gram-level Cartesian evaluation: indices are comparable only
// when both edge sets live in the same node list.
std::function<bool(int, int)> id_match_for(const std::vector<Node>* a,
                                           const std::vector<Node>* b) {
  if (a == b) return [](int i, int j) { return i == j; };
  // Disjoint universes in every experiment protocol.
  return [](int, int) { return false; };
}

// Grid-searched closed-form evaluation of one kernel method on one split:
// selects (lambda, gamma) on the validation edges, refits on the training
// edges only, and returns the test MSE. Labels are centered.
double eval_kernel_method(const SplitData& d, PairwiseKernelKind kind,
                          const GridSpec& grid, NodeKernelKind node_kind) {
  const double mu = d.ytr.mean();
  Eigen::VectorXd ytc = d.ytr.array() - mu;

  GridBest best;
  for (double gamma : grid.gammas) {
    NodeKernelConfig ncfg{node_kind, gamma};
    Eigen::MatrixXd G_tt = gram_matrix(*d.train_nodes, *d.train_nodes, ncfg);
    Eigen::MatrixXd G_vt = gram_matrix(*d.val_nodes, *d.train_nodes, ncfg);
    Eigen::MatrixXd K = edge_gram_from_node_gram(
        G_tt, d.Etr, d.Etr, kind, id_match_for(d.train_nodes, d.train_nodes));
    Eigen::MatrixXd Kv = edge_gram_from_node_gram(
        G_vt, d.Eva, d.Etr, kind, id_match_for(d.val_nodes, d.train_nodes));
    for (double lambda : grid.lambdas) {
      Eigen::VectorXd a = solve_ridge(K, ytc, lambda);
      Eigen::VectorXd pred = (Kv * a).array() + mu;
      best.offer(mse(pred, d.yva), lambda, gamma);
    }
  }

  NodeKernelConfig ncfg{node_kind, best.gamma};
  Eigen::MatrixXd G_tt = gram_matrix(*d.train_nodes, *d.train_nodes, ncfg);
  Eigen::MatrixXd G_st = gram_matrix(*d.test_nodes, *d.train_nodes, ncfg);
  Eigen::MatrixXd K = edge_gram_from_node_gram(
      G_tt, d.Etr, d.Etr, kind, id_match_for(d.train_nodes, d.train_nodes));
  Eigen::MatrixXd Kt = edge_gram_from_node_gram(
      G_st, d.Ete, d.Etr, kind, id_match_for(d.test_nodes, d.train_nodes));
  Eigen::VectorXd a = fit_closed_form(K, ytc, best.lambda);
  Eigen::VectorXd pred = (Kt * a).array() + mu;
  return mse(pred, d.yte);
}

double eval_method(const SplitData& d, const std::string& method,
                   const GridSpec& grid, NodeKernelKind node_kind) {
  if (method == "mpred") {
    Eigen::VectorXd pred =
        Eigen::VectorXd::Constant(d.yte.size(), mean_predictor(d.ytr));
    return mse(pred, d.yte);
  }
  return eval_kernel_method(d, pairwise_kind_from_string(method), grid, node_kind);
}

void reject_cartesian(const std::vector<std::string>& methods, const char* where) {
  for (const auto& m : methods) {
    if (m == "cartesian" || m == "cartesian_sym") {
      throw std::invalid_argument(std::string(where) +
                                  ": Cartesian kernels cannot generalize to "
                                  "edges between unseen nodes");
    }
  }
}

std::vector<ExperimentResult> collect(const std::vector<std::string>& methods,
                                      const std::vector<std::vector<double>>& per_rep) {
  std::vector<ExperimentResult> out;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    ExperimentResult r;
    r.method = methods[m];
    r.mses.reserve(per_rep.size());
    double sum = 0.0;
    for (const auto& rep : per_rep) {
      r.mses.push_back(rep[m]);
      sum += rep[m];
    }
    r.mean_mse = sum / static_cast<double>(per_rep.size());
    out.push_back(std::move(r));
  }
  return out;
}

// Runs fn(rep) for rep in [0, reps) on `threads` workers. Each repetition
// owns its output slot, so the result is identical for any thread count.
void parallel_reps(int reps, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, reps));
  if (threads == 1) {
    for (int rep = 0; rep < reps; ++rep) fn(rep);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        int rep = next.fetch_add(1);
        if (rep >= reps) return;
        try {
          fn(rep);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Similarity labels are computed from the clean features; the 10% feature
// flips are applied afterwards, so the learner sees noisy inputs of a clean
// relation.
Eigen::VectorXd similarity_labels(const std::vector<Node>& clean,
                                  const std::vector<Edge>& edges,
                                  const SimilarityParams& member) {
  Eigen::VectorXd y(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    y[i] = set_similarity(clean[edges[i].first].features,
                          clean[edges[i].second].features, member);
  }
  return y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Partially observed graph (shared node set)
// ---------------------------------------------------------------------------

std::vector<ExperimentResult> run_partial_graph_experiment(
    const SimilarityParams& member, const std::vector<std::string>& methods,
    int reps, std::uint64_t seed, int threads) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  GridSpec grid{GridSpec::powers_of_two(-20, 1), GridSpec::powers_of_two(-20, 1)};
  std::vector<std::vector<double>> per_rep(reps,
                                           std::vector<double>(methods.size()));

  parallel_reps(reps, threads, [&](int rep) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    std::vector<Node> clean = gen_bernoulli_nodes(100, 20, 0.5, rng.next_u64());
    std::vector<Node> noisy = flip_noise(clean, 0.1, rng.next_u64());

    // 1500 ordered non-self pairs without replacement, split 500/500/500:
    // train/validation/test are disjoint as ordered pairs.
    std::vector<Edge> all = sample_edges(100, 1500, rng);
    SplitData d;
    d.train_nodes = d.val_nodes = d.test_nodes = &noisy;
    d.Etr.assign(all.begin(), all.begin() + 500);
    d.Eva.assign(all.begin() + 500, all.begin() + 1000);
    d.Ete.assign(all.begin() + 1000, all.end());
    d.ytr = similarity_labels(clean, d.Etr, member);
    d.yva = similarity_labels(clean, d.Eva, member);
    d.yte = similarity_labels(clean, d.Ete, member);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      per_rep[rep][m] =
          eval_method(d, methods[m], grid, NodeKernelKind::gaussian_rbf);
    }
  });
  return collect(methods, per_rep);
}

// ---------------------------------------------------------------------------
// New nodes (three disjoint node sets)
// ---------------------------------------------------------------------------

std::vector<ExperimentResult> run_new_nodes_experiment(
    const SimilarityParams& member, const std::vector<std::string>& methods,
    int reps, std::uint64_t seed, int threads) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  reject_cartesian(methods, "run_new_nodes_experiment");
  GridSpec grid{GridSpec::powers_of_two(-20, 1), GridSpec::powers_of_two(-20, 1)};
  std::vector<std::vector<double>> per_rep(reps,
                                           std::vector<double>(methods.size()));

  parallel_reps(reps, threads, [&](int rep) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    std::vector<Node> clean = gen_bernoulli_nodes(300, 20, 0.5, rng.next_u64());
    std::vector<Node> noisy = flip_noise(clean, 0.1, rng.next_u64());
    std::vector<Node> clean_split[3], noisy_split[3];
    for (int s = 0; s < 3; ++s) {
      clean_split[s].assign(clean.begin() + 100 * s, clean.begin() + 100 * (s + 1));
      noisy_split[s].assign(noisy.begin() + 100 * s, noisy.begin() + 100 * (s + 1));
    }

    SplitData d;
    d.train_nodes = &noisy_split[0];
    d.val_nodes = &noisy_split[1];
    d.test_nodes = &noisy_split[2];
    d.Etr = sample_edges(100, 500, rng);
    d.Eva = sample_edges(100, 500, rng);
    d.Ete = sample_edges(100, 500, rng);
    d.ytr = similarity_labels(clean_split[0], d.Etr, member);
    d.yva = similarity_labels(clean_split[1], d.Eva, member);
    d.yte = similarity_labels(clean_split[2], d.Ete, member);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      per_rep[rep][m] =
          eval_method(d, methods[m], grid, NodeKernelKind::gaussian_rbf);
    }
  });
  return collect(methods, per_rep);
}

// ---------------------------------------------------------------------------
// Species competition
// ---------------------------------------------------------------------------

namespace {

// Unordered species pairs within one split, sampled without replacement and
// given a random orientation. Disjoint splits guarantee that no combination
// of species appears more than once anywhere in the run.
std::vector<Edge> sample_unordered_pairs(int n_nodes, int q, Rng& rng) {
  const std::int64_t total = static_cast<std::int64_t>(n_nodes) * (n_nodes - 1) / 2;
  if (q > total) {
    throw std::invalid_argument("sample_unordered_pairs: q exceeds pair count");
  }
  std::vector<std::size_t> picks =
      rng.sample_without_replacement(static_cast<std::size_t>(total),
                                     static_cast<std::size_t>(q));
  std::vector<Edge> edges;
  edges.reserve(q);
  for (std::size_t code : picks) {
    // Decode the row-major upper triangle (i < j).
    std::int64_t c = static_cast<std::int64_t>(code);
    int i = 0;
    std::int64_t row = n_nodes - 1;
    while (c >= row) {
      c -= row;
      --row;
      ++i;
    }
    int j = i + 1 + static_cast<int>(c);
    if (rng.bernoulli(0.5)) edges.push_back({i, j});
    else edges.push_back({j, i});
  }
  return edges;
}

std::vector<Node> species_nodes(const SpeciesPool& pool, int begin, int count,
                                const char* prefix) {
  std::vector<Node> nodes;
  nodes.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd row = pool.factors.row(begin + i).transpose();
    std::vector<double> values(row.data(), row.data() + row.size());
    nodes.push_back({std::string(prefix) + std::to_string(begin + i),
                     FeatureVector::dense(std::move(values))});
  }
  return nodes;
}

Eigen::VectorXd dominance_labels(const SpeciesPool& pool, int begin,
                                 const std::vector<Edge>& edges) {
  Eigen::VectorXd y(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    y[i] = dominance_prob(pool.factors.row(begin + edges[i].first).transpose(),
                          pool.factors.row(begin + edges[i].second).transpose());
  }
  return y;
}

}  // namespace

std::vector<ExperimentResult> run_species_experiment(
    const std::vector<std::string>& methods, int reps, std::uint64_t seed,
    int threads) {
  if (reps < 1) throw std::invalid_argument("reps must be >= 1");
  reject_cartesian(methods, "run_species_experiment");
  GridSpec grid{GridSpec::powers_of_two(-20, 4), GridSpec::powers_of_two(-10, 1)};
  std::vector<std::vector<double>> per_rep(reps,
                                           std::vector<double>(methods.size()));

  parallel_reps(reps, threads, [&](int rep) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
    // 9 limiting factors reproduce the reference tournament: its baseline
    // (mean-predictor) MSE of ~0.0280 matches the 9-factor label variance
    // 1/36, not the 1/40 of a 10-factor pool. See README, species benchmark.
    SpeciesPool pool = gen_species(400, 9, rng.next_u64());
    // Species 0..199 train, 200..299 validation, 300..399 test.
    std::vector<Node> tr = species_nodes(pool, 0, 200, "s");
    std::vector<Node> va = species_nodes(pool, 200, 100, "s");
    std::vector<Node> te = species_nodes(pool, 300, 100, "s");

    SplitData d;
    d.train_nodes = &tr;
    d.val_nodes = &va;
    d.test_nodes = &te;
    d.Etr = sample_unordered_pairs(200, 1200, rng);
    d.Eva = sample_unordered_pairs(100, 600, rng);
    d.Ete = sample_unordered_pairs(100, 600, rng);
    d.ytr = dominance_labels(pool, 0, d.Etr);
    d.yva = dominance_labels(pool, 200, d.Eva);
    d.yte = dominance_labels(pool, 300, d.Ete);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      per_rep[rep][m] =
          eval_method(d, methods[m], grid, NodeKernelKind::gaussian_rbf);
    }
  });
  return collect(methods, per_rep);
}

// ---------------------------------------------------------------------------
// Document similarity (conjugate gradient with early stopping)
// ---------------------------------------------------------------------------

std::vector<SizeCurve> run_document_experiment(
    const BowCorpus& corpus, const std::vector<int>& sizes, std::uint64_t seed,
    const std::vector<std::string>& methods) {
  if (sizes.empty()) throw std::invalid_argument("run_document_experiment: no sizes");
  reject_cartesian(methods, "run_document_experiment");
  const int n = static_cast<int>(corpus.docs.size());
  if (n < 6) throw std::invalid_argument("run_document_experiment: corpus too small");

  Rng rng(seed);
  // Shuffle documents, then split into three disjoint node sets.
  std::vector<std::size_t> perm = rng.sample_without_replacement(n, n);
  const int third = n / 3;
  std::vector<Node> tr, va, te;
  for (int i = 0; i < third; ++i) tr.push_back(corpus.docs[perm[i]]);
  for (int i = third; i < 2 * third; ++i) va.push_back(corpus.docs[perm[i]]);
  for (int i = 2 * third; i < 3 * third; ++i) te.push_back(corpus.docs[perm[i]]);

  const NodeKernelConfig ncfg{NodeKernelKind::linear, 1.0};
  Eigen::MatrixXd G_tt = gram_matrix(tr, tr, ncfg);
  Eigen::MatrixXd G_vt = gram_matrix(va, tr, ncfg);
  Eigen::MatrixXd G_st = gram_matrix(te, tr, ncfg);

  // All non-self ordered test pairs.
  std::vector<Edge> Ete;
  for (int i = 0; i < third; ++i) {
    for (int j = 0; j < third; ++j) {
      if (i != j) Ete.push_back({i, j});
    }
  }
  auto labels_of = [](const std::vector<Node>& nodes, const std::vector<Edge>& edges) {
    Eigen::VectorXd y(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      y[i] = common_words_label(nodes[edges[i].first], nodes[edges[i].second]);
    }
    return y;
  };
  Eigen::VectorXd yte = labels_of(te, Ete);

  // The validation edge count is held at the largest grid size for every
  // training size: early stopping at small q is then judged on the same
  // low-variance validation signal as at large q.
  const int q_val = *std::max_element(sizes.begin(), sizes.end());

  std::vector<SizeCurve> curves(methods.size());
  for (std::size_t m = 0; m < methods.size(); ++m) {
    curves[m].method = methods[m];
    curves[m].sizes = sizes;
    curves[m].mses.resize(sizes.size());
  }

  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const int q = sizes[si];
    std::vector<Edge> Etr = sample_edges(third, q, rng);
    std::vector<Edge> Eva = sample_edges(third, q_val, rng);
    Eigen::VectorXd ytr = labels_of(tr, Etr);
    Eigen::VectorXd yva = labels_of(va, Eva);

    for (std::size_t m = 0; m < methods.size(); ++m) {
      if (methods[m] == "mpred") {
        Eigen::VectorXd pred =
            Eigen::VectorXd::Constant(yte.size(), mean_predictor(ytr));
        curves[m].mses[si] = mse(pred, yte);
        continue;
      }
      PairwiseKernelKind kind = pairwise_kind_from_string(methods[m]);
      Eigen::MatrixXd K = edge_gram_from_node_gram(G_tt, Etr, Etr, kind, nullptr);
      Eigen::MatrixXd Kv = edge_gram_from_node_gram(G_vt, Eva, Etr, kind, nullptr);
      Eigen::MatrixXd Kt = edge_gram_from_node_gram(G_st, Ete, Etr, kind, nullptr);
      CgFit fit = fit_cg_early_stopping(K, ytr, Kv, yva);
      curves[m].mses[si] = mse(Kt * fit.a, yte);
    }
  }
  return curves;
}

// ---------------------------------------------------------------------------
// Significance testing
// ---------------------------------------------------------------------------

double wilcoxon_signed_rank(const std::vector<double>& a,
                            const std::vector<double>& b, int min_n) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("wilcoxon_signed_rank: length mismatch");
  }
  if (static_cast<int>(a.size()) < min_n) {
    throw std::invalid_argument("wilcoxon_signed_rank: too few pairs");
  }
  // Drop zero differences.
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  const int n = static_cast<int>(diffs.size());
  if (n == 0) {
    throw std::invalid_argument("wilcoxon_signed_rank: all differences are zero");
  }

  // Rank |d| ascending with average ranks for ties.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) {
    return std::abs(diffs[x]) < std::abs(diffs[y]);
  });
  std::vector<double> rank(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n &&
           std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) {
      ++j;
    }
    double avg = 0.5 * (i + j) + 1.0;  // ranks are 1-based
    for (int k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }

  double w_plus = 0.0;
  double rank_sum = 0.0;
  double sq_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    if (diffs[k] > 0.0) w_plus += rank[k];
    rank_sum += rank[k];
    sq_sum += rank[k] * rank[k];
  }
  const double mean = rank_sum / 2.0;  // W+ is symmetric about this under H0

  if (n <= 15) {
    // Exact: enumerate all 2^n sign assignments; two-sided p-value is the
    // probability of a statistic at least as far from the mean as observed.
    const double obs_dev = std::abs(w_plus - mean);
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t extreme = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double w = 0.0;
      for (int k = 0; k < n; ++k) {
        if (mask & (std::uint64_t{1} << k)) w += rank[k];
      }
      // Tolerance guards the float comparison of tied average ranks.
      if (std::abs(w - mean) >= obs_dev - 1e-12) ++extreme;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
  }

  // Normal approximation with continuity correction; the variance term
  // sum(rank^2)/4 absorbs tied ranks.
  const double sd = std::sqrt(sq_sum / 4.0);
  double dev = std::abs(w_plus - mean);
  double z = (dev - 0.5) / sd;
  if (z < 0.0) z = 0.0;
  return std::erfc(z / std::sqrt(2.0));
}

std::vector<bool> bonferroni(const std::vector<double>& pvals, double alpha) {
  if (pvals.empty()) throw std::invalid_argument("bonferroni: no p-values");
  const double threshold = alpha / static_cast<double>(pvals.size());
  std::vector<bool> out;
  out.reserve(pvals.size());
  for (double p : pvals) out.push_back(p < threshold);
  return out;
}

// ---------------------------------------------------------------------------
// Result files
// ---------------------------------------------------------------------------

void write_results_file(const std::string& path,
                        const std::vector<ExperimentResult>& results,
                        const std::vector<std::string>& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  for (const auto& line : metadata) out << "# " << line << '\n';
  out << "method\trep\tmse\n";
  for (const auto& r : results) {
    for (std::size_t i = 0; i < r.mses.size(); ++i) {
      out << r.method << '\t' << i << '\t' << r.mses[i] << '\n';
    }
  }
  out << "\nsummary\n";
  for (const auto& r : results) {
    out << r.method << "\tmean\t" << r.mean_mse << '\n';
  }
}

void write_curves_file(const std::string& path,
                       const std::vector<SizeCurve>& curves,
                       const std::vector<std::string>& metadata) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  for (const auto& line : metadata) out << "# " << line << '\n';
  out << "method\tsize\tmse\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.sizes.size(); ++i) {
      out << c.method << '\t' << c.sizes[i] << '\t' << c.mses[i] << '\n';
    }
  }
}

}  // namespace grel
