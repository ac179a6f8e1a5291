#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "grel/experiments.hpp"
#include "grel/rls.hpp"
#include "grel/rng.hpp"
#include "test_support.hpp"

using namespace grel;

namespace {

std::vector<Node> random_nodes(int n, int d, Rng& rng) {
  std::vector<Node> nodes;
  for (int i = 0; i < n; ++i) {
    std::vector<double> f(d);
    for (double& x : f) x = 2.0 * rng.uniform01() - 1.0;
    nodes.push_back({"n" + std::to_string(i), FeatureVector::dense(std::move(f))});
  }
  return nodes;
}

EdgeDataset make_dataset(std::shared_ptr<const std::vector<Node>> nodes,
                         const std::vector<Edge>& edges,
                         const std::vector<double>& y) {
  EdgeDataset ds;
  ds.nodes = std::move(nodes);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    ds.edges.push_back({edges[i], y[i]});
  }
  return ds;
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid utilities and edge sampling
// ---------------------------------------------------------------------------

TEST_CASE("powers_of_two") {
  std::vector<double> p = GridSpec::powers_of_two(-2, 1);
  REQUIRE(p.size() == 4);
  CHECK(p[0] == 0.25);
  CHECK(p[1] == 0.5);
  CHECK(p[2] == 1.0);
  CHECK(p[3] == 2.0);
  CHECK(GridSpec::powers_of_two(3, 3) == std::vector<double>{8.0});
  CHECK_THROWS_AS(GridSpec::powers_of_two(1, 0), std::invalid_argument);
}

TEST_CASE("sample_edges covers all pairs at maximal q") {
  std::vector<Edge> all = sample_edges(3, 6, std::uint64_t{9});
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : all) {
    CHECK(e.first != e.second);
    seen.insert({e.first, e.second});
  }
  CHECK(seen.size() == 6);  // every ordered non-self pair exactly once

  std::vector<Edge> with_self = sample_edges(3, 9, std::uint64_t{9}, false);
  std::set<std::pair<int, int>> seen2;
  for (const Edge& e : with_self) seen2.insert({e.first, e.second});
  CHECK(seen2.size() == 9);
}

TEST_CASE("sample_edges basics") {
  std::vector<Edge> edges = sample_edges(20, 100, std::uint64_t{4});
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    CHECK(e.first >= 0);
    CHECK(e.first < 20);
    CHECK(e.second >= 0);
    CHECK(e.second < 20);
    CHECK(e.first != e.second);
    seen.insert({e.first, e.second});
  }
  CHECK(seen.size() == 100);  // no duplicates

  std::vector<Edge> one = sample_edges(2, 1, std::uint64_t{77});
  REQUIRE(one.size() == 1);
  CHECK(one[0].first + one[0].second == 1);  // (0,1) or (1,0)

  // determinism of the seed overload
  std::vector<Edge> e1 = sample_edges(50, 30, std::uint64_t{123});
  std::vector<Edge> e2 = sample_edges(50, 30, std::uint64_t{123});
  for (std::size_t i = 0; i < e1.size(); ++i) {
    CHECK(e1[i].first == e2[i].first);
    CHECK(e1[i].second == e2[i].second);
  }

  CHECK(sample_edges(5, 0, std::uint64_t{0}).empty());
  CHECK_THROWS_AS(sample_edges(3, 7, std::uint64_t{0}), std::invalid_argument);
  CHECK_THROWS_AS(sample_edges(3, 10, std::uint64_t{0}, false), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Grid search
// ---------------------------------------------------------------------------

TEST_CASE("grid_search single point matches a manual fit") {
  Rng rng(31);
  auto nodes = std::make_shared<const std::vector<Node>>(random_nodes(8, 3, rng));
  std::vector<Edge> Etr = {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {1, 2}};
  std::vector<Edge> Eva = {{0, 2}, {3, 5}, {4, 6}};
  std::vector<double> ytr = {0.2, 0.8, 0.4, 0.6, 0.5};
  std::vector<double> yva = {0.3, 0.7, 0.5};
  EdgeDataset train = make_dataset(nodes, Etr, ytr);
  EdgeDataset val = make_dataset(nodes, Eva, yva);
  EdgeKernelConfig cfg{{NodeKernelKind::gaussian_rbf, 0.0}, PairwiseKernelKind::kron};

  GridSpec grid{{0.5}, {1.25}};
  GridChoice choice = grid_search(train, val, grid, cfg);
  CHECK(choice.lambda == 0.5);
  CHECK(choice.gamma == 1.25);

  EdgeKernelConfig used = cfg;
  used.node.gamma = 1.25;
  Eigen::MatrixXd K = edge_gram(*nodes, Etr, Etr, used);
  Eigen::MatrixXd Kv = edge_gram(*nodes, Eva, *nodes, Etr, used);
  Eigen::VectorXd a = fit_closed_form(K, train.labels(), 0.5);
  CHECK(choice.val_mse == doctest::Approx(mse(Kv * a, val.labels())).epsilon(1e-12));
}

TEST_CASE("grid_search agrees with an exhaustive manual loop") {
  Rng rng(33);
  auto nodes = std::make_shared<const std::vector<Node>>(random_nodes(10, 4, rng));
  std::vector<Edge> Etr = sample_edges(10, 20, rng);
  std::vector<Edge> Eva = sample_edges(10, 10, rng);
  std::vector<double> ytr, yva;
  for (int i = 0; i < 20; ++i) ytr.push_back(rng.uniform01());
  for (int i = 0; i < 10; ++i) yva.push_back(rng.uniform01());
  EdgeDataset train = make_dataset(nodes, Etr, ytr);
  EdgeDataset val = make_dataset(nodes, Eva, yva);
  EdgeKernelConfig cfg{{NodeKernelKind::gaussian_rbf, 0.0}, PairwiseKernelKind::kron_sym};

  GridSpec grid{{0.25, 1.0}, {0.5, 2.0}};
  GridChoice choice = grid_search(train, val, grid, cfg);

  double best = std::numeric_limits<double>::infinity();
  double bl = 0.0, bg = 0.0;
  for (double gamma : grid.gammas) {
    EdgeKernelConfig used = cfg;
    used.node.gamma = gamma;
    Eigen::MatrixXd K = edge_gram(*nodes, Etr, Etr, used);
    Eigen::MatrixXd Kv = edge_gram(*nodes, Eva, *nodes, Etr, used);
    for (double lambda : grid.lambdas) {
      Eigen::VectorXd a = fit_closed_form(K, train.labels(), lambda);
      double v = mse(Kv * a, val.labels());
      if (v < best || (v == best && (lambda > bl || (lambda == bl && gamma > bg)))) {
        best = v;
        bl = lambda;
        bg = gamma;
      }
    }
  }
  CHECK(choice.lambda == bl);
  CHECK(choice.gamma == bg);
  CHECK(choice.val_mse == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("grid_search ties break toward larger gamma") {
  // All nodes share identical features, so along gamma the RBF Gram is the
  // all-ones matrix regardless of gamma: every gamma ties and the largest
  // must win.
  std::vector<Node> raw;
  for (int i = 0; i < 4; ++i) {
    raw.push_back({"n" + std::to_string(i), FeatureVector::dense({1.0, 2.0})});
  }
  auto nodes = std::make_shared<const std::vector<Node>>(std::move(raw));
  EdgeDataset train = make_dataset(nodes, {{0, 1}, {2, 3}}, {0.4, 0.6});
  EdgeDataset val = make_dataset(nodes, {{1, 2}}, {0.5});
  EdgeKernelConfig cfg{{NodeKernelKind::gaussian_rbf, 0.0}, PairwiseKernelKind::kron};
  GridSpec grid{{0.5}, {0.25, 0.5, 1.0, 2.0}};
  GridChoice choice = grid_search(train, val, grid, cfg);
  CHECK(choice.gamma == 2.0);
}

TEST_CASE("grid_search ties break toward larger lambda") {
  // Zero training labels force a = 0 at every lambda: all grid points tie at
  // the same validation MSE and the strongest regularization must win.
  Rng rng(35);
  auto nodes = std::make_shared<const std::vector<Node>>(random_nodes(6, 3, rng));
  EdgeDataset train = make_dataset(nodes, {{0, 1}, {2, 3}, {4, 5}}, {0.0, 0.0, 0.0});
  EdgeDataset val = make_dataset(nodes, {{1, 3}}, {0.25});
  EdgeKernelConfig cfg{{NodeKernelKind::gaussian_rbf, 0.0}, PairwiseKernelKind::kron};
  GridSpec grid{{0.25, 0.5, 1.0}, {0.5, 1.0}};
  GridChoice choice = grid_search(train, val, grid, cfg);
  CHECK(choice.lambda == 1.0);
  CHECK(choice.gamma == 1.0);
  CHECK(choice.val_mse == doctest::Approx(0.0625).epsilon(1e-12));  // (0 - 0.25)^2
}

TEST_CASE("grid_search centering makes constant labels trivial") {
  Rng rng(37);
  auto nodes = std::make_shared<const std::vector<Node>>(random_nodes(6, 3, rng));
  EdgeDataset train = make_dataset(nodes, {{0, 1}, {2, 3}, {4, 5}}, {0.7, 0.7, 0.7});
  EdgeDataset val = make_dataset(nodes, {{1, 3}, {2, 5}}, {0.7, 0.7});
  EdgeKernelConfig cfg{{NodeKernelKind::gaussian_rbf, 0.0}, PairwiseKernelKind::kron};
  GridSpec grid{{0.5, 1.0}, {1.0}};
  GridChoice centered = grid_search(train, val, grid, cfg, true);
  // The mean of three copies of 0.7 reproduces 0.7 only to rounding, so the
  // centered labels (and hence the validation MSE) are zero up to ~1 ulp.
  CHECK(centered.val_mse <= 1e-30);
  GridChoice raw = grid_search(train, val, grid, cfg, false);
  CHECK(raw.val_mse > 0.0);  // shrinkage pulls predictions below 0.7
}

TEST_CASE("grid_search with a linear kernel ignores the gamma grid") {
  Rng rng(39);
  auto nodes = std::make_shared<const std::vector<Node>>(random_nodes(6, 3, rng));
  EdgeDataset train = make_dataset(nodes, {{0, 1}, {2, 3}, {4, 5}}, {0.2, 0.5, 0.9});
  EdgeDataset val = make_dataset(nodes, {{1, 3}}, {0.4});
  EdgeKernelConfig cfg{{NodeKernelKind::linear, 1.0}, PairwiseKernelKind::kron};
  GridSpec grid{{0.5}, {}};  // no gamma grid needed
  GridChoice choice = grid_search(train, val, grid, cfg);
  CHECK(choice.gamma == 1.0);  // the template's gamma is reported unchanged

  GridSpec empty_lambdas{{}, {1.0}};
  CHECK_THROWS_AS(grid_search(train, val, empty_lambdas, cfg), std::invalid_argument);
  EdgeKernelConfig rbf{{NodeKernelKind::gaussian_rbf, 1.0}, PairwiseKernelKind::kron};
  CHECK_THROWS_AS(grid_search(train, val, grid, rbf), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank and Bonferroni
// ---------------------------------------------------------------------------

TEST_CASE("wilcoxon exact pinned values") {
  // n=3, all differences positive, distinct magnitudes: W+ = 6, and only
  // W in {0, 6} is as extreme -> p = 2/8.
  CHECK(wilcoxon_signed_rank({1.0, 2.0, 3.0}, {0.5, 1.0, 2.0}, 3) ==
        doctest::Approx(0.25).epsilon(1e-15));

  // n=8, tie-free mixed signs (reference p computed independently and matching
  // scipy.stats.wilcoxon exact mode).
  std::vector<double> a2 = {0.31, 0.45, 0.12, 0.88, 0.57, 0.66, 0.21, 0.74};
  std::vector<double> b2 = {0.25, 0.52, 0.02, 0.70, 0.61, 0.50, 0.30, 0.60};
  CHECK(wilcoxon_signed_rank(a2, b2) == doctest::Approx(0.1953125).epsilon(1e-12));

  // n=10 with one zero difference (dropped) and tied magnitudes (average
  // ranks); reference value from an independent enumeration.
  std::vector<double> a3 = {0.5, 0.4, 0.9, 0.3, 0.8, 0.7, 0.2, 0.6, 0.55, 0.45};
  std::vector<double> b3 = {0.4, 0.4, 0.7, 0.4, 0.6, 0.8, 0.1, 0.5, 0.50, 0.40};
  CHECK(wilcoxon_signed_rank(a3, b3) == doctest::Approx(0.29296875).epsilon(1e-12));
}

TEST_CASE("wilcoxon normal approximation pinned values") {
  // n=30 with tied magnitudes; values are dyadic so ties are exact. Reference
  // p from scipy.stats.wilcoxon (wilcox zero method, continuity correction).
  std::vector<int> ks = {-6, -4, 7, 3,  -1, -4, 7, 9,  -2, 5,
                         -2, -2, -2, 6, 7,  8,  -5, -7, 1, 7,
                         -9, 1,  -4, 4, -4, -7, 8,  -6, 8, 10};
  std::vector<double> a4, b4;
  for (int k : ks) {
    a4.push_back(0.5 + k / 64.0);
    b4.push_back(0.5);
  }
  CHECK(wilcoxon_signed_rank(a4, b4) ==
        doctest::Approx(0.36445794022404254).epsilon(1e-12));

  // n=20 tie-free dyadic
  std::vector<int> ks5 = {1,  -2, 3,  4,  5,  -6, 7,  8,  9,  10,
                          11, -12, 13, 14, 15, 16, 17, -18, 19, 20};
  std::vector<double> a5, b5;
  for (int k : ks5) {
    a5.push_back(0.5 + k / 64.0);
    b5.push_back(0.5);
  }
  CHECK(wilcoxon_signed_rank(a5, b5) ==
        doctest::Approx(0.013041920513931228).epsilon(1e-12));
}

TEST_CASE("wilcoxon symmetry and errors") {
  std::vector<double> a = {0.31, 0.45, 0.12, 0.88, 0.57, 0.66};
  std::vector<double> b = {0.25, 0.52, 0.02, 0.70, 0.61, 0.50};
  CHECK(wilcoxon_signed_rank(a, b) == wilcoxon_signed_rank(b, a));

  CHECK_THROWS_AS(wilcoxon_signed_rank({1.0, 2.0}, {1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(wilcoxon_signed_rank({1.0, 2.0}, {0.5, 1.0}, 5),
                  std::invalid_argument);  // fewer than min_n pairs
  CHECK_THROWS_AS(wilcoxon_signed_rank(a, a), std::invalid_argument);  // all zero
}

TEST_CASE("bonferroni") {
  CHECK(bonferroni({0.01}) == std::vector<bool>{true});
  // m = 10: threshold drops to 0.005
  std::vector<double> ps(10, 0.01);
  std::vector<bool> dec = bonferroni(ps);
  for (bool d : dec) CHECK_FALSE(d);
  ps.assign(10, 0.004);
  dec = bonferroni(ps);
  for (bool d : dec) CHECK(d);
  CHECK_THROWS_AS(bonferroni({}), std::invalid_argument);
  CHECK(bonferroni({0.0, 0.9}, 0.05) == std::vector<bool>{true, false});
}

// ---------------------------------------------------------------------------
// Results files
// ---------------------------------------------------------------------------

TEST_CASE("write_results_file format") {
  ExperimentResult r1{"kron", {0.1, 0.2}, 0.15000000000000002};
  ExperimentResult r2{"mpred", {0.3, 0.5}, 0.4};
  std::string path = "grel_results_fmt.tmp";
  write_results_file(path, {r1, r2}, {"seed 7", "reps 2"});

  std::ifstream in(path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 11);
  CHECK(lines[0] == "# seed 7");
  CHECK(lines[1] == "# reps 2");
  CHECK(lines[2] == "method\trep\tmse");
  CHECK(lines[3].rfind("kron\t0\t", 0) == 0);
  CHECK(lines[6].rfind("mpred\t1\t", 0) == 0);
  CHECK(lines[7].empty());
  CHECK(lines[8] == "summary");
  CHECK(lines[9].rfind("kron\tmean\t", 0) == 0);
  CHECK(lines[10].rfind("mpred\tmean\t", 0) == 0);

  // values survive a text round trip at 17 significant digits
  std::string v = lines[3].substr(lines[3].rfind('\t') + 1);
  CHECK(std::stod(v) == 0.1);
  std::remove(path.c_str());
}

TEST_CASE("write_curves_file format") {
  SizeCurve c{"kron_sym", {100, 200}, {0.5, 0.25}};
  std::string path = "grel_curves_fmt.tmp";
  write_curves_file(path, {c}, {"corpus synthetic"});
  std::ifstream in(path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "# corpus synthetic");
  CHECK(lines[1] == "method\tsize\tmse");
  CHECK(lines[2] == "kron_sym\t100\t0.5");
  CHECK(lines[3] == "kron_sym\t200\t0.25");
  std::remove(path.c_str());
}

// ---------------------------------------------------------------------------
// Experiment drivers (smoke scale)
// ---------------------------------------------------------------------------

TEST_CASE("partial graph driver runs one repetition") {
  std::vector<ExperimentResult> results = run_partial_graph_experiment(
      kJaccardMember, {"mpred", "kron"}, 1, 99, 1);
  REQUIRE(results.size() == 2);
  for (const auto& r : results) {
    REQUIRE(r.mses.size() == 1);
    CHECK(r.mean_mse == r.mses[0]);
    CHECK(std::isfinite(r.mses[0]));
    CHECK(r.mses[0] > 0.0);
    CHECK(r.mses[0] < 0.5);
  }
  CHECK(results[0].method == "mpred");
  CHECK(results[1].method == "kron");
}

TEST_CASE("drivers are deterministic in the seed") {
  auto r1 = run_new_nodes_experiment(kIntransitiveMember, {"mpred"}, 3, 5, 1);
  auto r2 = run_new_nodes_experiment(kIntransitiveMember, {"mpred"}, 3, 5, 1);
  REQUIRE(r1.size() == 1);
  REQUIRE(r1[0].mses.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(r1[0].mses[i] == r2[0].mses[i]);
  double mean = (r1[0].mses[0] + r1[0].mses[1] + r1[0].mses[2]) / 3.0;
  CHECK(r1[0].mean_mse == doctest::Approx(mean).epsilon(1e-15));

  // a different seed gives different repetitions
  auto r3 = run_new_nodes_experiment(kIntransitiveMember, {"mpred"}, 3, 6, 1);
  bool any_different = false;
  for (int i = 0; i < 3; ++i) any_different |= (r1[0].mses[i] != r3[0].mses[i]);
  CHECK(any_different);
}

TEST_CASE("species driver runs and validates methods") {
  auto results = run_species_experiment({"mpred"}, 1, 11, 1);
  REQUIRE(results.size() == 1);
  CHECK(results[0].mses.size() == 1);
  CHECK(results[0].mses[0] > 0.0);
  CHECK(results[0].mses[0] < 0.5);

  CHECK_THROWS_AS(run_species_experiment({"cartesian"}, 1, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_species_experiment({"nonsense"}, 1, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("new nodes driver rejects Cartesian kernels") {
  CHECK_THROWS_AS(run_new_nodes_experiment(kJaccardMember, {"cartesian"}, 1, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      run_new_nodes_experiment(kJaccardMember, {"cartesian_sym"}, 1, 0, 1),
      std::invalid_argument);
}

TEST_CASE("document driver on a tiny synthetic corpus") {
  SyntheticCorpusParams params;
  params.ndocs = 45;
  params.vocab = 500;
  params.ntopics = 3;
  params.len_min = 15;
  params.len_max = 80;
  params.block = 60;
  params.base = 200;
  std::string dir =
      (std::filesystem::temp_directory_path() / "grel_tiny_corpus").string();
  std::filesystem::remove_all(dir);
  write_synthetic_corpus(dir, params, 2024);
  BowCorpus corpus = load_bow_corpus(dir);
  REQUIRE(corpus.docs.size() == 45);

  std::vector<int> sizes = {20, 40};
  auto curves = run_document_experiment(corpus, sizes, 3, {"mpred", "kron", "kron_sym"});
  REQUIRE(curves.size() == 3);
  for (const auto& c : curves) {
    REQUIRE(c.sizes == sizes);
    REQUIRE(c.mses.size() == 2);
    for (double m : c.mses) {
      CHECK(std::isfinite(m));
      CHECK(m >= 0.0);
    }
  }

  // deterministic in the seed
  auto again = run_document_experiment(corpus, sizes, 3, {"mpred", "kron", "kron_sym"});
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = 0; j < curves[i].mses.size(); ++j) {
      CHECK(curves[i].mses[j] == again[i].mses[j]);
    }
  }

  CHECK_THROWS_AS(run_document_experiment(corpus, sizes, 3, {"cartesian"}),
                  std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST_CASE("synthetic corpus generator is deterministic and respects lengths") {
  SyntheticCorpusParams params;
  params.ndocs = 12;
  params.vocab = 300;
  params.ntopics = 2;
  params.len_min = 10;
  params.len_max = 40;
  params.block = 40;
  params.base = 100;
  auto tmp = std::filesystem::temp_directory_path();
  std::string d1 = (tmp / "grel_corpus_a").string();
  std::string d2 = (tmp / "grel_corpus_b").string();
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
  write_synthetic_corpus(d1, params, 5);
  write_synthetic_corpus(d2, params, 5);
  BowCorpus c1 = load_bow_corpus(d1);
  BowCorpus c2 = load_bow_corpus(d2);
  REQUIRE(c1.docs.size() == 12);
  REQUIRE(c2.docs.size() == 12);
  long total = 0;
  for (int i = 0; i < 12; ++i) {
    CHECK(c1.docs[i].features.squared_distance(c2.docs[i].features) == 0.0);
    double len = 0.0;
    for (const auto& [idx, count] : c1.docs[i].features.sparse_entries()) {
      (void)idx;
      len += count;
    }
    CHECK(len >= params.len_min);
    CHECK(len <= params.len_max);
    total += static_cast<long>(len);
  }
  CHECK(total > 12 * params.len_min);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}
