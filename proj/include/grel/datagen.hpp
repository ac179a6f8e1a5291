#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grel/core.hpp"

// Generators and loaders for the experimental datasets: random bitset nodes
// with a parametric set-similarity relation, a limiting-factor species
// competition model, and bag-of-words document corpora.

namespace grel {

// Set-similarity family over binary vectors A, B:
//   S(A,B) = (t*Delta + u*delta + v*nu) / (t'*Delta + u*delta + v*nu)
// with Delta = |A \ B| + |B \ A|, delta = |A intersect B|,
// nu = |complement of (A union B)|.
struct SimilarityParams {
  double t = 0.0;
  double t_prime = 0.0;
  double u = 0.0;
  double v = 0.0;
};

// The three similarity members used by the graded-relation experiments.
inline constexpr SimilarityParams kIntransitiveMember{0.0, 1.0, 2.0, 2.0};
inline constexpr SimilarityParams kJaccardMember{0.0, 1.0, 1.0, 0.0};      // T_L-transitive
inline constexpr SimilarityParams kProductMember{1.0, 2.0, 1.0, 1.0};     // T_P-transitive

// n nodes with d independent Bernoulli(p) binary features. Ids "v0", "v1", ...
std::vector<Node> gen_bernoulli_nodes(int n, int d = 20, double p = 0.5,
                                      std::uint64_t seed = 0);

// Independently flips each binary feature with probability `rate`.
std::vector<Node> flip_noise(const std::vector<Node>& nodes, double rate = 0.1,
                             std::uint64_t seed = 0);

// Evaluates the similarity family on two binary vectors of equal dimension.
// Throws std::invalid_argument on dimension mismatch, std::domain_error when
// the denominator is zero.
double set_similarity(const FeatureVector& A, const FeatureVector& B,
                      const SimilarityParams& p);

// n species, each a row of k limiting factors drawn uniformly from [0, 1].
struct SpeciesPool {
  Eigen::MatrixXd factors;  // n x k, entries in [0, 1]
};

SpeciesPool gen_species(int n = 400, int k = 10, std::uint64_t seed = 0);

// Probability that the species with factors f beats the one with factors f2:
// (1/k) * sum_i H(f_i - f2_i), Heaviside with H(0) = 1/2 (so the relation is
// reciprocal even under ties).
double dominance_prob(const Eigen::VectorXd& f, const Eigen::VectorXd& f2);

// Loads a directory of text documents as nodes with sparse word-count
// features. Layout: one file per document, optionally nested one level in
// subdirectories whose names are kept as labels (metadata only -- learning
// never sees them). Tokenization: lowercase, split on non-alphanumeric.
// Throws std::runtime_error on unreadable paths or an empty corpus.
struct BowCorpus {
  std::vector<Node> docs;             // sparse count vectors over `vocabulary`
  std::vector<std::string> labels;    // per-doc subdirectory name ("" at top level)
  std::vector<std::string> vocabulary;
};

BowCorpus load_bow_corpus(const std::string& path);

// Number of distinct word types with positive count in both documents.
int common_words_label(const Node& d1, const Node& d2);

}  // namespace grel
