#pragma once

#include <array>
#include <vector>

#include "grel/core.hpp"

// Executable checkers for relational properties of finite [0,1]-valued
// relations: symmetry, reciprocity, T-transitivity for the three classical
// t-norms, stochastic transitivity, and ranking extraction by topological
// sorting. Checkers enumerate all n^3 triples; intended for n up to a few
// hundred.

namespace grel {

enum class TNorm { minimum, product, lukasiewicz };

// T_M(a,b) = min(a,b); T_P(a,b) = a*b; T_L(a,b) = max(a+b-1, 0).
double tnorm_eval(TNorm t, double a, double b);

// g(a,b) = 1/2 (weak), min(a,b) (moderate), max(a,b) (strong).
enum class StochasticTransitivityKind { weak, moderate, strong };

struct ViolationReport {
  std::vector<std::array<int, 3>> triples;  // (i, j, k) index triples
  double max_violation = 0.0;               // largest margin by which a triple fails

  bool holds() const { return triples.empty(); }
};

// Default tolerances: 1e-9 for exactly-constructed matrices, 1e-6 for
// learned/predicted ones (arithmetic noise vs genuine violations).
inline constexpr double kExactTol = 1e-9;
inline constexpr double kLearnedTol = 1e-6;

// Q(i,j) = Q(j,i) within tol, all i, j.
bool is_symmetric(const RelationMatrix& Q, double tol = kExactTol);

// Q(i,j) + Q(j,i) = 1 within tol for i != j, and diagonal = 1/2 within tol.
bool is_reciprocal(const RelationMatrix& Q, double tol = kExactTol);

// Reports triples with T(Q(i,j), Q(j,k)) > Q(i,k) + tol. Q should be
// symmetric within tol (t-transitivity is a property of similarity relations).
ViolationReport check_t_transitivity(const RelationMatrix& Q, TNorm t,
                                     double tol = kExactTol);

// For each triple with Q(i,j) >= 1/2 and Q(j,k) >= 1/2 (non-strict), requires
// Q(i,k) >= g(Q(i,j), Q(j,k)) - tol. Q should be reciprocal within tol.
ViolationReport check_stochastic_transitivity(const RelationMatrix& Q,
                                              StochasticTransitivityKind kind,
                                              double tol = kExactTol);

// Directed graph with arc i -> j iff Q(i,j) > threshold (ties give no arc:
// 1/2 means indifference). Returns a topological order when acyclic,
// otherwise the first detected cycle.
struct RankingResult {
  bool acyclic = false;
  std::vector<int> order;  // topological order (indices into Q.ids), if acyclic
  std::vector<int> cycle;  // a directed cycle, if not
};

RankingResult topological_ranking(const RelationMatrix& Q, double threshold = 0.5);

}  // namespace grel
