#include "grel/relation_properties.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace grel {

double tnorm_eval(TNorm t, double a, double b) {
  switch (t) {
    case TNorm::minimum: return std::min(a, b);
    case TNorm::product: return a * b;
    case TNorm::lukasiewicz: return std::max(a + b - 1.0, 0.0);
  }
  throw std::invalid_argument("tnorm_eval: unknown t-norm");
}

namespace {

double g_eval(StochasticTransitivityKind kind, double a, double b) {
  switch (kind) {
    case StochasticTransitivityKind::weak: return 0.5;
    case StochasticTransitivityKind::moderate: return std::min(a, b);
    case StochasticTransitivityKind::strong: return std::max(a, b);
  }
  throw std::invalid_argument("unknown stochastic transitivity kind");
}

void check_square(const RelationMatrix& Q) {
  if (Q.values.rows() != Q.values.cols() ||
      Q.values.rows() != static_cast<Eigen::Index>(Q.ids.size())) {
    throw std::invalid_argument("RelationMatrix: ids and values sizes disagree");
  }
}

}  // namespace

bool is_symmetric(const RelationMatrix& Q, double tol) {
  check_square(Q);
  const int n = Q.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(Q.values(i, j) - Q.values(j, i)) > tol) return false;
    }
  }
  return true;
}

bool is_reciprocal(const RelationMatrix& Q, double tol) {
  check_square(Q);
  const int n = Q.size();
  for (int i = 0; i < n; ++i) {
    if (std::abs(Q.values(i, i) - 0.5) > tol) return false;
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(Q.values(i, j) + Q.values(j, i) - 1.0) > tol) return false;
    }
  }
  return true;
}

ViolationReport check_t_transitivity(const RelationMatrix& Q, TNorm t, double tol) {
  check_square(Q);
  const int n = Q.size();
  ViolationReport report;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double lhs = tnorm_eval(t, Q.values(i, j), Q.values(j, k));
        double excess = lhs - Q.values(i, k);
        if (excess > tol) {
          report.triples.push_back({i, j, k});
          report.max_violation = std::max(report.max_violation, excess);
        }
      }
    }
  }
  return report;
}

ViolationReport check_stochastic_transitivity(const RelationMatrix& Q,
                                              StochasticTransitivityKind kind,
                                              double tol) {
  check_square(Q);
  const int n = Q.size();
  ViolationReport report;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double qij = Q.values(i, j);
        double qjk = Q.values(j, k);
        if (qij < 0.5 || qjk < 0.5) continue;  // premises (non-strict >= 1/2)
        double required = g_eval(kind, qij, qjk);
        double shortfall = required - Q.values(i, k);
        if (shortfall > tol) {
          report.triples.push_back({i, j, k});
          report.max_violation = std::max(report.max_violation, shortfall);
        }
      }
    }
  }
  return report;
}

RankingResult topological_ranking(const RelationMatrix& Q, double threshold) {
  check_square(Q);
  const int n = Q.size();
  // Arc i -> j iff Q(i,j) > threshold; ties mean indifference (no arc).
  std::vector<std::vector<int>> succ(n);
  std::vector<int> indegree(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && Q.values(i, j) > threshold) {
        succ[i].push_back(j);
        ++indegree[j];
      }
    }
  }

  // Kahn's algorithm; smallest index first for a deterministic order.
  RankingResult result;
  std::vector<int> remaining = indegree;
  std::vector<bool> placed(n, false);
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (!placed[i] && remaining[i] == 0) {
        pick = i;
        break;
      }
    }
    if (pick < 0) break;  // every unplaced node has an incoming arc: cycle
    placed[pick] = true;
    result.order.push_back(pick);
    for (int j : succ[pick]) --remaining[j];
  }
  if (static_cast<int>(result.order.size()) == n) {
    result.acyclic = true;
    return result;
  }

  // Every unplaced node keeps an incoming arc from another unplaced node, so
  // walking predecessors inside the leftover set must revisit a node; the
  // revisited segment is a directed cycle (recorded in forward arc order).
  result.order.clear();
  int start = 0;
  while (placed[start]) ++start;
  std::vector<int> visit_pos(n, -1);
  std::vector<int> walk;  // walk[i+1] -> walk[i] are arcs
  int cur = start;
  while (visit_pos[cur] < 0) {
    visit_pos[cur] = static_cast<int>(walk.size());
    walk.push_back(cur);
    int prev = -1;
    for (int i = 0; i < n && prev < 0; ++i) {
      if (!placed[i] && i != cur && Q.values(i, cur) > threshold) prev = i;
    }
    if (prev < 0) {
      throw std::logic_error("topological_ranking: leftover node without "
                             "in-arc (internal error)");
    }
    cur = prev;
  }
  result.cycle.push_back(cur);  // cur == walk[p], closing arc cur -> walk.back()
  for (std::size_t i = walk.size(); i-- > static_cast<std::size_t>(visit_pos[cur]) + 1;) {
    result.cycle.push_back(walk[i]);
  }
  result.acyclic = false;
  return result;
}

}  // namespace grel
