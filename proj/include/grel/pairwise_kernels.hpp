#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grel/core.hpp"
#include "grel/node_kernels.hpp"

// Edge-level (pairwise) kernels built from a node kernel. With edges
// e = (v, v') and ebar = (vbar, vbar') and node kernel k:
//
//   kron           k(v,vbar) * k(v',vbar')
//   kron_rec       2 * (k(v,vbar) k(v',vbar') - k(v,vbar') k(v',vbar))
//   kron_sym       2 * (k(v,vbar) k(v',vbar') + k(v,vbar') k(v',vbar))
//   cartesian      k(v',vbar') [v=vbar] + k(v,vbar) [v'=vbar']
//   cartesian_sym  cartesian(e, ebar) + cartesian(e, swap(ebar))
//   rank_rec       k(v,vbar) + k(v',vbar') - k(v,vbar') - k(v',vbar)
//   rank_sym       k(v,vbar) + k(v',vbar') + k(v,vbar') + k(v',vbar)
//   mlpk           rank_rec(e, ebar)^2
//
// The Cartesian indicators compare node ids, not features: the kernel only
// generalizes to edges that share a training node, and that notion is
// identity-level.

namespace grel {

enum class PairwiseKernelKind {
  kron,
  kron_sym,
  kron_rec,
  cartesian,
  cartesian_sym,
  rank_rec,
  rank_sym,
  mlpk,
};

// Round-trip with the CLI flag strings ("kron", "kron_sym", ...).
std::string to_string(PairwiseKernelKind kind);
PairwiseKernelKind pairwise_kind_from_string(const std::string& name);

struct EdgeKernelConfig {
  NodeKernelConfig node;
  PairwiseKernelKind pairwise = PairwiseKernelKind::kron;
};

// Single evaluation; lhs/rhs node lists own the edge endpoints.
double pairwise_kernel(const std::vector<Node>& lhs_nodes, const Edge& e,
                       const std::vector<Node>& rhs_nodes, const Edge& ebar,
                       const EdgeKernelConfig& cfg);

// |E1| x |E2| matrix of pairwise kernel values. The node-level Gram matrix
// between the two node lists is formed once and reused, so the cost is
// O(|lhs||rhs|) node kernels + O(|E1||E2|) arithmetic.
Eigen::MatrixXd edge_gram(const std::vector<Node>& lhs_nodes,
                          const std::vector<Edge>& E1,
                          const std::vector<Node>& rhs_nodes,
                          const std::vector<Edge>& E2,
                          const EdgeKernelConfig& cfg);

// Same-universe convenience overload (E1 and E2 index into `nodes`).
Eigen::MatrixXd edge_gram(const std::vector<Node>& nodes,
                          const std::vector<Edge>& E1,
                          const std::vector<Edge>& E2,
                          const EdgeKernelConfig& cfg);

// Gram-level evaluator: fills the edge-kernel matrix given a precomputed node
// Gram matrix G (G(i,j) = k(lhs node i, rhs node j)) and an id-match relation.
// id_match(i, j) must say whether lhs node i and rhs node j are the same node;
// only the Cartesian kernels consult it. Used by the experiment drivers to
// share one node Gram across many edge sets.
Eigen::MatrixXd edge_gram_from_node_gram(
    const Eigen::MatrixXd& G, const std::vector<Edge>& E1,
    const std::vector<Edge>& E2, PairwiseKernelKind kind,
    const std::function<bool(int, int)>& id_match = nullptr);

}  // namespace grel
