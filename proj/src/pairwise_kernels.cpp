#include "grel/pairwise_kernels.hpp"

#include <stdexcept>
#include <unordered_map>

namespace grel {

std::string to_string(PairwiseKernelKind kind) {
  switch (kind) {
    case PairwiseKernelKind::kron: return "kron";
    case PairwiseKernelKind::kron_sym: return "kron_sym";
    case PairwiseKernelKind::kron_rec: return "kron_rec";
    case PairwiseKernelKind::cartesian: return "cartesian";
    case PairwiseKernelKind::cartesian_sym: return "cartesian_sym";
    case PairwiseKernelKind::rank_rec: return "rank_rec";
    case PairwiseKernelKind::rank_sym: return "rank_sym";
    case PairwiseKernelKind::mlpk: return "mlpk";
  }
  throw std::invalid_argument("to_string: unknown pairwise kernel kind");
}

PairwiseKernelKind pairwise_kind_from_string(const std::string& name) {
  if (name == "kron") return PairwiseKernelKind::kron;
  if (name == "kron_sym") return PairwiseKernelKind::kron_sym;
  if (name == "kron_rec") return PairwiseKernelKind::kron_rec;
  if (name == "cartesian") return PairwiseKernelKind::cartesian;
  if (name == "cartesian_sym") return PairwiseKernelKind::cartesian_sym;
  if (name == "rank_rec") return PairwiseKernelKind::rank_rec;
  if (name == "rank_sym") return PairwiseKernelKind::rank_sym;
  if (name == "mlpk") return PairwiseKernelKind::mlpk;
  throw std::invalid_argument("unknown pairwise kernel kind: '" + name + "'");
}

namespace {

// All kernels are built from the four node-kernel values between edge
// endpoints plus, for the Cartesian family, the two node-identity indicators.
//   k_ff = k(v, vbar)    k_ss = k(v', vbar')
//   k_fs = k(v, vbar')   k_sf = k(v', vbar)
struct EdgePairValues {
  double k_ff, k_ss, k_fs, k_sf;
  bool id_ff, id_ss, id_fs, id_sf;
};

double eval_kind(PairwiseKernelKind kind, const EdgePairValues& p) {
  switch (kind) {
    case PairwiseKernelKind::kron:
      return p.k_ff * p.k_ss;
    case PairwiseKernelKind::kron_rec:
      return 2.0 * (p.k_ff * p.k_ss - p.k_fs * p.k_sf);
    case PairwiseKernelKind::kron_sym:
      return 2.0 * (p.k_ff * p.k_ss + p.k_fs * p.k_sf);
    case PairwiseKernelKind::cartesian:
      return (p.id_ff ? p.k_ss : 0.0) + (p.id_ss ? p.k_ff : 0.0);
    case PairwiseKernelKind::cartesian_sym:
      // cartesian(e, ebar) + cartesian(e, swap(ebar))
      return (p.id_ff ? p.k_ss : 0.0) + (p.id_ss ? p.k_ff : 0.0) +
             (p.id_fs ? p.k_sf : 0.0) + (p.id_sf ? p.k_fs : 0.0);
    case PairwiseKernelKind::rank_rec:
      return p.k_ff + p.k_ss - p.k_fs - p.k_sf;
    case PairwiseKernelKind::rank_sym:
      return p.k_ff + p.k_ss + p.k_fs + p.k_sf;
    case PairwiseKernelKind::mlpk: {
      double r = p.k_ff + p.k_ss - p.k_fs - p.k_sf;
      return r * r;
    }
  }
  throw std::invalid_argument("eval_kind: unknown pairwise kernel kind");
}

}  // namespace

double pairwise_kernel(const std::vector<Node>& lhs_nodes, const Edge& e,
                       const std::vector<Node>& rhs_nodes, const Edge& ebar,
                       const EdgeKernelConfig& cfg) {
  const Node& v = lhs_nodes.at(e.first);
  const Node& vp = lhs_nodes.at(e.second);
  const Node& vb = rhs_nodes.at(ebar.first);
  const Node& vbp = rhs_nodes.at(ebar.second);
  EdgePairValues p;
  p.k_ff = node_kernel(v.features, vb.features, cfg.node);
  p.k_ss = node_kernel(vp.features, vbp.features, cfg.node);
  p.k_fs = node_kernel(v.features, vbp.features, cfg.node);
  p.k_sf = node_kernel(vp.features, vb.features, cfg.node);
  p.id_ff = v.id == vb.id;
  p.id_ss = vp.id == vbp.id;
  p.id_fs = v.id == vbp.id;
  p.id_sf = vp.id == vb.id;
  return eval_kind(cfg.pairwise, p);
}

Eigen::MatrixXd edge_gram_from_node_gram(
    const Eigen::MatrixXd& G, const std::vector<Edge>& E1,
    const std::vector<Edge>& E2, PairwiseKernelKind kind,
    const std::function<bool(int, int)>& id_match) {
  const bool needs_ids = kind == PairwiseKernelKind::cartesian ||
                         kind == PairwiseKernelKind::cartesian_sym;
  if (needs_ids && !id_match) {
    throw std::invalid_argument(
        "edge_gram_from_node_gram: Cartesian kernels need an id_match relation");
  }
  Eigen::MatrixXd M(E1.size(), E2.size());
  for (std::size_t i = 0; i < E1.size(); ++i) {
    const Edge& e = E1[i];
    for (std::size_t j = 0; j < E2.size(); ++j) {
      const Edge& eb = E2[j];
      EdgePairValues p;
      p.k_ff = G(e.first, eb.first);
      p.k_ss = G(e.second, eb.second);
      p.k_fs = G(e.first, eb.second);
      p.k_sf = G(e.second, eb.first);
      if (needs_ids) {
        p.id_ff = id_match(e.first, eb.first);
        p.id_ss = id_match(e.second, eb.second);
        p.id_fs = id_match(e.first, eb.second);
        p.id_sf = id_match(e.second, eb.first);
      } else {
        p.id_ff = p.id_ss = p.id_fs = p.id_sf = false;
      }
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          eval_kind(kind, p);
    }
  }
  return M;
}

Eigen::MatrixXd edge_gram(const std::vector<Node>& lhs_nodes,
                          const std::vector<Edge>& E1,
                          const std::vector<Node>& rhs_nodes,
                          const std::vector<Edge>& E2,
                          const EdgeKernelConfig& cfg) {
  Eigen::MatrixXd G = gram_matrix(lhs_nodes, rhs_nodes, cfg.node);
  // Cross-universe node identity is decided by id equality.
  std::unordered_map<std::string, int> rhs_index;
  for (std::size_t j = 0; j < rhs_nodes.size(); ++j) {
    rhs_index[rhs_nodes[j].id] = static_cast<int>(j);
  }
  std::vector<int> match(lhs_nodes.size(), -1);
  for (std::size_t i = 0; i < lhs_nodes.size(); ++i) {
    auto it = rhs_index.find(lhs_nodes[i].id);
    if (it != rhs_index.end()) match[i] = it->second;
  }
  auto id_match = [&match](int i, int j) { return match[i] == j; };
  return edge_gram_from_node_gram(G, E1, E2, cfg.pairwise, id_match);
}

Eigen::MatrixXd edge_gram(const std::vector<Node>& nodes,
                          const std::vector<Edge>& E1,
                          const std::vector<Edge>& E2,
                          const EdgeKernelConfig& cfg) {
  return edge_gram(nodes, E1, nodes, E2, cfg);
}

}  // namespace grel
