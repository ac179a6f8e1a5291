#include "grel/node_kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace grel {

double node_kernel(const FeatureVector& x, const FeatureVector& x2,
                   const NodeKernelConfig& cfg) {
  if (x.dim() != x2.dim()) {
    throw std::invalid_argument("node_kernel: dimension mismatch");
  }
  switch (cfg.kind) {
    case NodeKernelKind::linear:
      return x.dot(x2);
    case NodeKernelKind::gaussian_rbf:
      if (!(cfg.gamma > 0.0)) {
        throw std::invalid_argument("node_kernel: gamma must be positive");
      }
      return std::exp(-cfg.gamma * x.squared_distance(x2));
  }
  throw std::invalid_argument("node_kernel: unknown kind");
}

Eigen::MatrixXd gram_matrix(const std::vector<Node>& A, const std::vector<Node>& B,
                            const NodeKernelConfig& cfg) {
  Eigen::MatrixXd G(A.size(), B.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    for (std::size_t j = 0; j < B.size(); ++j) {
      G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          node_kernel(A[i].features, B[j].features, cfg);
    }
  }
  return G;
}

}  // namespace grel
