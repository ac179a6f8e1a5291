#pragma once

#include <vector>

#include <Eigen/Dense>

#include "grel/core.hpp"

// Node-level kernels and Gram-matrix assembly.

namespace grel {

enum class NodeKernelKind { linear, gaussian_rbf };

struct NodeKernelConfig {
  NodeKernelKind kind = NodeKernelKind::linear;
  double gamma = 1.0;  // gaussian_rbf only; must be > 0
};

// linear: <x, x2>; gaussian_rbf: exp(-gamma * ||x - x2||^2).
// Throws std::invalid_argument on dimension mismatch or non-positive gamma.
double node_kernel(const FeatureVector& x, const FeatureVector& x2,
                   const NodeKernelConfig& cfg);

// |A| x |B| matrix with entry (i, j) = node_kernel(A_i, B_j, cfg).
Eigen::MatrixXd gram_matrix(const std::vector<Node>& A, const std::vector<Node>& B,
                            const NodeKernelConfig& cfg);

}  // namespace grel
