#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grel/core.hpp"
#include "grel/pairwise_kernels.hpp"

// Regularized least-squares in the dual: minimize
//   (1/q) sum_e (y_e - h(e))^2 + lambda ||h||^2
// over the RKHS of the chosen pairwise kernel. The minimizer is
// h(ebar) = sum_e a_e K(e, ebar) with (K + q lambda I) a = y.

namespace grel {

struct DualModel {
  std::shared_ptr<const std::vector<Node>> nodes;  // training node universe
  std::vector<Edge> edges;                         // training edges, size q
  Eigen::VectorXd a;                               // dual coefficients, size q
  EdgeKernelConfig config;
};

enum class FitMethod { closed_form, cg_early_stop };

struct FitReport {
  FitMethod method = FitMethod::closed_form;
  int iterations = 0;          // cg only (>= 1)
  double final_val_mse = 0.0;  // cg only: validation MSE at the kept iterate
  double lambda = 0.0;         // closed form only
};

// Solves (K + q*lambda*I) a = y. K must be symmetric, lambda > 0. Fails if
// the relative residual of the solve exceeds 1e-6.
Eigen::VectorXd fit_closed_form(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                double lambda);

// Dataset-level wrapper: assembles the edge Gram matrix and packages the
// coefficients as a DualModel.
DualModel fit_closed_form(const EdgeDataset& train, const EdgeKernelConfig& cfg,
                          double lambda, FitReport* report = nullptr);

// Conjugate gradient on the unregularized system K a = y (K symmetrized as
// (K + K^T)/2), starting from a = 0. After each iteration the validation MSE
// of K_val_train * a is computed; the iterate with minimum validation MSE is
// returned (earliest iteration on ties). Stops after `patience` consecutive
// iterations without improvement, or at `max_iterations`.
struct CgFit {
  Eigen::VectorXd a;
  int iterations = 0;      // iterations actually run
  int best_iteration = 0;  // iteration whose coefficients are returned
  double best_val_mse = 0.0;
};

CgFit fit_cg_early_stopping(const Eigen::MatrixXd& K_train,
                            const Eigen::VectorXd& y_train,
                            const Eigen::MatrixXd& K_val_train,
                            const Eigen::VectorXd& y_val, int patience = 10,
                            int max_iterations = 1000);

DualModel fit_cg_early_stopping(const EdgeDataset& train, const EdgeDataset& val,
                                const EdgeKernelConfig& cfg, int patience = 10,
                                FitReport* report = nullptr);

// h(ebar) = sum_e a_e K(e, ebar) for each edge in `edges` (over `nodes`).
Eigen::VectorXd predict(const DualModel& m, const std::vector<Node>& nodes,
                        const std::vector<Edge>& edges);

// Constant model: predicts the arithmetic mean of the training labels.
double mean_predictor(const Eigen::VectorXd& y_train);

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& y);

// Flat-text model serialization: config header, training edge ids, then one
// coefficient per line at full precision. The file stores edge ids only, so
// loading needs the node universe the ids refer to.
void save_model(const DualModel& m, const std::string& path);
DualModel load_model(const std::string& path,
                     std::shared_ptr<const std::vector<Node>> nodes);

// Shared-factorization ridge solver. Tridiagonalizes K = Q T Q^T once, after
// which each (K + q*lambda*I) a = y solve costs O(q^2) instead of O(q^3) --
// used by hyperparameter sweeps that scan many lambda values on one Gram
// matrix. Results agree with fit_closed_form to solver precision.
class RidgeSweep {
 public:
  // K must be symmetric (symmetrized internally as (K + K^T)/2).
  explicit RidgeSweep(const Eigen::MatrixXd& K);

  // Coefficients of (K + q*lambda*I) a = y.
  Eigen::VectorXd solve(const Eigen::VectorXd& y, double lambda) const;

 private:
  Eigen::MatrixXd Q_;      // orthogonal factor
  Eigen::VectorXd diag_;   // tridiagonal main diagonal
  Eigen::VectorXd sub_;    // tridiagonal subdiagonal
};

}  // namespace grel
