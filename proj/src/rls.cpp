#include "grel/rls.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace grel {

namespace {

void check_finite(const Eigen::MatrixXd& M, const char* what) {
  if (!M.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite values");
  }
}

}  // namespace

Eigen::VectorXd fit_closed_form(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                double lambda) {
  if (K.rows() != K.cols()) {
    throw std::invalid_argument("fit_closed_form: K must be square");
  }
  if (K.rows() != y.size()) {
    throw std::invalid_argument("fit_closed_form: K and y sizes disagree");
  }
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("fit_closed_form: lambda must be positive");
  }
  check_finite(K, "fit_closed_form: K");
  check_finite(y, "fit_closed_form: y");

  const double q = static_cast<double>(K.rows());
  Eigen::MatrixXd A = 0.5 * (K + K.transpose());
  A.diagonal().array() += q * lambda;
  Eigen::LDLT<Eigen::MatrixXd> solver(A);
  Eigen::VectorXd a = solver.solve(y);

  double ynorm = y.norm();
  double resid = (A * a - y).norm();
  if (!(resid <= 1e-6 * std::max(ynorm, 1e-300))) {
    if (ynorm == 0.0 && resid == 0.0) return a;  // y = 0 => a = 0 exactly
    throw std::runtime_error("fit_closed_form: system too ill-conditioned "
                             "(relative residual above 1e-6)");
  }
  return a;
}

DualModel fit_closed_form(const EdgeDataset& train, const EdgeKernelConfig& cfg,
                          double lambda, FitReport* report) {
  DualModel m;
  m.nodes = train.nodes;
  m.edges = train.edge_list();
  m.config = cfg;
  Eigen::MatrixXd K = edge_gram(*train.nodes, m.edges, m.edges, cfg);
  m.a = fit_closed_form(K, train.labels(), lambda);
  if (report) {
    report->method = FitMethod::closed_form;
    report->iterations = 0;
    report->final_val_mse = 0.0;
    report->lambda = lambda;
  }
  return m;
}

CgFit fit_cg_early_stopping(const Eigen::MatrixXd& K_train,
                            const Eigen::VectorXd& y_train,
                            const Eigen::MatrixXd& K_val_train,
                            const Eigen::VectorXd& y_val, int patience,
                            int max_iterations) {
  if (patience < 1) {
    throw std::invalid_argument("fit_cg_early_stopping: patience must be >= 1");
  }
  if (K_train.rows() != K_train.cols() || K_train.rows() != y_train.size() ||
      K_val_train.cols() != K_train.rows() || K_val_train.rows() != y_val.size()) {
    throw std::invalid_argument("fit_cg_early_stopping: dimension mismatch");
  }
  check_finite(K_train, "fit_cg_early_stopping: K_train");
  check_finite(K_val_train, "fit_cg_early_stopping: K_val_train");

  // CG on the unregularized system K a = y; regularization comes from
  // stopping early at the iterate with the best validation MSE.
  const Eigen::MatrixXd K = 0.5 * (K_train + K_train.transpose());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(K.rows());
  Eigen::VectorXd r = y_train;  // residual of the zero start
  Eigen::VectorXd p = r;
  double rs = r.dot(r);

  CgFit fit;
  fit.a = a;
  fit.best_iteration = 0;
  fit.best_val_mse = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  int it = 0;
  while (it < max_iterations) {
    ++it;
    Eigen::VectorXd Kp = K * p;
    double denom = p.dot(Kp);
    if (!(denom > 0.0) || !std::isfinite(denom)) {
      // K is (numerically) singular along p; nothing further to gain.
      break;
    }
    double alpha = rs / denom;
    a += alpha * p;
    r -= alpha * Kp;
    if (!a.allFinite()) {
      throw std::runtime_error("fit_cg_early_stopping: non-finite iterate");
    }

    double val_mse = mse(K_val_train * a, y_val);
    if (val_mse < fit.best_val_mse) {  // strict: ties keep the earliest iterate
      fit.best_val_mse = val_mse;
      fit.a = a;
      fit.best_iteration = it;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    if (since_improvement >= patience) break;

    double rs_new = r.dot(r);
    // Residual converged: the system is solved to machine precision and
    // further iterates would only chase rounding noise.
    if (rs_new < 1e-28 * std::max(1.0, y_train.squaredNorm())) break;
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  fit.iterations = it > 0 ? it : 1;
  if (fit.best_iteration == 0) {
    // Degenerate system (e.g. y = 0): no iterate beat the +inf sentinel.
    fit.best_val_mse = mse(K_val_train * fit.a, y_val);
  }
  return fit;
}

DualModel fit_cg_early_stopping(const EdgeDataset& train, const EdgeDataset& val,
                                const EdgeKernelConfig& cfg, int patience,
                                FitReport* report) {
  DualModel m;
  m.nodes = train.nodes;
  m.edges = train.edge_list();
  m.config = cfg;
  std::vector<Edge> val_edges = val.edge_list();
  Eigen::MatrixXd K = edge_gram(*train.nodes, m.edges, m.edges, cfg);
  Eigen::MatrixXd Kv = edge_gram(*val.nodes, val_edges, *train.nodes, m.edges, cfg);
  CgFit fit = fit_cg_early_stopping(K, train.labels(), Kv, val.labels(), patience);
  m.a = fit.a;
  if (report) {
    report->method = FitMethod::cg_early_stop;
    report->iterations = fit.iterations;
    report->final_val_mse = fit.best_val_mse;
    report->lambda = 0.0;
  }
  return m;
}

Eigen::VectorXd predict(const DualModel& m, const std::vector<Node>& nodes,
                        const std::vector<Edge>& edges) {
  if (!m.nodes) throw std::invalid_argument("predict: model has no node universe");
  // All pairwise kernels are symmetric as kernels, so the test x train Gram
  // can be assembled with the test edges on the left.
  Eigen::MatrixXd Kt = edge_gram(nodes, edges, *m.nodes, m.edges, m.config);
  return Kt * m.a;
}

double mean_predictor(const Eigen::VectorXd& y_train) {
  if (y_train.size() == 0) {
    throw std::invalid_argument("mean_predictor: empty label vector");
  }
  return y_train.mean();
}

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
  if (pred.size() != y.size()) {
    throw std::invalid_argument("mse: size mismatch");
  }
  if (pred.size() == 0) throw std::invalid_argument("mse: empty vectors");
  return (pred - y).squaredNorm() / static_cast<double>(pred.size());
}

// ---------------------------------------------------------------------------
// Serialization: config header + training edge ids + coefficients.
// ---------------------------------------------------------------------------

void save_model(const DualModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  out << "grel-model 1\n";
  out << "pairwise " << to_string(m.config.pairwise) << '\n';
  out << "node_kernel "
      << (m.config.node.kind == NodeKernelKind::linear ? "linear" : "gaussian_rbf")
      << '\n';
  out << "gamma " << m.config.node.gamma << '\n';
  out << "q " << m.edges.size() << '\n';
  out << "edges\n";
  const auto& nodes = *m.nodes;
  for (const auto& e : m.edges) {
    out << nodes.at(e.first).id << '\t' << nodes.at(e.second).id << '\n';
  }
  out << "coefficients\n";
  for (Eigen::Index i = 0; i < m.a.size(); ++i) out << m.a[i] << '\n';
}

DualModel load_model(const std::string& path,
                     std::shared_ptr<const std::vector<Node>> nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  auto expect = [&](const std::string& key) {
    std::string line;
    if (!std::getline(in, line) || line.rfind(key, 0) != 0) {
      throw std::runtime_error(path + ": malformed model file (expected '" + key +
                               "')");
    }
    return line.size() > key.size() + 1 ? line.substr(key.size() + 1)
                                        : std::string();
  };
  std::string magic;
  std::getline(in, magic);
  if (magic != "grel-model 1") {
    throw std::runtime_error(path + ": not a grel model file");
  }
  DualModel m;
  m.config.pairwise = pairwise_kind_from_string(expect("pairwise"));
  std::string nk = expect("node_kernel");
  if (nk == "linear") {
    m.config.node.kind = NodeKernelKind::linear;
  } else if (nk == "gaussian_rbf") {
    m.config.node.kind = NodeKernelKind::gaussian_rbf;
  } else {
    throw std::runtime_error(path + ": unknown node kernel '" + nk + "'");
  }
  m.config.node.gamma = std::stod(expect("gamma"));
  std::size_t q = static_cast<std::size_t>(std::stoul(expect("q")));
  expect("edges");

  if (!nodes) throw std::invalid_argument("load_model: node universe required");
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < nodes->size(); ++i) {
    index[(*nodes)[i].id] = static_cast<int>(i);
  }
  m.nodes = std::move(nodes);
  for (std::size_t i = 0; i < q; ++i) {
    std::string line;
    if (!std::getline(in, line)) {
      throw std::runtime_error(path + ": truncated edge list");
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path + ": malformed edge line");
    }
    auto it1 = index.find(line.substr(0, tab));
    auto it2 = index.find(line.substr(tab + 1));
    if (it1 == index.end() || it2 == index.end()) {
      throw std::runtime_error(path + ": model edge references unknown node id");
    }
    m.edges.push_back({it1->second, it2->second});
  }
  expect("coefficients");
  m.a.resize(static_cast<Eigen::Index>(q));
  for (std::size_t i = 0; i < q; ++i) {
    std::string line;
    if (!std::getline(in, line)) {
      throw std::runtime_error(path + ": truncated coefficient list");
    }
    m.a[static_cast<Eigen::Index>(i)] = std::stod(line);
  }
  return m;
}

// ---------------------------------------------------------------------------
// RidgeSweep
// ---------------------------------------------------------------------------

RidgeSweep::RidgeSweep(const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols()) {
    throw std::invalid_argument("RidgeSweep: K must be square");
  }
  check_finite(K, "RidgeSweep: K");
  Eigen::MatrixXd S = 0.5 * (K + K.transpose());
  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(S);
  Q_ = tri.matrixQ();
  diag_ = tri.diagonal();
  sub_ = tri.subDiagonal();
}

Eigen::VectorXd RidgeSweep::solve(const Eigen::VectorXd& y, double lambda) const {
  const Eigen::Index n = diag_.size();
  if (y.size() != n) throw std::invalid_argument("RidgeSweep::solve: size mismatch");
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("RidgeSweep::solve: lambda must be positive");
  }
  const double shift = static_cast<double>(n) * lambda;

  // Solve (T + shift I) w = Q^T y by symmetric tridiagonal LDL^T.
  Eigen::VectorXd z = Q_.transpose() * y;
  Eigen::VectorXd d(n), l(std::max<Eigen::Index>(n - 1, 0));
  d[0] = diag_[0] + shift;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (!(d[i - 1] > 0.0)) {
      throw std::runtime_error("RidgeSweep::solve: matrix not positive definite "
                               "at this lambda");
    }
    l[i - 1] = sub_[i - 1] / d[i - 1];
    d[i] = diag_[i] + shift - l[i - 1] * sub_[i - 1];
  }
  if (!(d[n - 1] > 0.0)) {
    throw std::runtime_error("RidgeSweep::solve: matrix not positive definite "
                             "at this lambda");
  }
  // Forward: L c = z, then scale by D, then back: L^T w = c.
  Eigen::VectorXd w = z;
  for (Eigen::Index i = 1; i < n; ++i) w[i] -= l[i - 1] * w[i - 1];
  for (Eigen::Index i = 0; i < n; ++i) w[i] /= d[i];
  for (Eigen::Index i = n - 2; i >= 0; --i) w[i] -= l[i] * w[i + 1];

  return Q_ * w;
}

}  // namespace grel
