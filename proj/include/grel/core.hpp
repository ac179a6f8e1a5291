#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

// Domain types shared by all modules, plus the nabla transform between
// real-valued and [0,1]-valued relations.

namespace grel {

// Feature vector with a dense or sparse (coordinate-list) representation.
// Both forms of the same vector produce identical dot products.
class FeatureVector {
 public:
  FeatureVector() = default;

  static FeatureVector dense(std::vector<double> values);
  // entries must have strictly increasing indices, all within [0, dim).
  static FeatureVector sparse(int dim, std::vector<std::pair<int, double>> entries);

  bool is_sparse() const { return sparse_; }
  int dim() const { return dim_; }

  // Dense view of the vector (materializes sparse entries).
  std::vector<double> to_dense() const;
  const std::vector<double>& dense_values() const { return values_; }
  const std::vector<std::pair<int, double>>& sparse_entries() const { return entries_; }

  double dot(const FeatureVector& other) const;
  double squared_norm() const;
  // ||x - y||^2, used by the Gaussian RBF kernel.
  double squared_distance(const FeatureVector& other) const;

 private:
  bool sparse_ = false;
  int dim_ = 0;
  std::vector<double> values_;                     // dense storage
  std::vector<std::pair<int, double>> entries_;    // sparse storage
};

struct Node {
  std::string id;  // unique within a dataset
  FeatureVector features;
};

// Ordered pair of node references (indices into the owning node list).
struct Edge {
  int first = 0;
  int second = 0;
};

struct LabeledEdge {
  Edge edge;
  double weight = 0.0;  // in [0, 1]
};

// Nodes plus a multiset of labeled edges; duplicate edges are legal
// (repeated measurements of the same pair).
struct EdgeDataset {
  std::shared_ptr<const std::vector<Node>> nodes;
  std::vector<LabeledEdge> edges;

  int node_count() const { return nodes ? static_cast<int>(nodes->size()) : 0; }
  int edge_count() const { return static_cast<int>(edges.size()); }
  std::vector<Edge> edge_list() const;
  Eigen::VectorXd labels() const;
};

// Validates id uniqueness and edge references; throws std::invalid_argument.
void validate_dataset(const EdgeDataset& ds);

// Increasing isomorphism sigma: [-b, b] -> [0, 1] with sigma(x) = 1 - sigma(-x),
// extended to the whole real line by clipping. Default sigma is linear.
struct NablaTransform {
  double b = 1.0;
  std::function<double(double)> sigma;          // on [-b, b]
  std::function<double(double)> sigma_inverse;  // on (0, 1)

  static NablaTransform linear(double b = 1.0);
};

// nabla(x) = 0 for x <= -b, sigma(x) on (-b, b), 1 for x >= b.
double nabla(double x, const NablaTransform& t);
// Inverse on (0, 1); q in {0, 1} is rejected (clipped region boundary).
double nabla_inverse(double q, const NablaTransform& t);

// Square matrix of relation values Q(v_i, v_j) over an ordered node-id list.
struct RelationMatrix {
  std::vector<std::string> ids;
  Eigen::MatrixXd values;

  int size() const { return static_cast<int>(ids.size()); }
};

// ---------------------------------------------------------------------------
// Line-oriented text formats.
//   node file:        id<TAB>f1,f2,...,fd
//   sparse node file: id<TAB>idx:val idx:val ...
//   edge file:        first_id<TAB>second_id<TAB>weight
// ---------------------------------------------------------------------------

std::vector<Node> read_node_file(const std::string& path);
void write_node_file(const std::string& path, const std::vector<Node>& nodes,
                     bool sparse = false);

// Edges are resolved against `nodes` by id; unknown ids are an error.
std::vector<LabeledEdge> read_edge_file(const std::string& path,
                                        const std::vector<Node>& nodes);
void write_edge_file(const std::string& path, const std::vector<Node>& nodes,
                     const std::vector<LabeledEdge>& edges);

// Whitespace-delimited square matrix, one row per line; first token per line
// may be a node id (all-numeric rows are treated as id-less).
RelationMatrix read_relation_matrix(const std::string& path);

}  // namespace grel
