#include "grel/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "grel/rng.hpp"

namespace grel {

// ---------------------------------------------------------------------------
// FeatureVector
// ---------------------------------------------------------------------------

FeatureVector FeatureVector::dense(std::vector<double> values) {
  FeatureVector v;
  v.sparse_ = false;
  v.dim_ = static_cast<int>(values.size());
  v.values_ = std::move(values);
  return v;
}

FeatureVector FeatureVector::sparse(int dim,
                                    std::vector<std::pair<int, double>> entries) {
  if (dim < 0) throw std::invalid_argument("FeatureVector: negative dimension");
  int prev = -1;
  for (const auto& [idx, val] : entries) {
    (void)val;
    if (idx <= prev) {
      throw std::invalid_argument(
          "FeatureVector: sparse indices must be strictly increasing");
    }
    if (idx < 0 || idx >= dim) {
      throw std::invalid_argument("FeatureVector: sparse index out of range");
    }
    prev = idx;
  }
  FeatureVector v;
  v.sparse_ = true;
  v.dim_ = dim;
  v.entries_ = std::move(entries);
  return v;
}

std::vector<double> FeatureVector::to_dense() const {
  if (!sparse_) return values_;
  std::vector<double> out(dim_, 0.0);
  for (const auto& [idx, val] : entries_) out[idx] = val;
  return out;
}

namespace {

double dot_dense_dense(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double dot_sparse_dense(const std::vector<std::pair<int, double>>& a,
                        const std::vector<double>& b) {
  double s = 0.0;
  for (const auto& [idx, val] : a) s += val * b[idx];
  return s;
}

double dot_sparse_sparse(const std::vector<std::pair<int, double>>& a,
                         const std::vector<std::pair<int, double>>& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      s += a[i].second * b[j].second;
      ++i;
      ++j;
    }
  }
  return s;
}

}  // namespace

double FeatureVector::dot(const FeatureVector& other) const {
  if (dim_ != other.dim_) {
    throw std::invalid_argument("FeatureVector::dot: dimension mismatch");
  }
  if (!sparse_ && !other.sparse_) return dot_dense_dense(values_, other.values_);
  if (sparse_ && other.sparse_) return dot_sparse_sparse(entries_, other.entries_);
  if (sparse_) return dot_sparse_dense(entries_, other.values_);
  return dot_sparse_dense(other.entries_, values_);
}

double FeatureVector::squared_norm() const {
  if (sparse_) {
    double s = 0.0;
    for (const auto& [idx, val] : entries_) {
      (void)idx;
      s += val * val;
    }
    return s;
  }
  return dot_dense_dense(values_, values_);
}

double FeatureVector::squared_distance(const FeatureVector& other) const {
  // ||x - y||^2 = ||x||^2 + ||y||^2 - 2 <x, y>; never negative.
  double d2 = squared_norm() + other.squared_norm() - 2.0 * dot(other);
  return d2 > 0.0 ? d2 : 0.0;
}

// ---------------------------------------------------------------------------
// EdgeDataset
// ---------------------------------------------------------------------------

std::vector<Edge> EdgeDataset::edge_list() const {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (const auto& le : edges) out.push_back(le.edge);
  return out;
}

Eigen::VectorXd EdgeDataset::labels() const {
  Eigen::VectorXd y(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) y[i] = edges[i].weight;
  return y;
}

void validate_dataset(const EdgeDataset& ds) {
  if (!ds.nodes) throw std::invalid_argument("dataset: missing node collection");
  std::unordered_set<std::string> ids;
  for (const auto& node : *ds.nodes) {
    if (!ids.insert(node.id).second) {
      throw std::invalid_argument("dataset: duplicate node id '" + node.id + "'");
    }
  }
  const int n = ds.node_count();
  for (const auto& le : ds.edges) {
    if (le.edge.first < 0 || le.edge.first >= n || le.edge.second < 0 ||
        le.edge.second >= n) {
      throw std::invalid_argument("dataset: edge references unknown node");
    }
    if (!(le.weight >= 0.0 && le.weight <= 1.0)) {
      throw std::invalid_argument("dataset: edge weight outside [0, 1]");
    }
  }
}

// ---------------------------------------------------------------------------
// Nabla transform
// ---------------------------------------------------------------------------

NablaTransform NablaTransform::linear(double b) {
  if (!(b > 0.0)) throw std::invalid_argument("NablaTransform: b must be positive");
  NablaTransform t;
  t.b = b;
  t.sigma = [b](double x) { return (x + b) / (2.0 * b); };
  t.sigma_inverse = [b](double q) { return 2.0 * b * q - b; };
  return t;
}

double nabla(double x, const NablaTransform& t) {
  if (x <= -t.b) return 0.0;
  if (x >= t.b) return 1.0;
  return t.sigma(x);
}

double nabla_inverse(double q, const NablaTransform& t) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::domain_error("nabla_inverse: q must lie strictly inside (0, 1)");
  }
  return t.sigma_inverse(q);
}

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, delim)) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("cannot parse " + what + ": '" + s + "'");
  }
}

}  // namespace

std::vector<Node> read_node_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open node file: " + path);
  std::vector<Node> nodes;
  std::string line;
  int lineno = 0;
  int dim = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected id<TAB>features");
    }
    Node node;
    node.id = line.substr(0, tab);
    std::string rest = line.substr(tab + 1);
    // Sparse rows use "idx:val idx:val ..."; dense rows "f1,f2,...".
    if (rest.find(':') != std::string::npos) {
      std::vector<std::pair<int, double>> entries;
      int max_idx = -1;
      for (const auto& tok : split(rest, ' ')) {
        if (tok.empty()) continue;
        auto colon = tok.find(':');
        if (colon == std::string::npos) {
          throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                   ": malformed sparse entry '" + tok + "'");
        }
        int idx = static_cast<int>(
            parse_double(tok.substr(0, colon), "sparse index"));
        double val = parse_double(tok.substr(colon + 1), "sparse value");
        entries.emplace_back(idx, val);
        max_idx = std::max(max_idx, idx);
      }
      // Dimension is fixed by the widest row in the file; adjusted below.
      node.features = FeatureVector::sparse(max_idx + 1, std::move(entries));
      dim = std::max(dim, max_idx + 1);
    } else {
      std::vector<double> values;
      for (const auto& tok : split(rest, ',')) {
        values.push_back(parse_double(tok, "feature value"));
      }
      node.features = FeatureVector::dense(std::move(values));
      dim = std::max(dim, node.features.dim());
    }
    nodes.push_back(std::move(node));
  }
  if (nodes.empty()) throw std::runtime_error("node file is empty: " + path);
  // Re-home sparse vectors to the common dimension so dot products line up.
  for (auto& node : nodes) {
    if (node.features.is_sparse() && node.features.dim() != dim) {
      node.features = FeatureVector::sparse(dim, node.features.sparse_entries());
    }
  }
  return nodes;
}

void write_node_file(const std::string& path, const std::vector<Node>& nodes,
                     bool sparse) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  for (const auto& node : nodes) {
    out << node.id << '\t';
    if (sparse) {
      bool first = true;
      if (node.features.is_sparse()) {
        for (const auto& [idx, val] : node.features.sparse_entries()) {
          if (!first) out << ' ';
          out << idx << ':' << val;
          first = false;
        }
      } else {
        const auto& vals = node.features.dense_values();
        for (std::size_t i = 0; i < vals.size(); ++i) {
          if (vals[i] == 0.0) continue;
          if (!first) out << ' ';
          out << i << ':' << vals[i];
          first = false;
        }
      }
    } else {
      auto vals = node.features.to_dense();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out << ',';
        out << vals[i];
      }
    }
    out << '\n';
  }
}

std::vector<LabeledEdge> read_edge_file(const std::string& path,
                                        const std::vector<Node>& nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge file: " + path);
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    index[nodes[i].id] = static_cast<int>(i);
  }
  std::vector<LabeledEdge> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto parts = split(line, '\t');
    if (parts.size() != 3) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected first<TAB>second<TAB>weight");
    }
    auto it1 = index.find(parts[0]);
    auto it2 = index.find(parts[1]);
    if (it1 == index.end() || it2 == index.end()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": edge references unknown node id");
    }
    double w = parse_double(parts[2], "edge weight");
    edges.push_back({{it1->second, it2->second}, w});
  }
  return edges;
}

void write_edge_file(const std::string& path, const std::vector<Node>& nodes,
                     const std::vector<LabeledEdge>& edges) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.precision(17);
  for (const auto& le : edges) {
    out << nodes.at(le.edge.first).id << '\t' << nodes.at(le.edge.second).id
        << '\t' << le.weight << '\n';
  }
}

RelationMatrix read_relation_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> ids;
  std::string line;
  bool has_ids = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ls >> tok) toks.push_back(tok);
    if (toks.empty()) continue;
    // A non-numeric first token names the row.
    std::size_t start = 0;
    try {
      std::size_t pos = 0;
      (void)std::stod(toks[0], &pos);
      if (pos != toks[0].size()) throw std::invalid_argument(toks[0]);
    } catch (const std::exception&) {
      has_ids = true;
      start = 1;
    }
    if (has_ids && start == 0) {
      throw std::runtime_error(path + ": inconsistent row labels");
    }
    if (start == 1) ids.push_back(toks[0]);
    std::vector<double> row;
    for (std::size_t i = start; i < toks.size(); ++i) {
      row.push_back(parse_double(toks[i], "matrix entry"));
    }
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw std::runtime_error("matrix file is empty: " + path);
  RelationMatrix Q;
  Q.values.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) {
      throw std::runtime_error(path + ": matrix is not square");
    }
    for (int j = 0; j < n; ++j) Q.values(i, j) = rows[i][j];
  }
  if (has_ids) {
    if (static_cast<int>(ids.size()) != n) {
      throw std::runtime_error(path + ": inconsistent row labels");
    }
    Q.ids = std::move(ids);
  } else {
    for (int i = 0; i < n; ++i) Q.ids.push_back("n" + std::to_string(i));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(Q.values(i, j))) {
        throw std::runtime_error(path + ": non-finite matrix entry");
      }
    }
  }
  return Q;
}

// ---------------------------------------------------------------------------
// Seed derivation (rng.hpp)
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index * 0xA24BAED4963EE407ULL + 1));
}

}  // namespace grel
