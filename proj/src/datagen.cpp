#include "grel/datagen.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "grel/rng.hpp"

namespace grel {

std::vector<Node> gen_bernoulli_nodes(int n, int d, double p, std::uint64_t seed) {
  if (n < 0 || d < 0) throw std::invalid_argument("gen_bernoulli_nodes: n, d >= 0");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("gen_bernoulli_nodes: p outside [0, 1]");
  }
  Rng rng(seed);
  std::vector<Node> nodes;
  nodes.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> values(d);
    for (int j = 0; j < d; ++j) values[j] = rng.bernoulli(p) ? 1.0 : 0.0;
    nodes.push_back({"v" + std::to_string(i), FeatureVector::dense(std::move(values))});
  }
  return nodes;
}

std::vector<Node> flip_noise(const std::vector<Node>& nodes, double rate,
                             std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("flip_noise: rate outside [0, 1]");
  }
  Rng rng(seed);
  std::vector<Node> out;
  out.reserve(nodes.size());
  for (const auto& node : nodes) {
    std::vector<double> values = node.features.to_dense();
    for (double& v : values) {
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("flip_noise: features must be binary");
      }
      if (rng.bernoulli(rate)) v = 1.0 - v;
    }
    out.push_back({node.id, FeatureVector::dense(std::move(values))});
  }
  return out;
}

double set_similarity(const FeatureVector& A, const FeatureVector& B,
                      const SimilarityParams& p) {
  if (A.dim() != B.dim()) {
    throw std::invalid_argument("set_similarity: dimension mismatch");
  }
  // Delta = |A \ B| + |B \ A|, delta = |A and B|, nu = |not A and not B|.
  std::vector<double> a = A.to_dense();
  std::vector<double> b = B.to_dense();
  int sym_diff = 0, both = 0, neither = 0;
  for (int i = 0; i < A.dim(); ++i) {
    bool ina = a[i] != 0.0;
    bool inb = b[i] != 0.0;
    if (ina && inb) ++both;
    else if (!ina && !inb) ++neither;
    else ++sym_diff;
  }
  double num = p.t * sym_diff + p.u * both + p.v * neither;
  double den = p.t_prime * sym_diff + p.u * both + p.v * neither;
  if (den == 0.0) {
    throw std::domain_error("set_similarity: zero denominator for this pair");
  }
  return num / den;
}

SpeciesPool gen_species(int n, int k, std::uint64_t seed) {
  if (n <= 0 || k <= 0) throw std::invalid_argument("gen_species: n, k > 0");
  Rng rng(seed);
  SpeciesPool pool;
  pool.factors.resize(n, k);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) pool.factors(i, j) = rng.uniform01();
  }
  return pool;
}

double dominance_prob(const Eigen::VectorXd& f, const Eigen::VectorXd& f2) {
  if (f.size() != f2.size() || f.size() == 0) {
    throw std::invalid_argument("dominance_prob: factor vectors must match");
  }
  double wins = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    double diff = f[i] - f2[i];
    if (diff > 0.0) wins += 1.0;
    else if (diff == 0.0) wins += 0.5;  // H(0) = 1/2 keeps the relation reciprocal
  }
  return wins / static_cast<double>(f.size());
}

BowCorpus load_bow_corpus(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path root(path);
  if (!fs::is_directory(root)) {
    throw std::runtime_error("load_bow_corpus: not a directory: " + path);
  }

  // Collect (label, file) pairs: top-level files have an empty label; files
  // one level down take their subdirectory's name.
  std::vector<std::pair<std::string, fs::path>> files;
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_regular_file()) files.emplace_back("", entry.path());
    else if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& dir : subdirs) {
    std::vector<fs::path> inner;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) inner.push_back(entry.path());
    }
    std::sort(inner.begin(), inner.end());
    for (const auto& f : inner) files.emplace_back(dir.filename().string(), f);
  }
  std::sort(files.begin(), files.end(),
            [](const auto& x, const auto& y) { return x.second < y.second; });
  if (files.empty()) throw std::runtime_error("load_bow_corpus: empty corpus");

  // First pass: tokenize (lowercase, split on non-alphanumeric) and count.
  std::vector<std::unordered_map<std::string, int>> doc_counts;
  doc_counts.reserve(files.size());
  std::map<std::string, int> vocab_index;  // ordered => stable vocabulary ids
  for (const auto& [label, file] : files) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("load_bow_corpus: cannot read " + file.string());
    std::unordered_map<std::string, int> counts;
    std::string word;
    char c;
    auto flush_word = [&]() {
      if (!word.empty()) {
        ++counts[word];
        vocab_index.emplace(word, 0);
        word.clear();
      }
    };
    while (in.get(c)) {
      unsigned char uc = static_cast<unsigned char>(c);
      if (std::isalnum(uc)) word.push_back(static_cast<char>(std::tolower(uc)));
      else flush_word();
    }
    flush_word();
    doc_counts.push_back(std::move(counts));
  }

  BowCorpus corpus;
  int next_id = 0;
  for (auto& [word, id] : vocab_index) {
    id = next_id++;
    corpus.vocabulary.push_back(word);
  }
  const int dim = next_id;
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::vector<std::pair<int, double>> entries;
    entries.reserve(doc_counts[i].size());
    for (const auto& [word, count] : doc_counts[i]) {
      entries.emplace_back(vocab_index.at(word), static_cast<double>(count));
    }
    std::sort(entries.begin(), entries.end());
    Node doc;
    doc.id = files[i].second.filename().string();
    // Disambiguate duplicate filenames across subdirectories.
    if (!files[i].first.empty()) doc.id = files[i].first + "/" + doc.id;
    doc.features = FeatureVector::sparse(dim, std::move(entries));
    corpus.docs.push_back(std::move(doc));
    corpus.labels.push_back(files[i].first);
  }
  return corpus;
}

int common_words_label(const Node& d1, const Node& d2) {
  // Distinct word types with positive count in both documents.
  const auto count_common = [](const std::vector<std::pair<int, double>>& a,
                               const std::vector<std::pair<int, double>>& b) {
    int n = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i].first < b[j].first) ++i;
      else if (a[i].first > b[j].first) ++j;
      else {
        if (a[i].second > 0.0 && b[j].second > 0.0) ++n;
        ++i;
        ++j;
      }
    }
    return n;
  };
  if (d1.features.is_sparse() && d2.features.is_sparse()) {
    return count_common(d1.features.sparse_entries(), d2.features.sparse_entries());
  }
  if (d1.features.dim() != d2.features.dim()) {
    throw std::invalid_argument("common_words_label: dimension mismatch");
  }
  std::vector<double> a = d1.features.to_dense();
  std::vector<double> b = d2.features.to_dense();
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0 && b[i] > 0.0) ++n;
  }
  return n;
}

}  // namespace grel
