// grel command-line tool: dataset generation, model fitting/prediction,
// relation-property reports, and the benchmark experiments.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "grel/core.hpp"
#include "grel/datagen.hpp"
#include "grel/experiments.hpp"
#include "grel/relation_properties.hpp"
#include "grel/rls.hpp"
#include "grel/rng.hpp"

namespace {

using namespace grel;

const std::map<std::string, SimilarityParams> kMembers = {
    {"intransitive", kIntransitiveMember},
    {"jaccard", kJaccardMember},
    {"product", kProductMember},
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

struct GenNodesOpts {
  int n = 100, dim = 20;
  double p = 0.5;
  std::uint64_t seed = 0;
  std::string out;
  bool sparse = false;
};

int run_gen_nodes(const GenNodesOpts& o) {
  write_node_file(o.out, gen_bernoulli_nodes(o.n, o.dim, o.p, o.seed), o.sparse);
  std::cout << "wrote " << o.n << " nodes to " << o.out << "\n";
  return 0;
}

struct GenFlipOpts {
  std::string nodes, out;
  double rate = 0.1;
  std::uint64_t seed = 0;
};

int run_gen_flip(const GenFlipOpts& o) {
  std::vector<Node> nodes = read_node_file(o.nodes);
  write_node_file(o.out, flip_noise(nodes, o.rate, o.seed));
  std::cout << "wrote " << nodes.size() << " noisy nodes to " << o.out << "\n";
  return 0;
}

struct GenSpeciesOpts {
  int n = 400, k = 10;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen_species(const GenSpeciesOpts& o) {
  SpeciesPool pool = gen_species(o.n, o.k, o.seed);
  std::vector<Node> nodes;
  nodes.reserve(o.n);
  for (int i = 0; i < o.n; ++i) {
    Eigen::VectorXd row = pool.factors.row(i).transpose();
    nodes.push_back({"s" + std::to_string(i),
                     FeatureVector::dense({row.data(), row.data() + row.size()})});
  }
  write_node_file(o.out, nodes);
  std::cout << "wrote " << o.n << " species to " << o.out << "\n";
  return 0;
}

struct GenEdgesOpts {
  std::string nodes, out, labeler = "none";
  int q = 0;
  std::uint64_t seed = 0;
  bool include_self = false;
};

int run_gen_edges(const GenEdgesOpts& o) {
  std::vector<Node> nodes = read_node_file(o.nodes);
  std::vector<Edge> edges = sample_edges(static_cast<int>(nodes.size()), o.q,
                                         o.seed, !o.include_self);
  std::vector<LabeledEdge> labeled;
  labeled.reserve(edges.size());
  for (const Edge& e : edges) {
    double w = 0.0;
    if (o.labeler == "dominance") {
      std::vector<double> fd = nodes[e.first].features.to_dense();
      std::vector<double> gd = nodes[e.second].features.to_dense();
      w = dominance_prob(Eigen::Map<Eigen::VectorXd>(fd.data(), fd.size()),
                         Eigen::Map<Eigen::VectorXd>(gd.data(), gd.size()));
    } else if (o.labeler != "none") {
      w = set_similarity(nodes[e.first].features, nodes[e.second].features,
                         kMembers.at(o.labeler));
    }
    labeled.push_back({e, w});
  }
  write_edge_file(o.out, nodes, labeled);
  std::cout << "wrote " << labeled.size() << " edges to " << o.out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit / predict
// ---------------------------------------------------------------------------

struct FitOpts {
  std::string train_nodes, train_edges, out;
  std::string pairwise = "kron", node_kernel = "linear";
  double gamma = 1.0, lambda = 1.0;
  bool cg = false;
  std::string val_nodes, val_edges;
  int patience = 10;
};

EdgeDataset load_dataset(const std::string& node_path, const std::string& edge_path) {
  auto nodes = std::make_shared<std::vector<Node>>(read_node_file(node_path));
  EdgeDataset ds{nodes, read_edge_file(edge_path, *nodes)};
  validate_dataset(ds);
  return ds;
}

int run_fit(const FitOpts& o) {
  EdgeDataset train = load_dataset(o.train_nodes, o.train_edges);
  EdgeKernelConfig cfg;
  cfg.pairwise = pairwise_kind_from_string(o.pairwise);
  if (o.node_kernel == "linear") {
    cfg.node = {NodeKernelKind::linear, 1.0};
  } else if (o.node_kernel == "gaussian_rbf") {
    cfg.node = {NodeKernelKind::gaussian_rbf, o.gamma};
  } else {
    throw std::invalid_argument("unknown node kernel: " + o.node_kernel);
  }

  FitReport report;
  DualModel model;
  if (o.cg) {
    if (o.val_nodes.empty() || o.val_edges.empty()) {
      throw std::invalid_argument("--cg requires --val-nodes and --val-edges");
    }
    EdgeDataset val = load_dataset(o.val_nodes, o.val_edges);
    model = fit_cg_early_stopping(train, val, cfg, o.patience, &report);
    std::cout << "method: cg_early_stop\niterations: " << report.iterations
              << "\nfinal_val_mse: " << report.final_val_mse << "\n";
  } else {
    model = fit_closed_form(train, cfg, o.lambda, &report);
    std::cout << "method: closed_form\nlambda: " << report.lambda << "\n";
  }
  save_model(model, o.out);
  std::cout << "q: " << train.edge_count() << "\nmodel: " << o.out << "\n";
  return 0;
}

struct PredictOpts {
  std::string model, train_nodes, nodes, edges, out;
};

int run_predict(const PredictOpts& o) {
  auto train_nodes =
      std::make_shared<std::vector<Node>>(read_node_file(o.train_nodes));
  DualModel model = load_model(o.model, train_nodes);
  std::vector<Node> universe =
      o.nodes.empty() ? *train_nodes : read_node_file(o.nodes);
  std::vector<LabeledEdge> labeled = read_edge_file(o.edges, universe);

  std::vector<Edge> edges;
  Eigen::VectorXd y(labeled.size());
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    edges.push_back(labeled[i].edge);
    y[i] = labeled[i].weight;
  }
  Eigen::VectorXd pred = predict(model, universe, edges);

  std::vector<LabeledEdge> out_edges;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out_edges.push_back({edges[i], pred[i]});
  }
  write_edge_file(o.out, universe, out_edges);
  std::cout << "predictions: " << o.out << "\nmse_vs_input_weights: "
            << mse(pred, y) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// props
// ---------------------------------------------------------------------------

struct PropsOpts {
  std::string matrix;
  double tol = kExactTol;
  double threshold = 0.5;
};

void print_violations(const ViolationReport& r, const RelationMatrix& Q) {
  if (r.holds()) {
    std::cout << "yes\n";
    return;
  }
  const auto& t = r.triples.front();
  std::cout << "no (" << r.triples.size() << " violating triples, max margin "
            << r.max_violation << ", first " << Q.ids[t[0]] << "," << Q.ids[t[1]]
            << "," << Q.ids[t[2]] << ")\n";
}

int run_props(const PropsOpts& o) {
  RelationMatrix Q = read_relation_matrix(o.matrix);
  std::cout << "nodes: " << Q.size() << "\ntolerance: " << o.tol << "\n";
  const bool sym = is_symmetric(Q, o.tol);
  const bool rec = is_reciprocal(Q, o.tol);
  std::cout << "symmetric: " << (sym ? "yes" : "no") << "\n";
  std::cout << "reciprocal: " << (rec ? "yes" : "no") << "\n";

  const std::pair<const char*, TNorm> tnorms[] = {
      {"T_M(min)", TNorm::minimum},
      {"T_P(product)", TNorm::product},
      {"T_L(lukasiewicz)", TNorm::lukasiewicz},
  };
  for (const auto& [name, t] : tnorms) {
    std::cout << name << "-transitive: ";
    print_violations(check_t_transitivity(Q, t, o.tol), Q);
  }
  const std::pair<const char*, StochasticTransitivityKind> kinds[] = {
      {"weak", StochasticTransitivityKind::weak},
      {"moderate", StochasticTransitivityKind::moderate},
      {"strong", StochasticTransitivityKind::strong},
  };
  for (const auto& [name, k] : kinds) {
    std::cout << name << "-stochastic-transitive: ";
    print_violations(check_stochastic_transitivity(Q, k, o.tol), Q);
  }

  RankingResult rank = topological_ranking(Q, o.threshold);
  if (rank.acyclic) {
    std::cout << "ranking(threshold " << o.threshold << "): ";
    for (std::size_t i = 0; i < rank.order.size(); ++i) {
      std::cout << (i ? " > " : "") << Q.ids[rank.order[i]];
    }
    std::cout << "\n";
  } else {
    std::cout << "ranking(threshold " << o.threshold << "): cycle ";
    for (int idx : rank.cycle) std::cout << Q.ids[idx] << " -> ";
    std::cout << Q.ids[rank.cycle.front()] << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// exp
// ---------------------------------------------------------------------------

struct ExpOpts {
  std::string name;  // table2 | table3 | table4 | newsgroups
  std::string member = "intransitive";
  std::string corpus, out;
  std::vector<int> sizes = {100, 200, 400, 800, 1600};
  std::vector<std::string> methods;  // empty = experiment default
  int reps = 100, threads = 1;
  std::uint64_t seed = 0;
};

void print_summary(const std::vector<ExperimentResult>& results) {
  std::cout << "method\tmean_mse\n";
  for (const auto& r : results) std::cout << r.method << '\t' << r.mean_mse << '\n';
}

int run_exp(const ExpOpts& o) {
  std::vector<std::string> metadata = {
      "experiment " + o.name,
      "seed " + std::to_string(o.seed),
  };

  if (o.name == "newsgroups") {
    if (o.corpus.empty()) {
      throw std::invalid_argument("exp newsgroups requires --corpus");
    }
    BowCorpus corpus = load_bow_corpus(o.corpus);
    std::vector<std::string> methods =
        o.methods.empty() ? std::vector<std::string>{"mpred", "kron", "kron_sym"}
                          : o.methods;
    std::vector<SizeCurve> curves =
        run_document_experiment(corpus, o.sizes, o.seed, methods);
    std::ostringstream sizes_line;
    sizes_line << "sizes";
    for (int s : o.sizes) sizes_line << ' ' << s;
    metadata.push_back("corpus " + o.corpus);
    metadata.push_back("documents " + std::to_string(corpus.docs.size()));
    metadata.push_back(sizes_line.str());
    metadata.push_back("validation_edges " +
                       std::to_string(*std::max_element(o.sizes.begin(),
                                                        o.sizes.end())));
    metadata.push_back("methods " + join(methods, " "));
    write_curves_file(o.out, curves, metadata);
    std::cout << "method\tsize\tmse\n";
    for (const auto& c : curves) {
      for (std::size_t i = 0; i < c.sizes.size(); ++i) {
        std::cout << c.method << '\t' << c.sizes[i] << '\t' << c.mses[i] << '\n';
      }
    }
    std::cout << "results: " << o.out << "\n";
    return 0;
  }

  metadata.push_back("reps " + std::to_string(o.reps));
  std::vector<ExperimentResult> results;
  if (o.name == "table2" || o.name == "table3") {
    SimilarityParams member = kMembers.at(o.member);
    metadata.push_back("member " + o.member);
    if (o.name == "table2") {
      std::vector<std::string> methods =
          o.methods.empty()
              ? std::vector<std::string>{"mpred", "kron", "kron_sym", "mlpk",
                                         "cartesian", "cartesian_sym"}
              : o.methods;
      metadata.push_back("methods " + join(methods, " "));
      results = run_partial_graph_experiment(member, methods, o.reps, o.seed,
                                             o.threads);
    } else {
      std::vector<std::string> methods =
          o.methods.empty()
              ? std::vector<std::string>{"mpred", "kron", "kron_sym", "mlpk"}
              : o.methods;
      metadata.push_back("methods " + join(methods, " "));
      results = run_new_nodes_experiment(member, methods, o.reps, o.seed,
                                         o.threads);
    }
  } else if (o.name == "table4") {
    std::vector<std::string> methods =
        o.methods.empty()
            ? std::vector<std::string>{"mpred", "kron", "kron_rec", "mlpk"}
            : o.methods;
    metadata.push_back("methods " + join(methods, " "));
    results = run_species_experiment(methods, o.reps, o.seed, o.threads);
    // Pairwise significance of per-repetition MSE differences.
    if (o.reps >= 5) {
      std::vector<double> pvals;
      std::vector<std::string> pairs;
      for (std::size_t i = 0; i < results.size(); ++i) {
        for (std::size_t j = i + 1; j < results.size(); ++j) {
          pvals.push_back(wilcoxon_signed_rank(results[i].mses, results[j].mses));
          pairs.push_back(results[i].method + " vs " + results[j].method);
        }
      }
      std::vector<bool> sig = bonferroni(pvals);
      for (std::size_t i = 0; i < pvals.size(); ++i) {
        std::ostringstream line;
        line.precision(17);
        line << "wilcoxon " << pairs[i] << " p " << pvals[i]
             << (sig[i] ? " significant" : " not-significant");
        metadata.push_back(line.str());
        std::cout << line.str() << "\n";
      }
    }
  } else {
    throw std::invalid_argument("unknown experiment: " + o.name);
  }

  write_results_file(o.out, results, metadata);
  print_summary(results);
  std::cout << "results: " << o.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::cout.precision(17);
  CLI::App app{"learning graded relations with pairwise kernels"};
  app.require_subcommand(1);

  // gen ----------------------------------------------------------------
  CLI::App* gen = app.add_subcommand("gen", "generate datasets");
  gen->require_subcommand(1);

  GenNodesOpts gn;
  CLI::App* gen_nodes = gen->add_subcommand("nodes", "random binary-feature nodes");
  gen_nodes->add_option("--n", gn.n, "node count")->capture_default_str();
  gen_nodes->add_option("--dim", gn.dim, "feature dimension")->capture_default_str();
  gen_nodes->add_option("--p", gn.p, "Bernoulli parameter")->capture_default_str();
  gen_nodes->add_option("--seed", gn.seed, "rng seed")->capture_default_str();
  gen_nodes->add_option("--out", gn.out, "output node file")->required();
  gen_nodes->add_flag("--sparse", gn.sparse, "write sparse idx:val format");

  GenFlipOpts gf;
  CLI::App* gen_flip = gen->add_subcommand("flip", "flip binary features (noise)");
  gen_flip->add_option("--nodes", gf.nodes, "input node file")->required();
  gen_flip->add_option("--rate", gf.rate, "flip probability")->capture_default_str();
  gen_flip->add_option("--seed", gf.seed, "rng seed")->capture_default_str();
  gen_flip->add_option("--out", gf.out, "output node file")->required();

  GenSpeciesOpts gs;
  CLI::App* gen_species_cmd = gen->add_subcommand("species", "limiting-factor species pool");
  gen_species_cmd->add_option("--n", gs.n, "species count")->capture_default_str();
  gen_species_cmd->add_option("--k", gs.k, "limiting factors")->capture_default_str();
  gen_species_cmd->add_option("--seed", gs.seed, "rng seed")->capture_default_str();
  gen_species_cmd->add_option("--out", gs.out, "output node file")->required();

  GenEdgesOpts ge;
  CLI::App* gen_edges = gen->add_subcommand("edges", "sample labeled edges");
  gen_edges->add_option("--nodes", ge.nodes, "node file")->required();
  gen_edges->add_option("--q", ge.q, "edge count")->required();
  gen_edges->add_option("--seed", ge.seed, "rng seed")->capture_default_str();
  gen_edges
      ->add_option("--labeler", ge.labeler,
                   "edge labels: intransitive|jaccard|product|dominance|none")
      ->check(CLI::IsMember({"intransitive", "jaccard", "product", "dominance",
                             "none"}))
      ->capture_default_str();
  gen_edges->add_flag("--include-self", ge.include_self, "allow self-pairs");
  gen_edges->add_option("--out", ge.out, "output edge file")->required();

  // fit ----------------------------------------------------------------
  FitOpts fo;
  CLI::App* fit = app.add_subcommand("fit", "fit a relational model");
  fit->add_option("--train-nodes", fo.train_nodes, "node file")->required();
  fit->add_option("--train-edges", fo.train_edges, "labeled edge file")->required();
  fit->add_option("--pairwise", fo.pairwise,
                  "kron|kron_sym|kron_rec|cartesian|cartesian_sym|rank_rec|"
                  "rank_sym|mlpk")
      ->capture_default_str();
  fit->add_option("--node-kernel", fo.node_kernel, "linear|gaussian_rbf")
      ->check(CLI::IsMember({"linear", "gaussian_rbf"}))
      ->capture_default_str();
  fit->add_option("--gamma", fo.gamma, "RBF width parameter")->capture_default_str();
  fit->add_option("--lambda", fo.lambda, "regularization (closed form)")
      ->capture_default_str();
  fit->add_flag("--cg", fo.cg, "conjugate gradient with early stopping");
  fit->add_option("--val-nodes", fo.val_nodes, "validation node file (cg)");
  fit->add_option("--val-edges", fo.val_edges, "validation edge file (cg)");
  fit->add_option("--patience", fo.patience, "early-stopping patience (cg)")
      ->capture_default_str();
  fit->add_option("--out", fo.out, "output model file")->required();

  // predict --------------------------------------------------------------
  PredictOpts po;
  CLI::App* pred = app.add_subcommand("predict", "predict edge weights");
  pred->add_option("--model", po.model, "model file")->required();
  pred->add_option("--train-nodes", po.train_nodes,
                   "node file the model was trained on")
      ->required();
  pred->add_option("--nodes", po.nodes,
                   "node file for the edges to predict (default: training nodes)");
  pred->add_option("--edges", po.edges, "edge file to predict")->required();
  pred->add_option("--out", po.out, "output edge file with predictions")->required();

  // props ----------------------------------------------------------------
  PropsOpts pr;
  CLI::App* props = app.add_subcommand("props", "relation property report");
  props->add_option("--matrix", pr.matrix, "relation matrix file")->required();
  props->add_option("--tol", pr.tol, "comparison tolerance")->capture_default_str();
  props->add_option("--threshold", pr.threshold, "ranking arc threshold")
      ->capture_default_str();

  // exp ----------------------------------------------------------------
  ExpOpts eo;
  CLI::App* exp = app.add_subcommand("exp", "run a benchmark experiment");
  exp->add_option("name", eo.name, "table2|table3|table4|newsgroups")
      ->check(CLI::IsMember({"table2", "table3", "table4", "newsgroups"}))
      ->required();
  exp->add_option("--member", eo.member,
                  "similarity member for table2/table3: intransitive|jaccard|product")
      ->check(CLI::IsMember({"intransitive", "jaccard", "product"}))
      ->capture_default_str();
  exp->add_option("--reps", eo.reps, "repetitions")->capture_default_str();
  exp->add_option("--seed", eo.seed, "master seed")->capture_default_str();
  exp->add_option("--threads", eo.threads, "worker threads over repetitions")
      ->capture_default_str();
  exp->add_option("--corpus", eo.corpus, "document corpus directory (newsgroups)");
  exp->add_option("--sizes", eo.sizes, "training edge counts (newsgroups)")
      ->delimiter(',')
      ->capture_default_str();
  exp->add_option("--methods", eo.methods, "override method list")->delimiter(',');
  exp->add_option("--out", eo.out, "output results file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen_nodes->parsed()) return run_gen_nodes(gn);
    if (gen_flip->parsed()) return run_gen_flip(gf);
    if (gen_species_cmd->parsed()) return run_gen_species(gs);
    if (gen_edges->parsed()) return run_gen_edges(ge);
    if (fit->parsed()) return run_fit(fo);
    if (pred->parsed()) return run_predict(po);
    if (props->parsed()) return run_props(pr);
    if (exp->parsed()) return run_exp(eo);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
