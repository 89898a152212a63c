// cdbn: network inference from interventional time courses.
//
//   cdbn infer     --data D.csv [--design D.json] --out DIR
//   cdbn simulate  --regime perfect-fixed --replicates 5 --out DIR
//   cdbn evaluate  --edges E.csv --truth T.csv --out DIR
//   cdbn study     --replicates 20 --out DIR
//
// Every run writes manifest.json next to its outputs. The manifest holds the
// full argument vector, the resolved configuration and SHA-256 digests of the
// inputs, which is enough to rerun the command and get the same bytes back.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "cdbn/data.hpp"
#include "cdbn/design.hpp"
#include "cdbn/errors.hpp"
#include "cdbn/evaluate.hpp"
#include "cdbn/inference.hpp"
#include "cdbn/report.hpp"
#include "cdbn/simulate.hpp"
#include "cdbn/study.hpp"

#ifndef CDBN_VERSION
#define CDBN_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace cdbn;

namespace {

enum ExitCode { kOk = 0, kInputError = 1, kNumericalError = 2 };

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void write_json(const json& doc, const fs::path& path) {
  auto out = open_output(path);
  out << doc.dump(2) << '\n';
}

void make_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Manifest shared by every subcommand; each adds its own config and outputs.
struct Manifest {
  json doc;
  Manifest(const std::string& subcommand, const std::vector<std::string>& argv) {
    doc["tool"] = "cdbn";
    doc["version"] = CDBN_VERSION;
    doc["subcommand"] = subcommand;
    doc["argv"] = argv;
    doc["config"] = json::object();
    doc["inputs"] = json::array();
    doc["outputs"] = json::array();
  }
  void input(const std::string& role, const fs::path& path) {
    doc["inputs"].push_back({{"role", role}, {"path", path.string()}, {"sha256", sha256_file(path)}});
  }
  void output(const std::string& name) { doc["outputs"].push_back(name); }
};

ExecutionPolicy execution_for(int workers) {
  ExecutionPolicy e;
  e.workers = workers;
  if (workers == 1) e = ExecutionPolicy::serial();
  return e;
}

// ---------------------------------------------------------------- infer

struct InferOptions {
  std::string data;
  std::string design;
  std::string scheme = "perfect-fixed";
  std::string direction = "out";
  std::size_t indegree = 2;
  double lambda = 0.0;
  std::string prior;
  double threshold = 0.5;
  std::size_t top_k = 5;
  int workers = 0;
  bool log_transform = false;
  bool dump_design = false;
  std::string out;
};

void run_infer(const InferOptions& o, Manifest& manifest) {
  if (o.lambda < 0.0) throw InputError("--lambda must be nonnegative");
  if (o.lambda > 0.0 && o.prior.empty()) throw InputError("--lambda > 0 requires a prior network (--prior)");
  if (!(o.threshold >= 0.0 && o.threshold <= 1.0)) throw InputError("--threshold must lie in [0, 1]");

  const InterventionScheme scheme{parse_intervention_kind(o.scheme), parse_intervention_direction(o.direction)};
  const TimeCourseDataset data = load_dataset(o.data, LoadOptions{o.log_transform});
  const InterventionDesign design =
      o.design.empty() ? InterventionDesign{{}, scheme} : load_intervention_design(o.design, scheme);

  InferenceSettings settings;
  settings.max_indegree = o.indegree;
  settings.execution = execution_for(o.workers);
  settings.prior = o.prior.empty() ? NetworkPrior::empty(data.num_nodes())
                                   : load_network_prior(o.prior, data.node_names(), o.lambda);
  settings.prior.lambda = o.lambda;

  manifest.input("data", o.data);
  if (!o.design.empty()) manifest.input("design", o.design);
  if (!o.prior.empty()) manifest.input("prior", o.prior);
  manifest.doc["config"] = {{"scheme", to_string(scheme.kind)},
                            {"direction", to_string(scheme.direction)},
                            {"indegree", o.indegree},
                            {"lambda", o.lambda},
                            {"threshold", o.threshold},
                            {"top_k", o.top_k},
                            {"workers", o.workers},
                            {"log_transform", o.log_transform},
                            {"g", "n"},
                            {"nodes", data.num_nodes()},
                            {"conditions", data.num_conditions()},
                            {"times", data.num_times()}};

  const DesignBuilder builder(data, ResolvedDesign(design, data));
  const NetworkPosterior post = infer_network(builder, settings);
  const FittedSeries fitted = fitted_values(post.nodes, builder);
  const auto& names = data.node_names();
  const fs::path out(o.out);
  make_output_dir(out);

  {
    auto f = open_output(out / "edges.csv");
    write_edge_csv(post.edges, names, f);
    manifest.output("edges.csv");
  }
  write_json(posterior_summary(post.nodes, names, o.top_k), out / "posterior.json");
  manifest.output("posterior.json");
  {
    auto f = open_output(out / "fitted.csv");
    write_fitted_csv(fitted, data, f);
    manifest.output("fitted.csv");
  }
  {
    auto f = open_output(out / "network.dot");
    write_dot(post.edges, names, o.threshold, f);
    manifest.output("network.dot");
  }
  if (o.dump_design) {
    // Design of each node's most probable model, with column provenance.
    make_output_dir(out / "designs");
    for (const auto& node : post.nodes) {
      const std::string file = "designs/" + std::to_string(node.node) + "_" + names[node.node] + ".csv";
      auto f = open_output(out / file);
      write_design_dump(builder.build(node.map_model().pset), names, f);
      manifest.output(file);
    }
  }
}

// ------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string topology;
  std::string regime = "perfect-fixed";
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  std::size_t times = 8;
  double sigma = 0.5;
  double shift = -1.0;
  std::string targets = "A,B";
  bool no_initial_shift = false;
  std::string out;
};

// Node names in order of first appearance in an edge-list CSV.
std::vector<std::string> edge_list_nodes(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<std::string> names;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    for (const auto& n : split_list(line))
      if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  }
  if (names.empty()) throw InputError(path.string() + ": topology has no edges");
  return names;
}

void run_simulate(const SimulateOptions& o, Manifest& manifest) {
  if (o.replicates == 0) throw InputError("--replicates must be at least 1");
  if (o.times < 2) throw InputError("--times must be at least 2");
  std::vector<std::string> names;
  Adjacency topology;
  if (o.topology.empty()) {
    std::tie(names, topology) = default_topology();
  } else {
    names = edge_list_nodes(o.topology);
    topology = load_edge_list(o.topology, names);
    manifest.input("topology", o.topology);
  }
  const auto targets = split_list(o.targets);
  if (targets.size() != 2) throw InputError("--targets needs exactly two node names");
  for (const auto& t : targets)
    if (std::find(names.begin(), names.end(), t) == names.end())
      throw InputError("--targets: unknown node '" + t + "'");

  SimulationConfig cfg;
  cfg.num_times = o.times;
  cfg.conditions = standard_conditions(targets[0], targets[1]);
  cfg.regime = parse_regime(o.regime);
  cfg.default_shift = o.shift;
  cfg.shift_first_observation = !o.no_initial_shift;
  cfg.sigma = o.sigma;
  cfg.seed = o.seed;
  cfg.replicates = o.replicates;

  manifest.doc["config"] = {{"regime", to_string(cfg.regime)},
                            {"replicates", o.replicates},
                            {"seed", o.seed},
                            {"times", o.times},
                            {"sigma", o.sigma},
                            {"shift", o.shift},
                            {"shift_first_observation", !o.no_initial_shift},
                            {"targets", targets},
                            {"nodes", names}};

  const fs::path out(o.out);
  make_output_dir(out);
  for (std::size_t r = 0; r < o.replicates; ++r) {
    char dir[32];
    std::snprintf(dir, sizeof dir, "rep_%03zu", r);
    make_output_dir(out / dir);
    const StudyReplicate rep = simulate_replicate(names, topology, cfg, r);
    write_dataset(rep.sample.data, out / dir / "data.csv");
    write_intervention_design(rep.sample.design, out / dir / "design.json");
    auto f = open_output(out / dir / "truth.csv");
    write_edge_list(rep.truth.topology(), names, f);
    f.close();
    {
      // Generating coefficients, for reference.
      auto w = open_output(out / dir / "coefficients.csv");
      w << "parent,child,coefficient\n";
      for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = 0; j < names.size(); ++j) {
          const double c = rep.truth.coef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          if (c != 0.0) w << names[i] << ',' << names[j] << ',' << format_double(c) << '\n';
        }
    }
    for (const char* file : {"data.csv", "design.json", "truth.csv", "coefficients.csv"})
      manifest.output(std::string(dir) + "/" + file);
  }
}

// ------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::vector<std::string> edges;
  std::vector<std::string> truth;
  bool no_self = false;
  // descendancy mode
  std::string mode;
  std::vector<std::string> data;
  std::string design;
  std::string target;
  std::string baseline;
  std::string inhibited;
  double alpha = 0.05;
  bool log_transform = false;
  bool aggregate = false;
  std::string out;
};

void run_evaluate(const EvaluateOptions& o, Manifest& manifest) {
  if (o.edges.empty()) throw InputError("--edges is required");
  if (o.edges.size() > 1 && !o.aggregate) throw InputError("several --edges files need --aggregate");
  const bool descendancy = !o.mode.empty();

  std::vector<RocInstance> instances;
  json per_instance = json::array();
  if (!descendancy) {
    if (o.truth.size() != o.edges.size()) throw InputError("give one --truth per --edges file");
    for (std::size_t k = 0; k < o.edges.size(); ++k) {
      std::vector<std::string> names;
      const auto scores = load_edge_csv(o.edges[k], names);
      const auto truth = load_edge_list(o.truth[k], names);
      manifest.input("edges", o.edges[k]);
      manifest.input("truth", o.truth[k]);
      instances.push_back(edge_instance(scores, truth, !o.no_self));
      per_instance.push_back({{"edges", o.edges[k]}, {"auc", roc_curve(instances.back()).auc}});
    }
  } else {
    const DescendancyMode mode = parse_descendancy_mode(o.mode);
    if (o.data.size() != o.edges.size()) throw InputError("give one --data per --edges file");
    if (o.target.empty()) throw InputError("descendancy mode needs --target");
    std::string baseline = o.baseline, inhibited = o.inhibited;
    if (!o.design.empty()) {
      // Conditions read from the design: no targets, and exactly the target.
      const InterventionDesign design = load_intervention_design(o.design, {});
      manifest.input("design", o.design);
      for (const auto& [label, targets] : design.targets) {
        if (baseline.empty() && targets.empty()) baseline = label;
        if (inhibited.empty() && targets == std::vector<std::string>{o.target}) inhibited = label;
      }
    }
    if (baseline.empty() || inhibited.empty())
      throw InputError("descendancy mode needs --baseline and --inhibited (or a --design that identifies them)");
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw InputError("--alpha must lie in (0, 1)");
    for (std::size_t k = 0; k < o.edges.size(); ++k) {
      std::vector<std::string> names;
      const auto scores = load_edge_csv(o.edges[k], names);
      const TimeCourseDataset data = load_dataset(o.data[k], LoadOptions{o.log_transform});
      if (data.node_names() != names)
        throw InputError(o.edges[k] + ": node names differ from " + o.data[k]);
      manifest.input("edges", o.edges[k]);
      manifest.input("data", o.data[k]);
      const std::size_t target = data.node_index(o.target);
      const DescendancyResult d = descendancy_sets(data, target, baseline, inhibited, o.alpha);
      instances.push_back(descendancy_instance(scores, target, d.nodes, mode));
      json desc = json::array();
      for (std::size_t j : d.nodes) desc.push_back(names[j]);
      json pv = json::object();
      for (std::size_t j = 0; j < names.size(); ++j)
        if (j != target) pv[names[j]] = std::isnan(d.p_values[j]) ? json(nullptr) : json(d.p_values[j]);
      per_instance.push_back({{"edges", o.edges[k]},
                              {"data", o.data[k]},
                              {"auc", roc_curve(instances.back()).auc},
                              {"descendants", desc},
                              {"p_values", pv},
                              {"warnings", d.warnings}});
    }
  }

  manifest.doc["config"] = {{"mode", descendancy ? o.mode : std::string("edges")},
                            {"include_self", !o.no_self},
                            {"aggregate", o.aggregate},
                            {"threshold_rule", "score >= tau"}};
  if (descendancy) {
    manifest.doc["config"]["target"] = o.target;
    manifest.doc["config"]["baseline"] = o.baseline.empty() ? json(nullptr) : json(o.baseline);
    manifest.doc["config"]["inhibited"] = o.inhibited.empty() ? json(nullptr) : json(o.inhibited);
    manifest.doc["config"]["alpha"] = o.alpha;
    manifest.doc["config"]["log_transform"] = o.log_transform;
  }

  const RocCurve curve = instances.size() == 1 ? roc_curve(instances[0]) : pooled_roc(instances);
  const fs::path out(o.out);
  make_output_dir(out);
  {
    auto f = open_output(out / "roc.csv");
    write_roc_csv(curve, f);
    manifest.output("roc.csv");
  }
  json summary = roc_summary(curve);
  summary["instances"] = per_instance;
  write_json(summary, out / "summary.json");
  manifest.output("summary.json");
}

// ---------------------------------------------------------------- study

struct StudyOptions {
  std::size_t replicates = 20;
  std::uint64_t seed = 1;
  std::string regimes = "perfect,fixed,perfect-fixed,mechanism";
  std::string methods = "perfect,fixed,perfect-fixed,mechanism,none,correlations";
  std::size_t indegree = 3;
  std::size_t times = 8;
  double sigma = 0.5;
  double shift = -1.0;
  bool no_initial_shift = false;
  int workers = 0;
  std::string out;
};

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == '/' || c == ' ') c = '_';
  return s;
}

void run_study_command(const StudyOptions& o, Manifest& manifest) {
  StudyConfig cfg;
  cfg.replicates = o.replicates;
  cfg.seed = o.seed;
  cfg.max_indegree = o.indegree;
  cfg.num_times = o.times;
  cfg.sigma = o.sigma;
  cfg.shift = o.shift;
  cfg.shift_first_observation = !o.no_initial_shift;
  cfg.execution = execution_for(o.workers);
  cfg.regimes.clear();
  for (const auto& r : split_list(o.regimes)) cfg.regimes.push_back(parse_regime(r));
  cfg.methods.clear();
  for (const auto& m : split_list(o.methods)) cfg.methods.push_back(parse_method(m));
  if (cfg.regimes.empty() || cfg.methods.empty()) throw InputError("--regimes and --methods must not be empty");

  json regimes = json::array(), methods = json::array();
  for (auto r : cfg.regimes) regimes.push_back(to_string(r));
  for (const auto& m : cfg.methods) methods.push_back(m.name);
  manifest.doc["config"] = {{"replicates", o.replicates}, {"seed", o.seed},   {"regimes", regimes},
                            {"methods", methods},         {"indegree", o.indegree}, {"times", o.times},
                            {"sigma", o.sigma},           {"shift", o.shift}, {"shift_first_observation", !o.no_initial_shift},
                            {"workers", o.workers},
                            {"topology", "bundled"}};

  const StudyResult result = run_study(cfg);
  const fs::path out(o.out);
  make_output_dir(out);
  make_output_dir(out / "roc");

  {
    auto f = open_output(out / "auc_table.csv");
    f << "regime";
    for (const auto& m : cfg.methods) f << ',' << m.name;
    f << '\n';
    for (auto r : cfg.regimes) {
      f << to_string(r);
      for (const auto& m : cfg.methods) f << ',' << format_double(result.cell(r, m.name).mean_auc());
      f << '\n';
    }
    manifest.output("auc_table.csv");
  }
  {
    auto f = open_output(out / "auc_replicates.csv");
    f << "regime,method,replicate,auc\n";
    for (const auto& c : result.cells)
      for (std::size_t k = 0; k < c.aucs.size(); ++k)
        f << to_string(c.regime) << ',' << c.method.name << ',' << k << ','
          << (std::isnan(c.aucs[k]) ? std::string("NA") : format_double(c.aucs[k])) << '\n';
    manifest.output("auc_replicates.csv");
  }

  json summary;
  summary["cells"] = json::array();
  for (const auto& c : result.cells) {
    const std::string file = "roc/" + file_safe(to_string(c.regime) + "__" + c.method.name) + ".csv";
    if (!c.pooled.points.empty()) {
      auto f = open_output(out / file);
      write_roc_csv(c.pooled, f);
      manifest.output(file);
    }
    summary["cells"].push_back({{"regime", to_string(c.regime)},
                                {"method", c.method.name},
                                {"mean_auc", c.mean_auc()},
                                {"sd_auc", c.sd_auc()},
                                {"pooled_auc", c.pooled.points.empty() ? json(nullptr) : json(c.pooled.auc)},
                                {"failures", c.failures}});
  }
  summary["rankings"] = json::array();
  for (auto r : cfg.regimes) {
    try {
      const RegimeRanking rk = rank_methods(result, r);
      summary["rankings"].push_back({{"regime", to_string(r)}, {"best", rk.best}, {"tied_with_best", rk.tied}});
    } catch (const NumericalError& e) {
      summary["rankings"].push_back({{"regime", to_string(r)}, {"error", e.what()}});
    }
  }
  write_json(summary, out / "summary.json");
  manifest.output("summary.json");
}

void report_error(const char* kind, const std::string& message) {
  json line = {{"error", kind}, {"message", message}};
  std::cerr << line.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Bayesian network inference from interventional time-course data"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CDBN_VERSION));

  InferOptions io;
  auto* infer = app.add_subcommand("infer", "Posterior edge probabilities for a dataset");
  infer->add_option("--data", io.data, "Time-course CSV (condition,time,<nodes>)")->required()->check(CLI::ExistingFile);
  infer->add_option("--design", io.design, "Intervention design JSON (condition -> inhibited nodes)")
      ->check(CLI::ExistingFile);
  infer->add_option("--scheme", io.scheme, "none, perfect, fixed, perfect-fixed or mechanism")->capture_default_str();
  infer->add_option("--direction", io.direction, "in or out")->capture_default_str();
  infer->add_option("--indegree", io.indegree, "Maximum number of parents per node")->capture_default_str();
  infer->add_option("--lambda", io.lambda, "Strength of the prior network penalty")->capture_default_str();
  infer->add_option("--prior", io.prior, "Prior network edge list (parent,child)")->check(CLI::ExistingFile);
  infer->add_option("--threshold", io.threshold, "Edge probability cut-off for the DOT network")
      ->capture_default_str();
  infer->add_option("--top-k", io.top_k, "Models per node in posterior.json")->capture_default_str();
  infer->add_option("--workers", io.workers, "Threads (0: OpenMP default, 1: serial)")->capture_default_str();
  infer->add_flag("--log-transform", io.log_transform, "Take logs of the input values");
  infer->add_flag("--dump-design", io.dump_design, "Write the design matrix of each node's best model");
  infer->add_option("--out", io.out, "Output directory")->required();

  SimulateOptions so;
  auto* simulate = app.add_subcommand("simulate", "Synthetic datasets from a linear DBN");
  simulate->add_option("--topology", so.topology, "Edge list (parent,child); bundled 15-node network if absent")
      ->check(CLI::ExistingFile);
  simulate->add_option("--regime", so.regime, "Generating intervention regime")->capture_default_str();
  simulate->add_option("--replicates", so.replicates)->capture_default_str();
  simulate->add_option("--seed", so.seed)->capture_default_str();
  simulate->add_option("--times", so.times, "Time points per condition")->capture_default_str();
  simulate->add_option("--sigma", so.sigma, "Noise standard deviation")->capture_default_str();
  simulate->add_option("--shift", so.shift, "Fixed-effect shift on children of an inhibited node")
      ->capture_default_str();
  simulate->add_flag("--no-initial-shift", so.no_initial_shift, "Leave the first observation unshifted");
  simulate->add_option("--targets", so.targets, "The two inhibited nodes, comma separated")->capture_default_str();
  simulate->add_option("--out", so.out, "Output directory")->required();

  EvaluateOptions eo;
  auto* evaluate = app.add_subcommand("evaluate", "ROC analysis of edge probabilities");
  evaluate->add_option("--edges", eo.edges, "Edge-probability CSV (repeat with --aggregate)")->required();
  evaluate->add_option("--truth", eo.truth, "True edge list (parent,child)");
  evaluate->add_flag("--no-self", eo.no_self, "Leave self-edges out of the edge ROC");
  evaluate->add_option("--mode", eo.mode, "Descendancy ROC: descendants or children");
  evaluate->add_option("--data", eo.data, "Dataset for the descendancy t-tests");
  evaluate->add_option("--design", eo.design, "Intervention design locating the baseline and inhibited conditions")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--target", eo.target, "Inhibited node");
  evaluate->add_option("--baseline", eo.baseline, "Uninhibited condition label");
  evaluate->add_option("--inhibited", eo.inhibited, "Condition label in which the target is inhibited");
  evaluate->add_option("--alpha", eo.alpha, "t-test level")->capture_default_str();
  evaluate->add_flag("--log-transform", eo.log_transform, "Take logs of the dataset values");
  evaluate->add_flag("--aggregate", eo.aggregate, "Pool counts over several inputs into one ROC");
  evaluate->add_option("--out", eo.out, "Output directory")->required();

  StudyOptions to;
  auto* study = app.add_subcommand("study", "Regime x method simulation study");
  study->add_option("--replicates", to.replicates)->capture_default_str();
  study->add_option("--seed", to.seed)->capture_default_str();
  study->add_option("--regimes", to.regimes, "Generating regimes, comma separated")->capture_default_str();
  study->add_option("--methods", to.methods, "Analysis methods, comma separated")->capture_default_str();
  study->add_option("--indegree", to.indegree)->capture_default_str();
  study->add_option("--times", to.times)->capture_default_str();
  study->add_option("--sigma", to.sigma)->capture_default_str();
  study->add_option("--shift", to.shift)->capture_default_str();
  study->add_flag("--no-initial-shift", to.no_initial_shift, "Leave the first observation unshifted");
  study->add_option("--workers", to.workers)->capture_default_str();
  study->add_option("--out", to.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("input", e.what());
    return kInputError;
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    std::string out_dir;
    std::optional<Manifest> manifest;
    if (infer->parsed()) {
      manifest.emplace("infer", args);
      run_infer(io, *manifest);
      out_dir = io.out;
    } else if (simulate->parsed()) {
      manifest.emplace("simulate", args);
      run_simulate(so, *manifest);
      out_dir = so.out;
    } else if (evaluate->parsed()) {
      manifest.emplace("evaluate", args);
      run_evaluate(eo, *manifest);
      out_dir = eo.out;
    } else {
      manifest.emplace("study", args);
      run_study_command(to, *manifest);
      out_dir = to.out;
    }
    write_json(manifest->doc, fs::path(out_dir) / "manifest.json");
  } catch (const NumericalError& e) {
    report_error("numerical", e.what());
    return kNumericalError;
  } catch (const InputError& e) {
    report_error("input", e.what());
    return kInputError;
  } catch (const nlohmann::json::exception& e) {
    report_error("input", e.what());
    return kInputError;
  } catch (const std::exception& e) {
    report_error("input", e.what());
    return kInputError;
  }
  return kOk;
}
