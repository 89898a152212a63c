#include "cdbn/simulate.hpp"

#include <algorithm>

#include "cdbn/errors.hpp"
#include "cdbn/rng.hpp"

namespace cdbn {

Adjacency WeightedGraph::topology() const {
  const std::size_t p = size();
  Adjacency g(p, std::vector<bool>(p, false));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      g[i][j] = coef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) != 0.0;
  return g;
}

std::vector<SimulationCondition> standard_conditions(const std::string& a, const std::string& b) {
  return {{"none", {}}, {a + "i", {a}}, {b + "i", {b}}, {a + "i+" + b + "i", {a, b}}};
}

std::pair<std::vector<std::string>, Adjacency> default_topology() {
  std::vector<std::string> names{"A", "B", "C", "D", "E", "F", "G", "H",
                                 "I", "J", "K", "L", "M", "N", "O"};
  // Feedback enters only through self-loops; longer cycles make the edges so
  // easy to recover that all methods saturate.
  const std::vector<std::pair<std::string, std::string>> edges{
      {"A", "E"}, {"A", "F"}, {"B", "H"}, {"B", "I"}, {"C", "I"}, {"C", "J"}, {"D", "J"},
      {"D", "K"}, {"C", "L"}, {"E", "M"}, {"H", "M"}, {"F", "N"}, {"I", "N"}, {"J", "O"},
      {"K", "O"}, {"D", "E"}, {"C", "G"}, {"D", "G"}, {"F", "M"}, {"G", "N"}, {"E", "O"}};
  Adjacency g(names.size(), std::vector<bool>(names.size(), false));
  auto idx = [&](const std::string& s) {
    return static_cast<std::size_t>(std::find(names.begin(), names.end(), s) - names.begin());
  };
  for (const auto& [from, to] : edges) g[idx(from)][idx(to)] = true;
  for (std::size_t i = 0; i < names.size(); ++i) g[i][i] = true;
  return {names, g};
}

double sample_edge_coefficient(CounterRng& rng) {
  const double magnitude = 0.5 + 0.5 * rng.uniform();
  return rng.coin() ? -magnitude : magnitude;
}

WeightedGraph sample_coefficients(const std::vector<std::string>& node_names, const Adjacency& topology,
                                  std::uint64_t seed, double sigma) {
  const std::size_t p = node_names.size();
  if (topology.size() != p) throw InputError("topology does not match node list");
  if (!(sigma >= 0.0)) throw InputError("noise scale must be nonnegative");
  CounterRng rng(seed);
  WeightedGraph wg;
  wg.node_names = node_names;
  wg.coef = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (topology[i][j])
        wg.coef(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sample_edge_coefficient(rng);
  wg.intercept_later = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  wg.intercept_initial = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  wg.sigma = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(p), sigma);
  return wg;
}

namespace {

struct ResolvedConditions {
  std::vector<std::vector<char>> inhibited;  // [condition][node]
};

ResolvedConditions resolve_conditions(const WeightedGraph& wg, const SimulationConfig& cfg) {
  ResolvedConditions rc;
  for (const auto& cond : cfg.conditions) {
    std::vector<char> mask(wg.size(), 0);
    for (const auto& name : cond.inhibited) {
      const auto it = std::find(wg.node_names.begin(), wg.node_names.end(), name);
      if (it == wg.node_names.end())
        throw InputError("simulation condition '" + cond.label + "' inhibits unknown node '" + name + "'");
      mask[static_cast<std::size_t>(it - wg.node_names.begin())] = 1;
    }
    rc.inhibited.push_back(std::move(mask));
  }
  return rc;
}

double shift_for(const SimulationConfig& cfg, const std::string& target) {
  const auto it = cfg.fixed_effect_shift.find(target);
  return it == cfg.fixed_effect_shift.end() ? cfg.default_shift : it->second;
}

}  // namespace

double conditional_mean(const WeightedGraph& wg, const Eigen::MatrixXd& mechanism_coef,
                        const SimulationConfig& cfg, std::size_t node, const std::vector<char>& inhibited,
                        const Eigen::VectorXd* previous) {
  const auto j = static_cast<Eigen::Index>(node);
  const InterventionKind regime = cfg.regime;
  const bool zeroing = regime == InterventionKind::Perfect || regime == InterventionKind::PerfectFixedEffect;
  const bool shifting = regime == InterventionKind::FixedEffect || regime == InterventionKind::PerfectFixedEffect;
  const bool mechanism = regime == InterventionKind::MechanismChange;

  double mean = previous ? wg.intercept_later(j) : wg.intercept_initial(j);
  for (std::size_t i = 0; i < wg.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double beta = wg.coef(ii, j);
    if (beta == 0.0) continue;
    const bool blocked = inhibited[i] != 0;
    if (shifting && blocked && (previous || cfg.shift_first_observation))
      mean += shift_for(cfg, wg.node_names[i]);
    if (!previous) continue;
    if (zeroing && blocked) continue;
    const double effective = (mechanism && blocked) ? mechanism_coef(ii, j) : beta;
    mean += effective * (*previous)(ii);
  }
  return mean;
}

SimulatedReplicate simulate_dataset(const WeightedGraph& wg, const SimulationConfig& cfg, std::size_t replicate) {
  const std::size_t p = wg.size();
  if (cfg.num_times < 2) throw InputError("simulation needs at least two time points");
  if (cfg.conditions.empty()) throw InputError("simulation needs at least one condition");
  const ResolvedConditions rc = resolve_conditions(wg, cfg);

  Eigen::MatrixXd mech = wg.coef;
  if (cfg.regime == InterventionKind::MechanismChange) {
    if (cfg.mechanism_coef) {
      mech = *cfg.mechanism_coef;
    } else {
      CounterRng rng = CounterRng::substream(cfg.seed, "mechanism", replicate);
      for (Eigen::Index i = 0; i < mech.rows(); ++i)
        for (Eigen::Index j = 0; j < mech.cols(); ++j)
          if (wg.coef(i, j) != 0.0) mech(i, j) = sample_edge_coefficient(rng);
    }
  }

  const std::size_t C = cfg.conditions.size();
  const std::size_t T = cfg.num_times;
  std::vector<double> values(p * C * T);
  CounterRng noise = CounterRng::substream(cfg.seed, "noise", replicate);
  Eigen::VectorXd prev(static_cast<Eigen::Index>(p)), cur(static_cast<Eigen::Index>(p));
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t j = 0; j < p; ++j) {
        const double mean = conditional_mean(wg, mech, cfg, j, rc.inhibited[c], t == 0 ? nullptr : &prev);
        const double v = mean + wg.sigma(static_cast<Eigen::Index>(j)) * noise.normal();
        cur(static_cast<Eigen::Index>(j)) = v;
        values[(j * C + c) * T + t] = v;
      }
      prev = cur;
    }
  }

  std::vector<std::string> labels;
  InterventionDesign design;
  design.scheme = {cfg.regime, InterventionDirection::Out};
  for (const auto& cond : cfg.conditions) {
    labels.push_back(cond.label);
    design.targets[cond.label] = cond.inhibited;
  }
  std::vector<double> times(T);
  for (std::size_t t = 0; t < T; ++t) times[t] = static_cast<double>(t);
  return {TimeCourseDataset(wg.node_names, std::move(labels), std::move(times), std::move(values)),
          std::move(design)};
}

StudyReplicate simulate_replicate(const std::vector<std::string>& node_names, const Adjacency& topology,
                                  const SimulationConfig& cfg, std::size_t replicate) {
  WeightedGraph wg = sample_coefficients(node_names, topology,
                                         CounterRng::derive(cfg.seed, "coefficients", replicate), cfg.sigma);
  SimulatedReplicate sample = simulate_dataset(wg, cfg, replicate);
  return {std::move(wg), std::move(sample)};
}

}  // namespace cdbn
