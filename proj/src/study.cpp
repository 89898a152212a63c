#include "cdbn/study.hpp"

#include <cmath>
#include <limits>
#include <tuple>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cdbn/errors.hpp"

namespace cdbn {

AnalysisMethod parse_method(const std::string& name) {
  if (name == "correlations") return {name, std::nullopt};
  return {to_string(parse_intervention_kind(name)), parse_intervention_kind(name)};
}

InterventionKind parse_regime(const std::string& name) {
  const InterventionKind k = parse_intervention_kind(name);
  if (k == InterventionKind::None) throw InputError("'none' is not a generating regime");
  return k;
}

std::vector<AnalysisMethod> default_methods() {
  return {parse_method("perfect"), parse_method("fixed"),     parse_method("perfect-fixed"),
          parse_method("mechanism"), parse_method("none"), parse_method("correlations")};
}

std::vector<InterventionKind> default_regimes() {
  return {InterventionKind::Perfect, InterventionKind::FixedEffect, InterventionKind::PerfectFixedEffect,
          InterventionKind::MechanismChange};
}

EdgeProbabilityMatrix analyse(const AnalysisMethod& method, const TimeCourseDataset& data,
                              const InterventionDesign& design, std::size_t max_indegree,
                              ExecutionPolicy execution) {
  if (!method.kind) return lagged_correlation_scores(data);
  InterventionDesign d = design;
  d.scheme = {*method.kind, InterventionDirection::Out};
  InferenceSettings settings;
  settings.max_indegree = max_indegree;
  settings.prior = NetworkPrior::empty(data.num_nodes());
  settings.execution = execution;
  return infer_network(data, d, settings).edges;
}

double StudyCell::mean_auc() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (double a : aucs)
    if (!std::isnan(a)) {
      sum += a;
      ++n;
    }
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

double StudyCell::sd_auc() const {
  const double mean = mean_auc();
  double ss = 0.0;
  std::size_t n = 0;
  for (double a : aucs)
    if (!std::isnan(a)) {
      ss += (a - mean) * (a - mean);
      ++n;
    }
  return n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

const StudyCell& StudyResult::cell(InterventionKind regime, const std::string& method) const {
  for (const auto& c : cells)
    if (c.regime == regime && c.method.name == method) return c;
  throw InputError("no study cell for " + to_string(regime) + " / " + method);
}

StudyResult run_study(const StudyConfig& cfg) {
  std::vector<std::string> names = cfg.node_names;
  Adjacency topology = cfg.topology;
  if (names.empty()) std::tie(names, topology) = default_topology();
  if (cfg.replicates == 0) throw InputError("study needs at least one replicate");

  StudyResult result;
  for (InterventionKind regime : cfg.regimes) {
    SimulationConfig sim;
    sim.num_times = cfg.num_times;
    sim.conditions = standard_conditions(cfg.target_a, cfg.target_b);
    sim.regime = regime;
    sim.default_shift = cfg.shift;
    sim.shift_first_observation = cfg.shift_first_observation;
    sim.sigma = cfg.sigma;
    sim.seed = cfg.seed;
    sim.replicates = cfg.replicates;

    const std::size_t R = cfg.replicates;
    const std::size_t M = cfg.methods.size();
    std::vector<std::vector<double>> aucs(M, std::vector<double>(R, std::numeric_limits<double>::quiet_NaN()));
    std::vector<std::vector<std::string>> errors(M, std::vector<std::string>(R));
    std::vector<std::vector<std::optional<RocInstance>>> instances(M, std::vector<std::optional<RocInstance>>(R));

    const auto count = static_cast<std::ptrdiff_t>(R);
#ifdef _OPENMP
    const int threads = cfg.execution.parallel
                            ? (cfg.execution.workers > 0 ? cfg.execution.workers : omp_get_max_threads())
                            : 1;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (std::ptrdiff_t rr = 0; rr < count; ++rr) {
      const auto r = static_cast<std::size_t>(rr);
      const StudyReplicate rep = simulate_replicate(names, topology, sim, r);
      const Adjacency truth = rep.truth.topology();
      for (std::size_t mi = 0; mi < M; ++mi) {
        try {
          const auto scores = analyse(cfg.methods[mi], rep.sample.data, rep.sample.design, cfg.max_indegree);
          RocInstance inst = edge_instance(scores, truth);
          aucs[mi][r] = roc_curve(inst).auc;
          instances[mi][r] = std::move(inst);
        } catch (const std::exception& e) {
          errors[mi][r] = e.what();
        }
      }
    }

    for (std::size_t mi = 0; mi < M; ++mi) {
      StudyCell cell{regime, cfg.methods[mi], aucs[mi], {}, {}};
      std::vector<RocInstance> ok;
      for (std::size_t r = 0; r < R; ++r) {
        if (!errors[mi][r].empty()) cell.failures.push_back("replicate " + std::to_string(r) + ": " + errors[mi][r]);
        if (instances[mi][r]) ok.push_back(*instances[mi][r]);
      }
      if (!ok.empty()) cell.pooled = pooled_roc(ok);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

RegimeRanking rank_methods(const StudyResult& result, InterventionKind regime, double alpha) {
  std::vector<const StudyCell*> cells;
  for (const auto& c : result.cells)
    if (c.regime == regime) cells.push_back(&c);
  if (cells.empty()) throw InputError("no study cells for regime " + to_string(regime));

  const StudyCell* best = nullptr;
  for (const auto* c : cells)
    if (!std::isnan(c->mean_auc()) && (!best || c->mean_auc() > best->mean_auc())) best = c;
  if (!best) throw NumericalError("every replicate failed in regime " + to_string(regime));

  RegimeRanking out{regime, best->method.name, {}, {}};
  for (const auto* c : cells) {
    double pv = 1.0;
    if (c != best) {
      std::vector<double> x, y;
      for (std::size_t r = 0; r < c->aucs.size() && r < best->aucs.size(); ++r)
        if (!std::isnan(c->aucs[r]) && !std::isnan(best->aucs[r])) {
          x.push_back(best->aucs[r]);
          y.push_back(c->aucs[r]);
        }
      try {
        pv = paired_t_test(x, y).p_value;
      } catch (const NumericalError&) {
        // Constant differences: a tie only if they are all zero.
        pv = x == y ? 1.0 : 0.0;
      } catch (const InputError&) {
        pv = std::numeric_limits<double>::quiet_NaN();
      }
    }
    out.p_values.push_back(pv);
    if (pv >= alpha) out.tied.push_back(c->method.name);
  }
  return out;
}

}  // namespace cdbn
