#include "cdbn/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

#include "cdbn/errors.hpp"

namespace cdbn {

RocInstance::RocInstance(std::vector<Step> steps, std::size_t positives, std::size_t negatives)
    : steps_(std::move(steps)), positives_(positives), negatives_(negatives) {
  std::sort(steps_.begin(), steps_.end(), [](const Step& a, const Step& b) { return a.threshold > b.threshold; });
}

RocInstance::Step RocInstance::at(double tau) const {
  // The positive set at τ equals the one at the smallest step threshold ≥ τ.
  Step s{tau, 0, 0};
  for (const auto& step : steps_) {
    if (step.threshold < tau) break;
    s.true_positives = step.true_positives;
    s.false_positives = step.false_positives;
  }
  return s;
}

double trapezoid_auc(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k)
    area += (points[k].fpr - points[k - 1].fpr) * 0.5 * (points[k].tpr + points[k - 1].tpr);
  return area;
}

RocCurve pooled_roc(const std::vector<RocInstance>& instances) {
  RocCurve curve;
  std::vector<double> grid{0.0, 1.0};
  for (const auto& inst : instances) {
    curve.positives += inst.positives();
    curve.negatives += inst.negatives();
    for (const auto& s : inst.steps()) grid.push_back(s.threshold);
  }
  if (curve.positives == 0 || curve.negatives == 0)
    throw InputError("ROC undefined: the reference has no positives or no negatives");
  std::sort(grid.begin(), grid.end(), std::greater<>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  auto point_at = [&](double tau) {
    RocPoint pt;
    pt.threshold = tau;
    for (const auto& inst : instances) {
      const auto s = inst.at(tau);
      pt.true_positives += s.true_positives;
      pt.false_positives += s.false_positives;
    }
    pt.tpr = static_cast<double>(pt.true_positives) / static_cast<double>(curve.positives);
    pt.fpr = static_cast<double>(pt.false_positives) / static_cast<double>(curve.negatives);
    return pt;
  };

  curve.points.push_back(point_at(std::numeric_limits<double>::infinity()));
  for (double tau : grid) curve.points.push_back(point_at(tau));
  if (curve.points.back().fpr < 1.0 || curve.points.back().tpr < 1.0) {
    RocPoint end;
    end.threshold = -std::numeric_limits<double>::infinity();
    end.tpr = end.fpr = 1.0;
    end.true_positives = curve.positives;
    end.false_positives = curve.negatives;
    curve.points.push_back(end);
  }
  curve.auc = trapezoid_auc(curve.points);
  curve.operating_point = point_at(0.5);
  return curve;
}

RocCurve roc_curve(const RocInstance& instance) { return pooled_roc({instance}); }

RocInstance edge_instance(const EdgeProbabilityMatrix& scores, const Adjacency& truth, bool include_self) {
  const std::size_t p = scores.size();
  if (truth.size() != p) throw InputError("truth graph and score matrix differ in size");
  std::vector<std::pair<double, bool>> pairs;
  for (std::size_t i = 0; i < p; ++i) {
    if (truth[i].size() != p) throw InputError("truth graph is not square");
    for (std::size_t j = 0; j < p; ++j) {
      if (!include_self && i == j) continue;
      pairs.emplace_back(scores(i, j), truth[i][j]);
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::size_t positives = 0;
  for (const auto& pr : pairs) positives += pr.second ? 1 : 0;
  const std::size_t negatives = pairs.size() - positives;
  if (positives == 0 || negatives == 0)
    throw InputError("ROC undefined: truth graph is all-true or all-false over the evaluated pairs");

  std::vector<RocInstance::Step> steps;
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    (pairs[k].second ? tp : fp) += 1;
    if (k + 1 == pairs.size() || pairs[k + 1].first != pairs[k].first)
      steps.push_back({pairs[k].first, tp, fp});
  }
  return RocInstance(std::move(steps), positives, negatives);
}

RocCurve roc_edges(const EdgeProbabilityMatrix& scores, const Adjacency& truth, bool include_self) {
  return roc_curve(edge_instance(scores, truth, include_self));
}

// ---------------------------------------------------------------------------
// t-test

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw NumericalError("incomplete beta needs positive shape parameters");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  // Modified Lentz evaluation of the continued fraction.
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 1000; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + num / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) break;
  }
  return std::exp(log_front) * h / a;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw NumericalError("t distribution needs positive degrees of freedom");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
  return t > 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw InputError("paired t-test needs samples of equal length");
  if (x.size() < 2) throw InputError("paired t-test needs at least two pairs");
  const std::size_t n = x.size();
  double mean = 0.0;
  for (std::size_t k = 0; k < n; ++k) mean += x[k] - y[k];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dev = (x[k] - y[k]) - mean;
    ss += dev * dev;
  }
  if (!(ss > 0.0)) throw NumericalError("paired t-test is degenerate: differences have zero variance");
  TTestResult r;
  r.df = static_cast<double>(n - 1);
  const double se = std::sqrt(ss / r.df / static_cast<double>(n));
  r.statistic = mean / se;
  r.p_value = regularized_incomplete_beta(0.5 * r.df, 0.5, r.df / (r.df + r.statistic * r.statistic));
  return r;
}

// ---------------------------------------------------------------------------
// Descendancy

DescendancyResult descendancy_sets(const TimeCourseDataset& data, std::size_t target,
                                   const std::string& baseline_condition,
                                   const std::string& inhibited_condition, double alpha) {
  if (target >= data.num_nodes()) throw InputError("descendancy target out of range");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("alpha must lie in [0, 1]");
  const std::size_t cb = data.condition_index(baseline_condition);
  const std::size_t ci = data.condition_index(inhibited_condition);
  DescendancyResult res;
  res.p_values.assign(data.num_nodes(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < data.num_nodes(); ++k) {
    if (k == target) continue;
    std::vector<double> base(data.num_times()), inh(data.num_times());
    for (std::size_t t = 0; t < data.num_times(); ++t) {
      base[t] = data.value(k, cb, t);
      inh[t] = data.value(k, ci, t);
    }
    try {
      const auto r = paired_t_test(base, inh);
      res.p_values[k] = r.p_value;
      if (r.p_value <= alpha) res.nodes.insert(k);
    } catch (const NumericalError& e) {
      res.warnings.push_back("node " + data.node_names()[k] + " excluded: " + e.what());
    }
  }
  return res;
}

DescendancyMode parse_descendancy_mode(const std::string& s) {
  if (s == "descendants") return DescendancyMode::Descendants;
  if (s == "children") return DescendancyMode::Children;
  throw InputError("unknown descendancy mode '" + s + "'");
}

std::set<std::size_t> reachable_from(const Adjacency& graph, std::size_t target, DescendancyMode mode) {
  std::set<std::size_t> out;
  const std::size_t p = graph.size();
  if (mode == DescendancyMode::Children) {
    for (std::size_t k = 0; k < p; ++k)
      if (k != target && graph[target][k]) out.insert(k);
    return out;
  }
  std::vector<char> seen(p, 0);
  std::deque<std::size_t> queue{target};
  seen[target] = 1;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < p; ++v) {
      if (graph[u][v] && !seen[v]) {
        seen[v] = 1;
        out.insert(v);
        queue.push_back(v);
      }
    }
  }
  return out;
}

RocInstance descendancy_instance(const EdgeProbabilityMatrix& probs, std::size_t target,
                                 const std::set<std::size_t>& truth, DescendancyMode mode) {
  const std::size_t p = probs.size();
  if (target >= p) throw InputError("descendancy target out of range");
  std::set<std::size_t> d = truth;
  d.erase(target);
  if (d.empty() || d.size() >= p - 1)
    throw InputError("descendancy ROC needs a reference set that is nonempty and not every node");

  std::vector<double> values;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) values.push_back(probs(i, j));
  std::sort(values.begin(), values.end(), std::greater<>());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  std::vector<RocInstance::Step> steps;
  for (double tau : values) {
    const auto found = reachable_from(probs.threshold(tau), target, mode);
    std::size_t tp = 0;
    for (std::size_t k : found) tp += d.count(k);
    steps.push_back({tau, tp, found.size() - tp});
  }
  return RocInstance(std::move(steps), d.size(), p - 1 - d.size());
}

RocCurve roc_descendancy(const EdgeProbabilityMatrix& probs, std::size_t target,
                         const std::set<std::size_t>& truth, DescendancyMode mode) {
  return roc_curve(descendancy_instance(probs, target, truth, mode));
}

// ---------------------------------------------------------------------------
// Correlation baseline

EdgeProbabilityMatrix lagged_correlation_scores(const TimeCourseDataset& data) {
  const std::size_t p = data.num_nodes();
  const std::size_t C = data.num_conditions();
  const std::size_t T = data.num_times();
  const std::size_t m = C * (T - 1);
  std::vector<std::vector<double>> lagged(p, std::vector<double>(m)), current(p, std::vector<double>(m));
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t t = 1; t < T; ++t, ++r) {
        lagged[k][r] = data.value(k, c, t - 1);
        current[k][r] = data.value(k, c, t);
      }
  }
  auto centered = [m](std::vector<double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(m);
    for (double& x : v) x -= mean;
    return v;
  };
  for (auto& v : lagged) v = centered(v);
  for (auto& v : current) v = centered(v);

  EdgeProbabilityMatrix out(p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double sxy = 0.0, sxx = 0.0, syy = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        sxy += lagged[i][r] * current[j][r];
        sxx += lagged[i][r] * lagged[i][r];
        syy += current[j][r] * current[j][r];
      }
      out(i, j) = (sxx > 0.0 && syy > 0.0) ? std::fabs(sxy) / std::sqrt(sxx * syy) : 0.0;
    }
  }
  return out;
}

}  // namespace cdbn
