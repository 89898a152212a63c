#include "cdbn/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cdbn/errors.hpp"

namespace cdbn {

std::vector<std::vector<std::size_t>> enumerate_parent_sets(std::size_t p, std::size_t m) {
  std::vector<std::vector<std::size_t>> sets;
  sets.reserve(count_parent_sets(p, m));
  for (std::size_t k = 0; k <= std::min(m, p); ++k) {
    std::vector<std::size_t> c(k);
    for (std::size_t i = 0; i < k; ++i) c[i] = i;
    while (true) {
      sets.push_back(c);
      // Colex successor: bump the lowest element that has room, reset the rest.
      std::size_t i = 0;
      while (i < k && c[i] + 1 == (i + 1 < k ? c[i + 1] : p)) ++i;
      if (i == k) break;
      ++c[i];
      for (std::size_t r = 0; r < i; ++r) c[r] = r;
    }
  }
  return sets;
}

std::size_t count_parent_sets(std::size_t p, std::size_t m) {
  std::size_t total = 0;
  std::size_t binom = 1;  // C(p, k)
  for (std::size_t k = 0; k <= std::min(m, p); ++k) {
    total += binom;
    binom = binom * (p - k) / (k + 1);
  }
  return total;
}

double NodePosterior::inclusion_probability(std::size_t parent) const {
  double sum = 0.0;
  for (const auto& m : models)
    if (m.pset.contains(parent)) sum += m.probability;
  return sum;
}

const ScoredModel& NodePosterior::map_model() const {
  return *std::max_element(models.begin(), models.end(), [](const ScoredModel& a, const ScoredModel& b) {
    return a.probability < b.probability;
  });
}

std::vector<std::vector<bool>> EdgeProbabilityMatrix::threshold(double tau) const {
  std::vector<std::vector<bool>> g(p_, std::vector<bool>(p_, false));
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < p_; ++j) g[i][j] = (*this)(i, j) >= tau;
  return g;
}

EdgeProbabilityMatrix EdgeProbabilityMatrix::permuted(const std::vector<std::size_t>& perm) const {
  EdgeProbabilityMatrix out(p_);
  for (std::size_t i = 0; i < p_; ++i)
    for (std::size_t j = 0; j < p_; ++j) out(i, j) = (*this)(perm[i], perm[j]);
  return out;
}

namespace kernels {

namespace {

ModelOutcome score_one(const DesignBuilder& builder, std::size_t node, const std::vector<std::size_t>& parents,
                       const InferenceSettings& settings) {
  ModelOutcome out;
  try {
    const ParentSet pset{node, parents};
    const DesignPair dp = builder.build(pset);
    out.score.log_marginal = log_marginal_likelihood(dp, settings.likelihood);
    out.score.log_prior = log_model_prior(pset, settings.prior, builder.num_nodes(), settings.max_indegree);
    out.score.log_posterior_unnorm = out.score.log_marginal + out.score.log_prior;
    out.ok = true;
  } catch (const NumericalError& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<ModelOutcome> score_models_serial(const DesignBuilder& builder, std::size_t node,
                                              const std::vector<std::vector<std::size_t>>& sets,
                                              const InferenceSettings& settings) {
  std::vector<ModelOutcome> out;
  out.reserve(sets.size());
  for (const auto& parents : sets) out.push_back(score_one(builder, node, parents, settings));
  return out;
}

std::vector<ModelOutcome> score_models_parallel(const DesignBuilder& builder, std::size_t node,
                                                const std::vector<std::vector<std::size_t>>& sets,
                                                const InferenceSettings& settings) {
  std::vector<ModelOutcome> out(sets.size());
  const auto count = static_cast<std::ptrdiff_t>(sets.size());
#ifdef _OPENMP
  const int threads = settings.execution.workers > 0 ? settings.execution.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
#endif
  for (std::ptrdiff_t k = 0; k < count; ++k)
    out[static_cast<std::size_t>(k)] = score_one(builder, node, sets[static_cast<std::size_t>(k)], settings);
  return out;
}

}  // namespace kernels

NodePosterior normalize_posterior(std::size_t node, const std::vector<std::vector<std::size_t>>& sets,
                                  const std::vector<ModelOutcome>& outcomes) {
  NodePosterior post;
  post.node = node;
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (outcomes[k].ok) {
      post.models.push_back({ParentSet{node, sets[k]}, outcomes[k].score, 0.0});
      max_score = std::max(max_score, outcomes[k].score.log_posterior_unnorm);
    } else {
      post.excluded.push_back({ParentSet{node, sets[k]}, outcomes[k].error});
    }
  }
  if (post.models.empty())
    throw NumericalError("every candidate parent set of node " + std::to_string(node) + " was excluded");

  double sum = 0.0;
  for (auto& m : post.models) {
    m.probability = std::exp(m.score.log_posterior_unnorm - max_score);
    sum += m.probability;
  }
  for (auto& m : post.models) m.probability /= sum;
  post.log_evidence = max_score + std::log(sum);
  return post;
}

NodePosterior infer_node(std::size_t node, const DesignBuilder& builder, const InferenceSettings& settings) {
  const std::size_t p = builder.num_nodes();
  if (node >= p) throw InputError("node index out of range");
  if (settings.max_indegree > p) throw InputError("in-degree bound exceeds the number of nodes");
  const auto sets = enumerate_parent_sets(p, settings.max_indegree);
  const auto outcomes = settings.execution.parallel
                            ? kernels::score_models_parallel(builder, node, sets, settings)
                            : kernels::score_models_serial(builder, node, sets, settings);
  return normalize_posterior(node, sets, outcomes);
}

NodePosterior infer_node(std::size_t node, const TimeCourseDataset& data, const InterventionDesign& design,
                         const InferenceSettings& settings) {
  const DesignBuilder builder(data, ResolvedDesign(design, data));
  return infer_node(node, builder, settings);
}

EdgeProbabilityMatrix edge_probabilities(const std::vector<NodePosterior>& posteriors) {
  const std::size_t p = posteriors.size();
  EdgeProbabilityMatrix e(p);
  for (const auto& post : posteriors) {
    if (post.node >= p) throw InputError("posterior node index out of range");
    for (const auto& m : post.models)
      for (std::size_t i : m.pset.parents) e(i, post.node) += m.probability;
  }
  return e;
}

NetworkPosterior infer_network(const DesignBuilder& builder, const InferenceSettings& settings) {
  const std::size_t p = builder.num_nodes();
  if (settings.max_indegree > p) throw InputError("in-degree bound exceeds the number of nodes");
  const auto sets = enumerate_parent_sets(p, settings.max_indegree);

  std::vector<NodePosterior> nodes(p);
  std::vector<std::string> failures(p);
  const auto count = static_cast<std::ptrdiff_t>(p);
  // Nodes are independent; each worker scores one node's models serially.
#ifdef _OPENMP
  const int threads = settings.execution.parallel
                          ? (settings.execution.workers > 0 ? settings.execution.workers : omp_get_max_threads())
                          : 1;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto j = static_cast<std::size_t>(k);
    try {
      nodes[j] = normalize_posterior(j, sets, kernels::score_models_serial(builder, j, sets, settings));
    } catch (const NumericalError& e) {
      failures[j] = e.what();
    }
  }
  std::string message;
  for (const auto& f : failures)
    if (!f.empty()) message += (message.empty() ? "" : "; ") + f;
  if (!message.empty()) throw NumericalError(message);
  EdgeProbabilityMatrix edges = edge_probabilities(nodes);
  return {std::move(edges), std::move(nodes)};
}

NetworkPosterior infer_network(const TimeCourseDataset& data, const InterventionDesign& design,
                               const InferenceSettings& settings) {
  const DesignBuilder builder(data, ResolvedDesign(design, data));
  return infer_network(builder, settings);
}

Eigen::VectorXd fitted_node(const NodePosterior& posterior, const DesignBuilder& builder,
                            const LikelihoodOptions& opts) {
  const auto n = static_cast<Eigen::Index>(builder.num_rows());
  const double g = opts.g.value_or(static_cast<double>(n));
  Eigen::VectorXd fit = Eigen::VectorXd::Zero(n);
  for (const auto& m : posterior.models) {
    const DesignPair dp = builder.build(m.pset);
    const Eigen::VectorXd alpha = dp.x0.householderQr().solve(dp.response);
    Eigen::VectorXd model_fit = dp.x0 * alpha;
    if (dp.b() > 0) {
      const Eigen::VectorXd beta = (g / (g + 1.0)) * dp.x_gamma.householderQr().solve(dp.response);
      model_fit += dp.x_gamma * beta;
    }
    fit += m.probability * model_fit;
  }
  return fit;
}

FittedSeries fitted_values(const std::vector<NodePosterior>& posteriors, const DesignBuilder& builder,
                           const LikelihoodOptions& opts) {
  const std::size_t p = builder.num_nodes();
  const std::size_t n = builder.num_rows();
  const std::size_t C = builder.design().num_conditions();
  const std::size_t T = n / C;
  FittedSeries out(p, C, T);
  for (const auto& post : posteriors) {
    const Eigen::VectorXd fit = fitted_node(post, builder, opts);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t t = 0; t < T; ++t) out(post.node, c, t) = fit(static_cast<Eigen::Index>(c * T + t));
  }
  return out;
}

}  // namespace cdbn
