#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cdbn/data.hpp"
#include "cdbn/design.hpp"
#include "cdbn/likelihood.hpp"

namespace cdbn {

// How scoring loops run. Serial and parallel execution produce identical
// results; `workers` = 0 leaves the OpenMP default.
struct ExecutionPolicy {
  bool parallel = true;
  int workers = 0;

  static ExecutionPolicy serial() { return {false, 1}; }
};

// All subsets of {0..p-1} with at most m elements, ordered by size and
// colexicographically within each size. Σ_{k≤m} C(p,k) entries.
std::vector<std::vector<std::size_t>> enumerate_parent_sets(std::size_t p, std::size_t m);
std::size_t count_parent_sets(std::size_t p, std::size_t m);

struct ScoredModel {
  ParentSet pset;
  ModelScore score;
  double probability = 0.0;
};

struct ExcludedModel {
  ParentSet pset;
  std::string reason;
};

// Normalized posterior over the parent sets of one node.
struct NodePosterior {
  std::size_t node = 0;
  std::vector<ScoredModel> models;      // enumeration order
  double log_evidence = 0.0;            // log Σ exp(log_posterior_unnorm)
  std::vector<ExcludedModel> excluded;  // degenerate designs, with reasons

  double inclusion_probability(std::size_t parent) const;
  const ScoredModel& map_model() const;
};

class EdgeProbabilityMatrix {
 public:
  explicit EdgeProbabilityMatrix(std::size_t p) : p_(p), values_(p * p, 0.0) {}

  std::size_t size() const { return p_; }
  // Posterior probability of edge parent -> child.
  double operator()(std::size_t parent, std::size_t child) const { return values_[parent * p_ + child]; }
  double& operator()(std::size_t parent, std::size_t child) { return values_[parent * p_ + child]; }

  // Adjacency of edges with probability >= threshold.
  std::vector<std::vector<bool>> threshold(double tau) const;
  EdgeProbabilityMatrix permuted(const std::vector<std::size_t>& perm) const;

 private:
  std::size_t p_;
  std::vector<double> values_;
};

struct InferenceSettings {
  std::size_t max_indegree = 2;
  NetworkPrior prior;  // empty graph with λ = 0 when unset
  LikelihoodOptions likelihood;
  ExecutionPolicy execution;
};

// Per-model outcome of the scoring kernels: a score, or the reason the
// model was excluded.
struct ModelOutcome {
  bool ok = false;
  ModelScore score;
  std::string error;
};

namespace kernels {

// Scores every parent set of `node`. The parallel version distributes models
// over OpenMP threads; the serial version is the reference it is tested
// against.
std::vector<ModelOutcome> score_models_serial(const DesignBuilder& builder, std::size_t node,
                                              const std::vector<std::vector<std::size_t>>& sets,
                                              const InferenceSettings& settings);
std::vector<ModelOutcome> score_models_parallel(const DesignBuilder& builder, std::size_t node,
                                                const std::vector<std::vector<std::size_t>>& sets,
                                                const InferenceSettings& settings);

}  // namespace kernels

// Normalizes scored models in the log domain. Throws NumericalError if every
// model was excluded.
NodePosterior normalize_posterior(std::size_t node, const std::vector<std::vector<std::size_t>>& sets,
                                  const std::vector<ModelOutcome>& outcomes);

NodePosterior infer_node(std::size_t node, const DesignBuilder& builder, const InferenceSettings& settings);
NodePosterior infer_node(std::size_t node, const TimeCourseDataset& data, const InterventionDesign& design,
                         const InferenceSettings& settings);

EdgeProbabilityMatrix edge_probabilities(const std::vector<NodePosterior>& posteriors);

struct NetworkPosterior {
  EdgeProbabilityMatrix edges;
  std::vector<NodePosterior> nodes;
};

NetworkPosterior infer_network(const DesignBuilder& builder, const InferenceSettings& settings);
NetworkPosterior infer_network(const TimeCourseDataset& data, const InterventionDesign& design,
                               const InferenceSettings& settings);

// Posterior expected fitted values, same shape as the dataset.
class FittedSeries {
 public:
  FittedSeries(std::size_t p, std::size_t num_conditions, std::size_t num_times)
      : p_(p), c_(num_conditions), t_(num_times), values_(p * num_conditions * num_times, 0.0) {}

  std::size_t num_nodes() const { return p_; }
  std::size_t num_conditions() const { return c_; }
  std::size_t num_times() const { return t_; }
  double operator()(std::size_t node, std::size_t condition, std::size_t time) const {
    return values_[(node * c_ + condition) * t_ + time];
  }
  double& operator()(std::size_t node, std::size_t condition, std::size_t time) {
    return values_[(node * c_ + condition) * t_ + time];
  }

 private:
  std::size_t p_, c_, t_;
  std::vector<double> values_;
};

// Model-averaged fits. Each model contributes X0 α̂ + Xγ β̂ with α̂ the least
// squares intercepts and β̂ = g/(g+1) times the least-squares coefficients.
FittedSeries fitted_values(const std::vector<NodePosterior>& posteriors, const DesignBuilder& builder,
                           const LikelihoodOptions& opts = {});
Eigen::VectorXd fitted_node(const NodePosterior& posterior, const DesignBuilder& builder,
                            const LikelihoodOptions& opts = {});

}  // namespace cdbn
