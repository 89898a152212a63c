#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cdbn/data.hpp"

namespace cdbn {

using Adjacency = std::vector<std::vector<bool>>;

// Ground-truth linear DBN: coef(i, j) is the coefficient of parent i in the
// equation of node j; zero means no edge.
struct WeightedGraph {
  std::vector<std::string> node_names;
  Eigen::MatrixXd coef;
  Eigen::VectorXd intercept_later;    // α1, t > 0
  Eigen::VectorXd intercept_initial;  // α2, t = 0
  Eigen::VectorXd sigma;

  std::size_t size() const { return node_names.size(); }
  Adjacency topology() const;
};

struct SimulationCondition {
  std::string label;
  std::vector<std::string> inhibited;
};

struct SimulationConfig {
  std::size_t num_times = 8;
  std::vector<SimulationCondition> conditions;
  // Generating regime; interventions act on outgoing edges ("-out" forms).
  InterventionKind regime = InterventionKind::None;
  // Additive shift on children of an inhibited node, per target name.
  std::map<std::string, double> fixed_effect_shift;
  double default_shift = -1.0;
  // Whether the shift also acts on the first observation (t = 0), matching
  // fixed-effect indicators that cover t = 0 in the analysis model.
  bool shift_first_observation = true;
  // Coefficients used under intervention by the mechanism-change regime;
  // sampled with the replicate's coefficients when unset.
  std::optional<Eigen::MatrixXd> mechanism_coef;
  double sigma = 0.5;
  std::uint64_t seed = 1;
  std::size_t replicates = 1;
};

// Four conditions: none; A; B; A and B.
std::vector<SimulationCondition> standard_conditions(const std::string& a, const std::string& b);

// Bundled 15-node network: a three-layer cascade from the hubs "A" and "B"
// (and C, D), with a self-loop on every node.
std::pair<std::vector<std::string>, Adjacency> default_topology();

// Coefficients uniform on (-1,-0.5] ∪ [0.5,1): fair sign, magnitude on [0.5,1).
// Intercepts 0, noise scale `sigma`.
WeightedGraph sample_coefficients(const std::vector<std::string>& node_names, const Adjacency& topology,
                                  std::uint64_t seed, double sigma = 0.5);
double sample_edge_coefficient(class CounterRng& rng);

struct SimulatedReplicate {
  TimeCourseDataset data;
  InterventionDesign design;
};

// Mean of x_{j,c,t} given the previous time slice (t > 0), or of the first
// observation when `previous` is empty. `inhibited` lists per-node flags for
// the condition.
double conditional_mean(const WeightedGraph& wg, const Eigen::MatrixXd& mechanism_coef,
                        const SimulationConfig& cfg, std::size_t node, const std::vector<char>& inhibited,
                        const Eigen::VectorXd* previous);

// One replicate. Noise is drawn from substream ("noise", replicate).
SimulatedReplicate simulate_dataset(const WeightedGraph& wg, const SimulationConfig& cfg,
                                    std::size_t replicate = 0);

// Coefficients and data for replicate r from one top-level seed.
struct StudyReplicate {
  WeightedGraph truth;
  SimulatedReplicate sample;
};
StudyReplicate simulate_replicate(const std::vector<std::string>& node_names, const Adjacency& topology,
                                  const SimulationConfig& cfg, std::size_t replicate);

}  // namespace cdbn
