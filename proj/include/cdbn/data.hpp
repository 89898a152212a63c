#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cdbn {

// Log-expression values x[node, condition, time]. Rows of a condition are
// stored in ascending time order; immutable after construction.
class TimeCourseDataset {
 public:
  TimeCourseDataset(std::vector<std::string> node_names,
                    std::vector<std::string> conditions,
                    std::vector<double> times,
                    std::vector<double> values);

  std::size_t num_nodes() const { return node_names_.size(); }
  std::size_t num_conditions() const { return conditions_.size(); }
  std::size_t num_times() const { return times_.size(); }
  // n = T * |C|, the number of observations per node.
  std::size_t num_rows() const { return num_conditions() * num_times(); }

  const std::vector<std::string>& node_names() const { return node_names_; }
  const std::vector<std::string>& conditions() const { return conditions_; }
  const std::vector<double>& times() const { return times_; }

  double value(std::size_t node, std::size_t condition, std::size_t time) const {
    return values_[(node * num_conditions() + condition) * num_times() + time];
  }

  // Row index of observation (condition, time) in the stacked regression.
  std::size_t row(std::size_t condition, std::size_t time) const {
    return condition * num_times() + time;
  }

  std::size_t node_index(std::string_view name) const;
  std::size_t condition_index(std::string_view label) const;
  bool has_condition(std::string_view label) const;

  // Same values with node order permuted: new node k is old node perm[k].
  TimeCourseDataset permuted(const std::vector<std::size_t>& perm) const;
  // Copy with the response of one node replaced.
  TimeCourseDataset with_node_values(std::size_t node, const std::vector<double>& series) const;

 private:
  std::vector<std::string> node_names_;
  std::vector<std::string> conditions_;
  std::vector<double> times_;
  std::vector<double> values_;  // node-major, then condition, then time
};

enum class InterventionKind { None, Perfect, FixedEffect, MechanismChange, PerfectFixedEffect };
enum class InterventionDirection { In, Out };

// Perfect and MechanismChange cannot be combined: there is no kind for it.
struct InterventionScheme {
  InterventionKind kind = InterventionKind::None;
  InterventionDirection direction = InterventionDirection::Out;

  bool zeroes_columns() const {
    return kind == InterventionKind::Perfect || kind == InterventionKind::PerfectFixedEffect;
  }
  bool adds_fixed_effects() const {
    return kind == InterventionKind::FixedEffect || kind == InterventionKind::PerfectFixedEffect;
  }
  bool splits_mechanism() const { return kind == InterventionKind::MechanismChange; }

  friend bool operator==(const InterventionScheme&, const InterventionScheme&) = default;
};

// CLI spellings: none, perfect, fixed, perfect-fixed, mechanism; in, out.
InterventionKind parse_intervention_kind(std::string_view s);
InterventionDirection parse_intervention_direction(std::string_view s);
std::string to_string(InterventionKind kind);
std::string to_string(InterventionDirection direction);
std::string to_string(const InterventionScheme& scheme);

// Condition label -> inhibited node names, as read from the design JSON.
// Names are resolved against a dataset by resolve().
struct InterventionDesign {
  std::map<std::string, std::vector<std::string>> targets;
  InterventionScheme scheme;
};

// Design resolved to indices: inhibited(node, condition).
class ResolvedDesign {
 public:
  ResolvedDesign(const InterventionDesign& design, const TimeCourseDataset& data);
  // All conditions uninhibited.
  ResolvedDesign(InterventionScheme scheme, std::size_t num_nodes, std::size_t num_conditions);

  const InterventionScheme& scheme() const { return scheme_; }
  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_conditions() const { return num_conditions_; }

  bool inhibited(std::size_t node, std::size_t condition) const {
    return mask_[node * num_conditions_ + condition] != 0;
  }
  bool inhibited_anywhere(std::size_t node) const;
  // Whether the scheme has any effect at all on the regressions.
  bool active() const;

 private:
  InterventionScheme scheme_;
  std::size_t num_nodes_;
  std::size_t num_conditions_;
  std::vector<char> mask_;
};

// Prior graph G0 (parent view: graph[i][j] means edge i -> j) and penalty λ.
struct NetworkPrior {
  std::vector<std::vector<bool>> graph;
  double lambda = 0.0;

  static NetworkPrior empty(std::size_t p) {
    return {std::vector<std::vector<bool>>(p, std::vector<bool>(p, false)), 0.0};
  }
  std::vector<std::size_t> parents_of(std::size_t j) const;
};

struct LoadOptions {
  // Replace every value v by log(v); nonpositive values are rejected.
  bool log_transform = false;
};

TimeCourseDataset load_dataset(const std::filesystem::path& path, const LoadOptions& opts = {});
TimeCourseDataset parse_dataset(std::istream& in, const std::string& source_name,
                                const LoadOptions& opts = {});
// Wide CSV with shortest round-trip decimal formatting.
void write_dataset(const TimeCourseDataset& data, std::ostream& out);
void write_dataset(const TimeCourseDataset& data, const std::filesystem::path& path);

InterventionDesign load_intervention_design(const std::filesystem::path& path, InterventionScheme scheme);
InterventionDesign parse_intervention_design(std::string_view json_text, InterventionScheme scheme);
void write_intervention_design(const InterventionDesign& design, const std::filesystem::path& path);

// Edge-list CSV with header `parent,child`.
std::vector<std::vector<bool>> load_edge_list(const std::filesystem::path& path,
                                              const std::vector<std::string>& node_names);
std::vector<std::vector<bool>> parse_edge_list(std::istream& in, const std::string& source_name,
                                               const std::vector<std::string>& node_names);
void write_edge_list(const std::vector<std::vector<bool>>& graph,
                     const std::vector<std::string>& node_names, std::ostream& out);

NetworkPrior load_network_prior(const std::filesystem::path& path,
                                const std::vector<std::string>& node_names, double lambda);

// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace cdbn
