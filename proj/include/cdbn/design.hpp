#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cdbn/data.hpp"

namespace cdbn {

// Candidate parent set γ for one node. Parents are sorted and unique;
// self-edges are allowed.
struct ParentSet {
  std::size_t node = 0;
  std::vector<std::size_t> parents;

  std::size_t size() const { return parents.size(); }
  bool contains(std::size_t i) const;

  friend bool operator==(const ParentSet&, const ParentSet&) = default;
};

// Validates sortedness, uniqueness, index range and the in-degree bound.
void validate_parent_set(const ParentSet& pset, std::size_t num_nodes, std::size_t max_indegree);

// Provenance of one Xγ column.
struct ColumnTag {
  enum class Kind {
    Parent,          // lagged parent values (possibly zeroed by a perfect intervention)
    MechanismCopy,   // lagged parent values restricted to one regime
    FixedEffect,     // indicator of the conditions in which `targets` are inhibited
  };

  Kind kind = Kind::Parent;
  std::size_t parent = 0;             // Parent, MechanismCopy
  bool inhibited_regime = false;      // MechanismCopy: rows under intervention
  std::vector<std::size_t> targets;   // FixedEffect (merged indicators list every target)

  std::string label(const std::vector<std::string>& node_names) const;
  friend bool operator==(const ColumnTag&, const ColumnTag&) = default;
};

// Regression x = X0 α + Xγ β for one node and one parent set.
struct DesignPair {
  Eigen::MatrixXd x0;          // n × 2: [1{t>0}, 1{t=0}]
  Eigen::MatrixXd x_raw;       // n × b, augmented, before orthogonalization
  Eigen::MatrixXd x_gamma;     // n × b, orthogonal to x0
  Eigen::VectorXd response;    // n
  std::vector<ColumnTag> tags; // one per column of x_gamma

  Eigen::Index n() const { return response.size(); }
  Eigen::Index a() const { return x0.cols(); }
  Eigen::Index b() const { return x_gamma.cols(); }
};

// The two intercept indicators for a dataset with the given shape.
Eigen::MatrixXd intercept_design(std::size_t num_conditions, std::size_t num_times);

// (I - P0) x_raw, with P0 the projection onto the column space of x0.
// Throws NumericalError if x0 is rank deficient.
Eigen::MatrixXd orthogonalize(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x_raw);

// Builds designs for every (node, γ) of one dataset under one intervention
// design. Construction precomputes the lagged predictor matrix and the
// intercept projector; build() is const and safe to call concurrently.
class DesignBuilder {
 public:
  DesignBuilder(const TimeCourseDataset& data, const ResolvedDesign& design);

  // Throws RankDeficientError if Xγ is not of full column rank.
  DesignPair build(const ParentSet& pset) const;

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_rows() const { return static_cast<std::size_t>(lagged_.rows()); }
  const Eigen::MatrixXd& x0() const { return x0_; }
  const Eigen::MatrixXd& lagged() const { return lagged_; }
  Eigen::VectorXd response(std::size_t node) const { return responses_.col(static_cast<Eigen::Index>(node)); }
  const ResolvedDesign& design() const { return design_; }
  const std::vector<std::string>& node_names() const { return node_names_; }

 private:
  Eigen::VectorXd condition_indicator(const std::vector<char>& conditions) const;
  Eigen::MatrixXd project_out_intercepts(const Eigen::MatrixXd& x) const;

  std::size_t num_nodes_;
  std::size_t num_conditions_;
  std::size_t num_times_;
  std::vector<std::string> node_names_;
  ResolvedDesign design_;
  Eigen::MatrixXd x0_;
  Eigen::MatrixXd x0_basis_;   // orthonormal basis of span(x0)
  Eigen::MatrixXd lagged_;     // n × p, x_{i,c,t-1} (0 at t = 0)
  Eigen::MatrixXd responses_;  // n × p, x_{j,c,t}
};

DesignPair build_design(const TimeCourseDataset& data, const InterventionDesign& design,
                        const ParentSet& pset);

}  // namespace cdbn
