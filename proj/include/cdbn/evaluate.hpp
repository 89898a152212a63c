#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "cdbn/data.hpp"
#include "cdbn/inference.hpp"

namespace cdbn {

using Adjacency = std::vector<std::vector<bool>>;

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0,0) endpoint
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
};

// Points are ordered by decreasing threshold, so both rates are
// nondecreasing; the first point is (0,0) and the last (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
  RocPoint operating_point;  // threshold 1/2
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// Confusion counts of one classifier as a step function of the threshold
// under the rule "positive iff score >= τ". Several instances can be pooled
// on a shared threshold grid.
class RocInstance {
 public:
  struct Step {
    double threshold;
    std::size_t true_positives;
    std::size_t false_positives;
  };

  RocInstance(std::vector<Step> steps, std::size_t positives, std::size_t negatives);

  std::size_t positives() const { return positives_; }
  std::size_t negatives() const { return negatives_; }
  const std::vector<Step>& steps() const { return steps_; }
  // Counts at threshold τ.
  Step at(double tau) const;

 private:
  std::vector<Step> steps_;  // decreasing threshold
  std::size_t positives_;
  std::size_t negatives_;
};

// Sweep over every distinct threshold of all instances plus {0, 1}; counts
// are summed across instances at each τ. Throws InputError if the pooled
// positives or negatives are zero.
RocCurve pooled_roc(const std::vector<RocInstance>& instances);
RocCurve roc_curve(const RocInstance& instance);

// Trapezoidal area under ordered points.
double trapezoid_auc(const std::vector<RocPoint>& points);

// Score matrix (i,j) for edge i -> j; used for posterior edge probabilities
// and the correlation baseline alike.
RocInstance edge_instance(const EdgeProbabilityMatrix& scores, const Adjacency& truth, bool include_self = true);
RocCurve roc_edges(const EdgeProbabilityMatrix& scores, const Adjacency& truth, bool include_self = true);

struct TTestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Two-sided paired t-test on x − y. Throws NumericalError if the differences
// have zero variance and InputError on a length mismatch or fewer than two
// pairs.
TTestResult paired_t_test(const std::vector<double>& x, const std::vector<double>& y);

// Student t distribution function, via the regularized incomplete beta.
double student_t_cdf(double t, double df);
double regularized_incomplete_beta(double a, double b, double x);

struct DescendancyResult {
  std::set<std::size_t> nodes;
  std::vector<double> p_values;       // NaN where the test was degenerate
  std::vector<std::string> warnings;  // one per excluded node
};

// Nodes whose time-matched levels differ between the two conditions by a
// paired t-test at level `alpha`. The target itself is not tested.
DescendancyResult descendancy_sets(const TimeCourseDataset& data, std::size_t target,
                                   const std::string& baseline_condition,
                                   const std::string& inhibited_condition, double alpha = 0.05);

enum class DescendancyMode { Descendants, Children };
DescendancyMode parse_descendancy_mode(const std::string& s);

// Nodes reachable from `target` by directed paths (Descendants) or by one
// edge (Children) in `graph`; the target itself is never included.
std::set<std::size_t> reachable_from(const Adjacency& graph, std::size_t target, DescendancyMode mode);

RocInstance descendancy_instance(const EdgeProbabilityMatrix& probs, std::size_t target,
                                 const std::set<std::size_t>& truth, DescendancyMode mode);
RocCurve roc_descendancy(const EdgeProbabilityMatrix& probs, std::size_t target,
                         const std::set<std::size_t>& truth, DescendancyMode mode);

// |Pearson correlation| between x_{i,c,t-1} and x_{j,c,t}, pooled across
// conditions over t > 0.
EdgeProbabilityMatrix lagged_correlation_scores(const TimeCourseDataset& data);

}  // namespace cdbn
