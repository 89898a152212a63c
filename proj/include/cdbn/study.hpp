#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cdbn/evaluate.hpp"
#include "cdbn/inference.hpp"
#include "cdbn/simulate.hpp"

namespace cdbn {

// An analysis method: a CDBN under some intervention scheme ("-out"), or the
// lag-1 correlation baseline when `kind` is empty.
struct AnalysisMethod {
  std::string name;
  std::optional<InterventionKind> kind;
};

AnalysisMethod parse_method(const std::string& name);
InterventionKind parse_regime(const std::string& name);
std::vector<AnalysisMethod> default_methods();
std::vector<InterventionKind> default_regimes();

// Edge scores of one analysis on one dataset.
EdgeProbabilityMatrix analyse(const AnalysisMethod& method, const TimeCourseDataset& data,
                              const InterventionDesign& design, std::size_t max_indegree,
                              ExecutionPolicy execution = ExecutionPolicy::serial());

struct StudyConfig {
  std::vector<InterventionKind> regimes = default_regimes();
  std::vector<AnalysisMethod> methods = default_methods();
  std::size_t replicates = 20;
  std::uint64_t seed = 1;
  std::size_t max_indegree = 3;
  std::size_t num_times = 8;
  double sigma = 0.5;
  double shift = -1.0;
  bool shift_first_observation = true;
  std::vector<std::string> node_names;  // default topology when empty
  Adjacency topology;
  std::string target_a = "A";
  std::string target_b = "B";
  ExecutionPolicy execution;
};

struct StudyCell {
  InterventionKind regime;
  AnalysisMethod method;
  std::vector<double> aucs;           // per replicate, NaN on failure
  std::vector<std::string> failures;  // "replicate k: message"
  RocCurve pooled;                    // counts pooled over replicates

  double mean_auc() const;
  double sd_auc() const;
};

struct StudyResult {
  std::vector<StudyCell> cells;  // regime-major
  const StudyCell& cell(InterventionKind regime, const std::string& method) const;
};

// Methods of one regime ranked against the one with the highest mean AUC.
// A method ties with the best when a paired t-test on the per-replicate AUCs
// (replicates where both succeeded) does not reject at `alpha`.
struct RegimeRanking {
  InterventionKind regime;
  std::string best;
  std::vector<std::string> tied;  // includes the best method
  std::vector<double> p_values;   // per method vs best; 1 for the best itself
};
RegimeRanking rank_methods(const StudyResult& result, InterventionKind regime, double alpha = 0.05);

// The regime × method grid: each replicate draws coefficients and data from
// substreams of the seed; every method analyses the same replicate.
StudyResult run_study(const StudyConfig& cfg);

}  // namespace cdbn
