#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cdbn/design.hpp"
#include "cdbn/evaluate.hpp"
#include "cdbn/inference.hpp"

namespace cdbn {

// p×p CSV: header row `parent\child,<names>`, one row per parent.
void write_edge_csv(const EdgeProbabilityMatrix& edges, const std::vector<std::string>& names, std::ostream& out);
EdgeProbabilityMatrix read_edge_csv(std::istream& in, const std::string& source, std::vector<std::string>& names);
EdgeProbabilityMatrix load_edge_csv(const std::filesystem::path& path, std::vector<std::string>& names);

// Top-k models per node with their log scores, plus exclusions.
nlohmann::ordered_json posterior_summary(const std::vector<NodePosterior>& nodes,
                                         const std::vector<std::string>& names, std::size_t top_k);

// Same layout as the dataset CSV.
void write_fitted_csv(const FittedSeries& fitted, const TimeCourseDataset& data, std::ostream& out);

// Edges with probability >= threshold, labelled with the probability.
void write_dot(const EdgeProbabilityMatrix& edges, const std::vector<std::string>& names, double threshold,
               std::ostream& out);

void write_roc_csv(const RocCurve& curve, std::ostream& out);
nlohmann::ordered_json roc_summary(const RocCurve& curve);

// Column-by-column dump of one design for debugging.
void write_design_dump(const DesignPair& dp, const std::vector<std::string>& names, std::ostream& out);

}  // namespace cdbn
