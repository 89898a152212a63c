#include "cdbn/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cdbn/errors.hpp"

namespace cdbn {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string threshold_string(double tau) {
  if (std::isinf(tau)) return tau > 0 ? "inf" : "-inf";
  return format_double(tau);
}

}  // namespace

void write_edge_csv(const EdgeProbabilityMatrix& edges, const std::vector<std::string>& names, std::ostream& out) {
  out << "parent\\child";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out << names[i];
    for (std::size_t j = 0; j < edges.size(); ++j) out << ',' << format_double(edges(i, j));
    out << '\n';
  }
}

EdgeProbabilityMatrix read_edge_csv(std::istream& in, const std::string& source, std::vector<std::string>& names) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(source + ": empty edge-probability file");
  auto header = split(line);
  if (header.size() < 2) throw InputError(source + ": malformed edge-probability header");
  names.assign(header.begin() + 1, header.end());
  const std::size_t p = names.size();
  EdgeProbabilityMatrix e(p);
  for (std::size_t i = 0; i < p; ++i) {
    if (!std::getline(in, line)) throw InputError(source + ": expected " + std::to_string(p) + " rows");
    auto cells = split(line);
    if (cells.size() != p + 1 || cells[0] != names[i])
      throw InputError(source + ": row " + std::to_string(i + 1) + " does not match the header");
    for (std::size_t j = 0; j < p; ++j) {
      try {
        std::size_t used = 0;
        e(i, j) = std::stod(cells[j + 1], &used);
        if (used != cells[j + 1].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw InputError(source + ": non-numeric probability '" + cells[j + 1] + "' in row " + names[i]);
      }
    }
  }
  return e;
}

EdgeProbabilityMatrix load_edge_csv(const std::filesystem::path& path, std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return read_edge_csv(in, path.string(), names);
}

nlohmann::ordered_json posterior_summary(const std::vector<NodePosterior>& nodes,
                                         const std::vector<std::string>& names, std::size_t top_k) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& post : nodes) {
    std::vector<std::size_t> order(post.models.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return post.models[a].probability > post.models[b].probability;
    });
    nlohmann::ordered_json node;
    node["node"] = names[post.node];
    node["log_evidence"] = post.log_evidence;
    node["num_models"] = post.models.size();
    nlohmann::ordered_json top = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < std::min(top_k, order.size()); ++k) {
      const auto& m = post.models[order[k]];
      std::vector<std::string> parents;
      for (std::size_t i : m.pset.parents) parents.push_back(names[i]);
      top.push_back({{"parents", parents},
                     {"probability", m.probability},
                     {"log_marginal", m.score.log_marginal},
                     {"log_prior", m.score.log_prior},
                     {"log_posterior_unnorm", m.score.log_posterior_unnorm}});
    }
    node["top_models"] = top;
    nlohmann::ordered_json excluded = nlohmann::ordered_json::array();
    for (const auto& x : post.excluded) {
      std::vector<std::string> parents;
      for (std::size_t i : x.pset.parents) parents.push_back(names[i]);
      excluded.push_back({{"parents", parents}, {"reason", x.reason}});
    }
    node["excluded"] = excluded;
    doc.push_back(node);
  }
  return doc;
}

void write_fitted_csv(const FittedSeries& fitted, const TimeCourseDataset& data, std::ostream& out) {
  out << "condition,time";
  for (const auto& n : data.node_names()) out << ',' << n;
  out << '\n';
  for (std::size_t c = 0; c < data.num_conditions(); ++c)
    for (std::size_t t = 0; t < data.num_times(); ++t) {
      out << data.conditions()[c] << ',' << format_double(data.times()[t]);
      for (std::size_t j = 0; j < data.num_nodes(); ++j) out << ',' << format_double(fitted(j, c, t));
      out << '\n';
    }
}

void write_dot(const EdgeProbabilityMatrix& edges, const std::vector<std::string>& names, double threshold,
               std::ostream& out) {
  out << "digraph network {\n";
  for (const auto& n : names) out << "  \"" << n << "\";\n";
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = 0; j < edges.size(); ++j)
      if (edges(i, j) >= threshold) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", edges(i, j));
        out << "  \"" << names[i] << "\" -> \"" << names[j] << "\" [label=\"" << buf << "\"];\n";
      }
  out << "}\n";
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
  out << "threshold,fpr,tpr,true_positives,false_positives\n";
  for (const auto& pt : curve.points)
    out << threshold_string(pt.threshold) << ',' << format_double(pt.fpr) << ',' << format_double(pt.tpr) << ','
        << pt.true_positives << ',' << pt.false_positives << '\n';
}

nlohmann::ordered_json roc_summary(const RocCurve& curve) {
  return {{"auc", curve.auc},
          {"positives", curve.positives},
          {"negatives", curve.negatives},
          {"operating_point",
           {{"threshold", curve.operating_point.threshold},
            {"fpr", curve.operating_point.fpr},
            {"tpr", curve.operating_point.tpr},
            {"true_positives", curve.operating_point.true_positives},
            {"false_positives", curve.operating_point.false_positives}}}};
}

void write_design_dump(const DesignPair& dp, const std::vector<std::string>& names, std::ostream& out) {
  out << "row,response,x0_later,x0_initial";
  for (const auto& tag : dp.tags) out << ",raw:" << tag.label(names);
  for (const auto& tag : dp.tags) out << ",orth:" << tag.label(names);
  out << '\n';
  for (Eigen::Index r = 0; r < dp.n(); ++r) {
    out << r << ',' << format_double(dp.response(r)) << ',' << format_double(dp.x0(r, 0)) << ','
        << format_double(dp.x0(r, 1));
    for (Eigen::Index k = 0; k < dp.b(); ++k) out << ',' << format_double(dp.x_raw(r, k));
    for (Eigen::Index k = 0; k < dp.b(); ++k) out << ',' << format_double(dp.x_gamma(r, k));
    out << '\n';
  }
}

}  // namespace cdbn
