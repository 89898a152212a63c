#include "cdbn/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "cdbn/errors.hpp"

namespace cdbn {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string location(const std::string& source, std::size_t line, const std::string& column) {
  std::ostringstream os;
  os << source << ": line " << line << ", column '" << column << "'";
  return os.str();
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

}  // namespace

TimeCourseDataset::TimeCourseDataset(std::vector<std::string> node_names,
                                     std::vector<std::string> conditions,
                                     std::vector<double> times, std::vector<double> values)
    : node_names_(std::move(node_names)),
      conditions_(std::move(conditions)),
      times_(std::move(times)),
      values_(std::move(values)) {
  if (node_names_.empty()) throw InputError("dataset needs at least one node");
  if (conditions_.empty()) throw InputError("dataset needs at least one condition");
  if (times_.size() < 2) throw InputError("dataset needs at least two time points");
  if (values_.size() != num_nodes() * num_rows())
    throw InputError("dataset value array has wrong size");
  if (std::set<std::string>(node_names_.begin(), node_names_.end()).size() != node_names_.size())
    throw InputError("duplicate node name");
  if (std::set<std::string>(conditions_.begin(), conditions_.end()).size() != conditions_.size())
    throw InputError("duplicate condition label");
  for (std::size_t t = 1; t < times_.size(); ++t)
    if (!(times_[t] > times_[t - 1])) throw InputError("time stamps must be strictly increasing");
  for (double v : values_)
    if (!std::isfinite(v)) throw InputError("dataset contains a non-finite value");
}

std::size_t TimeCourseDataset::node_index(std::string_view name) const {
  const auto it = std::find(node_names_.begin(), node_names_.end(), name);
  if (it == node_names_.end()) throw InputError("unknown node '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - node_names_.begin());
}

std::size_t TimeCourseDataset::condition_index(std::string_view label) const {
  const auto it = std::find(conditions_.begin(), conditions_.end(), label);
  if (it == conditions_.end()) throw InputError("unknown condition '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - conditions_.begin());
}

bool TimeCourseDataset::has_condition(std::string_view label) const {
  return std::find(conditions_.begin(), conditions_.end(), label) != conditions_.end();
}

TimeCourseDataset TimeCourseDataset::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != num_nodes()) throw InputError("permutation has wrong length");
  std::vector<std::string> names(num_nodes());
  std::vector<double> values(values_.size());
  const std::size_t block = num_rows();
  for (std::size_t k = 0; k < perm.size(); ++k) {
    names[k] = node_names_.at(perm[k]);
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(perm[k] * block), block,
                values.begin() + static_cast<std::ptrdiff_t>(k * block));
  }
  return TimeCourseDataset(std::move(names), conditions_, times_, std::move(values));
}

TimeCourseDataset TimeCourseDataset::with_node_values(std::size_t node,
                                                      const std::vector<double>& series) const {
  if (node >= num_nodes() || series.size() != num_rows())
    throw InputError("replacement series has wrong shape");
  std::vector<double> values = values_;
  std::copy(series.begin(), series.end(),
            values.begin() + static_cast<std::ptrdiff_t>(node * num_rows()));
  return TimeCourseDataset(node_names_, conditions_, times_, std::move(values));
}

// ---------------------------------------------------------------------------
// Schemes

InterventionKind parse_intervention_kind(std::string_view s) {
  if (s == "none") return InterventionKind::None;
  if (s == "perfect") return InterventionKind::Perfect;
  if (s == "fixed" || s == "fixed-effect") return InterventionKind::FixedEffect;
  if (s == "mechanism" || s == "mechanism-change") return InterventionKind::MechanismChange;
  if (s == "perfect-fixed" || s == "perfect-fixed-effect") return InterventionKind::PerfectFixedEffect;
  if (s.find("perfect") != std::string_view::npos && s.find("mechanism") != std::string_view::npos)
    throw InputError("perfect and mechanism-change interventions cannot be combined "
                     "(the perfect zeroing would leave a column of zeros)");
  throw InputError("unknown intervention scheme '" + std::string(s) + "'");
}

InterventionDirection parse_intervention_direction(std::string_view s) {
  if (s == "in") return InterventionDirection::In;
  if (s == "out") return InterventionDirection::Out;
  throw InputError("unknown intervention direction '" + std::string(s) + "'");
}

std::string to_string(InterventionKind kind) {
  switch (kind) {
    case InterventionKind::None: return "none";
    case InterventionKind::Perfect: return "perfect";
    case InterventionKind::FixedEffect: return "fixed";
    case InterventionKind::MechanismChange: return "mechanism";
    case InterventionKind::PerfectFixedEffect: return "perfect-fixed";
  }
  return "?";
}

std::string to_string(InterventionDirection direction) {
  return direction == InterventionDirection::In ? "in" : "out";
}

std::string to_string(const InterventionScheme& scheme) {
  if (scheme.kind == InterventionKind::None) return "none";
  return to_string(scheme.kind) + "-" + to_string(scheme.direction);
}

ResolvedDesign::ResolvedDesign(const InterventionDesign& design, const TimeCourseDataset& data)
    : scheme_(design.scheme),
      num_nodes_(data.num_nodes()),
      num_conditions_(data.num_conditions()),
      mask_(num_nodes_ * num_conditions_, 0) {
  for (const auto& [label, names] : design.targets) {
    if (!data.has_condition(label))
      throw InputError("intervention design names condition '" + label +
                       "' which is absent from the dataset");
    const std::size_t c = data.condition_index(label);
    for (const auto& name : names) mask_[data.node_index(name) * num_conditions_ + c] = 1;
  }
}

ResolvedDesign::ResolvedDesign(InterventionScheme scheme, std::size_t num_nodes,
                               std::size_t num_conditions)
    : scheme_(scheme),
      num_nodes_(num_nodes),
      num_conditions_(num_conditions),
      mask_(num_nodes * num_conditions, 0) {}

bool ResolvedDesign::inhibited_anywhere(std::size_t node) const {
  for (std::size_t c = 0; c < num_conditions_; ++c)
    if (inhibited(node, c)) return true;
  return false;
}

bool ResolvedDesign::active() const {
  return scheme_.kind != InterventionKind::None &&
         std::any_of(mask_.begin(), mask_.end(), [](char v) { return v != 0; });
}

std::vector<std::size_t> NetworkPrior::parents_of(std::size_t j) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < graph.size(); ++i)
    if (graph[i][j]) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------
// Dataset CSV

TimeCourseDataset parse_dataset(std::istream& in, const std::string& source, const LoadOptions& opts) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.size() < 3 || header[0] != "condition" || header[1] != "time")
    throw InputError(source + ": header must be `condition,time,<node1>,...`");
  std::vector<std::string> nodes(header.begin() + 2, header.end());
  for (const auto& name : nodes)
    if (name.empty()) throw InputError(source + ": empty node name in header");
  const std::size_t p = nodes.size();

  struct Row {
    std::string condition;
    double time;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  std::vector<std::string> condition_order;
  std::set<std::pair<std::string, double>> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      std::ostringstream os;
      os << source << ": line " << line_no << " has " << cells.size() << " cells, expected "
         << header.size();
      throw InputError(os.str());
    }
    Row row;
    row.condition = cells[0];
    if (row.condition.empty())
      throw InputError("missing value at " + location(source, line_no, "condition"));
    if (cells[1].empty()) throw InputError("missing value at " + location(source, line_no, "time"));
    if (!parse_number(cells[1], row.time) || !std::isfinite(row.time))
      throw InputError("non-numeric value '" + cells[1] + "' at " + location(source, line_no, "time"));
    if (!seen.emplace(row.condition, row.time).second) {
      std::ostringstream os;
      os << source << ": duplicate (condition,time) = (" << row.condition << ","
         << cells[1] << ") at line " << line_no;
      throw InputError(os.str());
    }
    row.values.resize(p);
    for (std::size_t k = 0; k < p; ++k) {
      const auto& cell = cells[k + 2];
      if (cell.empty()) throw InputError("missing value at " + location(source, line_no, nodes[k]));
      double v = 0.0;
      if (!parse_number(cell, v) || !std::isfinite(v))
        throw InputError("non-numeric value '" + cell + "' at " + location(source, line_no, nodes[k]));
      if (opts.log_transform) {
        if (v <= 0.0)
          throw InputError("nonpositive value at " + location(source, line_no, nodes[k]) +
                           " cannot be log-transformed");
        v = std::log(v);
      }
      row.values[k] = v;
    }
    if (std::find(condition_order.begin(), condition_order.end(), row.condition) ==
        condition_order.end())
      condition_order.push_back(row.condition);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(source + ": no data rows");

  // Every condition must share the same set of time stamps.
  std::map<std::string, std::vector<const Row*>> by_condition;
  for (const auto& r : rows) by_condition[r.condition].push_back(&r);
  std::vector<double> times;
  for (const auto& label : condition_order) {
    auto& group = by_condition[label];
    std::sort(group.begin(), group.end(), [](const Row* a, const Row* b) { return a->time < b->time; });
    std::vector<double> t;
    for (const Row* r : group) t.push_back(r->time);
    if (times.empty()) {
      times = t;
    } else if (t != times) {
      throw InputError(source + ": condition '" + label +
                       "' does not have the same time points as '" + condition_order.front() + "'");
    }
  }

  const std::size_t C = condition_order.size();
  const std::size_t T = times.size();
  std::vector<double> values(p * C * T);
  for (std::size_t c = 0; c < C; ++c) {
    const auto& group = by_condition[condition_order[c]];
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < p; ++k) values[(k * C + c) * T + t] = group[t]->values[k];
  }
  return TimeCourseDataset(std::move(nodes), std::move(condition_order), std::move(times),
                           std::move(values));
}

TimeCourseDataset load_dataset(const std::filesystem::path& path, const LoadOptions& opts) {
  auto in = open_input(path);
  return parse_dataset(in, path.string(), opts);
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_dataset(const TimeCourseDataset& data, std::ostream& out) {
  out << "condition,time";
  for (const auto& name : data.node_names()) out << ',' << name;
  out << '\n';
  for (std::size_t c = 0; c < data.num_conditions(); ++c) {
    for (std::size_t t = 0; t < data.num_times(); ++t) {
      out << data.conditions()[c] << ',' << format_double(data.times()[t]);
      for (std::size_t k = 0; k < data.num_nodes(); ++k) out << ',' << format_double(data.value(k, c, t));
      out << '\n';
    }
  }
}

void write_dataset(const TimeCourseDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_dataset(data, out);
}

// ---------------------------------------------------------------------------
// Intervention design JSON

InterventionDesign parse_intervention_design(std::string_view json_text, InterventionScheme scheme) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("malformed intervention design JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("intervention design must be a JSON object");
  InterventionDesign design;
  design.scheme = scheme;
  for (const auto& [label, targets] : doc.items()) {
    if (!targets.is_array())
      throw InputError("intervention targets for condition '" + label + "' must be an array");
    auto& names = design.targets[label];
    for (const auto& t : targets) {
      if (!t.is_string())
        throw InputError("intervention target in condition '" + label + "' is not a node name");
      names.push_back(t.get<std::string>());
    }
  }
  return design;
}

InterventionDesign load_intervention_design(const std::filesystem::path& path, InterventionScheme scheme) {
  auto in = open_input(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_intervention_design(ss.str(), scheme);
}

void write_intervention_design(const InterventionDesign& design, const std::filesystem::path& path) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto& [label, names] : design.targets) doc[label] = names;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Edge lists

std::vector<std::vector<bool>> parse_edge_list(std::istream& in, const std::string& source,
                                               const std::vector<std::string>& node_names) {
  const std::size_t p = node_names.size();
  std::vector<std::vector<bool>> graph(p, std::vector<bool>(p, false));
  auto index = [&](const std::string& name, std::size_t line_no) {
    const auto it = std::find(node_names.begin(), node_names.end(), name);
    if (it == node_names.end()) {
      std::ostringstream os;
      os << source << ": line " << line_no << ": unknown node '" << name << "'";
      throw InputError(os.str());
    }
    return static_cast<std::size_t>(it - node_names.begin());
  };
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (!header_seen) {
      if (cells.size() != 2 || cells[0] != "parent" || cells[1] != "child")
        throw InputError(source + ": edge list header must be `parent,child`");
      header_seen = true;
      continue;
    }
    if (cells.size() != 2) {
      std::ostringstream os;
      os << source << ": line " << line_no << " must have two cells";
      throw InputError(os.str());
    }
    graph[index(cells[0], line_no)][index(cells[1], line_no)] = true;
  }
  if (!header_seen) throw InputError(source + ": empty edge list (header required)");
  return graph;
}

std::vector<std::vector<bool>> load_edge_list(const std::filesystem::path& path,
                                              const std::vector<std::string>& node_names) {
  auto in = open_input(path);
  return parse_edge_list(in, path.string(), node_names);
}

void write_edge_list(const std::vector<std::vector<bool>>& graph,
                     const std::vector<std::string>& node_names, std::ostream& out) {
  out << "parent,child\n";
  for (std::size_t i = 0; i < graph.size(); ++i)
    for (std::size_t j = 0; j < graph.size(); ++j)
      if (graph[i][j]) out << node_names[i] << ',' << node_names[j] << '\n';
}

NetworkPrior load_network_prior(const std::filesystem::path& path,
                                const std::vector<std::string>& node_names, double lambda) {
  if (lambda < 0.0) throw InputError("prior strength lambda must be nonnegative");
  return {load_edge_list(path, node_names), lambda};
}

}  // namespace cdbn
