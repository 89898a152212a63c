#include "cdbn/design.hpp"

#include <algorithm>
#include <sstream>

#include "cdbn/errors.hpp"

namespace cdbn {

namespace {

// Columns whose norm drops by this factor under projection lie in span(X0).
constexpr double kSpanTolerance = 1e-10;
constexpr double kRankThreshold = 1e-10;

std::string join_names(const std::vector<std::size_t>& idx, const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) out += '+';
    out += idx[k] < names.size() ? names[idx[k]] : std::to_string(idx[k]);
  }
  return out;
}

}  // namespace

bool ParentSet::contains(std::size_t i) const {
  return std::binary_search(parents.begin(), parents.end(), i);
}

void validate_parent_set(const ParentSet& pset, std::size_t num_nodes, std::size_t max_indegree) {
  if (pset.node >= num_nodes) throw InputError("parent set target node out of range");
  if (pset.parents.size() > max_indegree) throw InputError("parent set exceeds the in-degree bound");
  for (std::size_t k = 0; k < pset.parents.size(); ++k) {
    if (pset.parents[k] >= num_nodes) throw InputError("parent index out of range");
    if (k && pset.parents[k] <= pset.parents[k - 1])
      throw InputError("parent set must be sorted and free of duplicates");
  }
}

std::string ColumnTag::label(const std::vector<std::string>& names) const {
  auto name = [&](std::size_t i) { return i < names.size() ? names[i] : std::to_string(i); };
  switch (kind) {
    case Kind::Parent: return name(parent);
    case Kind::MechanismCopy:
      return name(parent) + (inhibited_regime ? "@inhibited" : "@uninhibited");
    case Kind::FixedEffect: return "fixed-effect(" + join_names(targets, names) + ")";
  }
  return "?";
}

Eigen::MatrixXd intercept_design(std::size_t num_conditions, std::size_t num_times) {
  const auto n = static_cast<Eigen::Index>(num_conditions * num_times);
  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(n, 2);
  for (std::size_t c = 0; c < num_conditions; ++c)
    for (std::size_t t = 0; t < num_times; ++t)
      x0(static_cast<Eigen::Index>(c * num_times + t), t > 0 ? 0 : 1) = 1.0;
  return x0;
}

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& x0) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x0);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() != x0.cols()) throw NumericalError("intercept design X0 is rank deficient");
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(x0.rows(), x0.cols());
  return q;
}

}  // namespace

Eigen::MatrixXd orthogonalize(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& x_raw) {
  if (x0.rows() != x_raw.rows()) throw NumericalError("orthogonalize: row count mismatch");
  const Eigen::MatrixXd q = orthonormal_basis(x0);
  return x_raw - q * (q.transpose() * x_raw);
}

DesignBuilder::DesignBuilder(const TimeCourseDataset& data, const ResolvedDesign& design)
    : num_nodes_(data.num_nodes()),
      num_conditions_(data.num_conditions()),
      num_times_(data.num_times()),
      node_names_(data.node_names()),
      design_(design),
      x0_(intercept_design(data.num_conditions(), data.num_times())),
      x0_basis_(orthonormal_basis(x0_)) {
  if (design.num_nodes() != num_nodes_ || design.num_conditions() != num_conditions_)
    throw InputError("intervention design does not match dataset dimensions");
  const auto n = static_cast<Eigen::Index>(data.num_rows());
  const auto p = static_cast<Eigen::Index>(num_nodes_);
  lagged_ = Eigen::MatrixXd::Zero(n, p);
  responses_.resize(n, p);
  for (std::size_t k = 0; k < num_nodes_; ++k) {
    for (std::size_t c = 0; c < num_conditions_; ++c) {
      for (std::size_t t = 0; t < num_times_; ++t) {
        const auto r = static_cast<Eigen::Index>(data.row(c, t));
        responses_(r, static_cast<Eigen::Index>(k)) = data.value(k, c, t);
        if (t > 0) lagged_(r, static_cast<Eigen::Index>(k)) = data.value(k, c, t - 1);
      }
    }
  }
}

Eigen::VectorXd DesignBuilder::condition_indicator(const std::vector<char>& conditions) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(lagged_.rows());
  for (std::size_t c = 0; c < num_conditions_; ++c)
    if (conditions[c])
      v.segment(static_cast<Eigen::Index>(c * num_times_), static_cast<Eigen::Index>(num_times_))
          .setOnes();
  return v;
}

Eigen::MatrixXd DesignBuilder::project_out_intercepts(const Eigen::MatrixXd& x) const {
  return x - x0_basis_ * (x0_basis_.transpose() * x);
}

DesignPair DesignBuilder::build(const ParentSet& pset) const {
  validate_parent_set(pset, num_nodes_, num_nodes_);
  const std::size_t j = pset.node;
  const InterventionScheme scheme = design_.scheme();
  const bool active = scheme.kind != InterventionKind::None;
  const bool out = scheme.direction == InterventionDirection::Out;
  const auto T = static_cast<Eigen::Index>(num_times_);

  auto conditions_of = [&](std::size_t node) {
    std::vector<char> mask(num_conditions_, 0);
    if (active)
      for (std::size_t c = 0; c < num_conditions_; ++c) mask[c] = design_.inhibited(node, c) ? 1 : 0;
    return mask;
  };
  auto any = [](const std::vector<char>& m) { return std::any_of(m.begin(), m.end(), [](char v) { return v; }); };
  const std::vector<char> child_mask = conditions_of(j);
  const bool child_inhibited = any(child_mask);

  std::vector<Eigen::VectorXd> columns;
  std::vector<ColumnTag> tags;
  columns.reserve(pset.parents.size() * 2 + 2);

  for (std::size_t i : pset.parents) {
    Eigen::VectorXd col = lagged_.col(static_cast<Eigen::Index>(i));
    // Regime that governs this column: the parent's own (out) or the child's (in).
    const std::vector<char> regime = out ? conditions_of(i) : child_mask;

    if (scheme.zeroes_columns()) {
      for (std::size_t c = 0; c < num_conditions_; ++c)
        if (regime[c]) col.segment(static_cast<Eigen::Index>(c) * T, T).setZero();
    }
    if (scheme.splits_mechanism() && any(regime)) {
      const Eigen::VectorXd ind = condition_indicator(regime);
      Eigen::VectorXd off = col.cwiseProduct(Eigen::VectorXd::Ones(col.size()) - ind);
      Eigen::VectorXd on = col.cwiseProduct(ind);
      columns.push_back(std::move(off));
      tags.push_back({ColumnTag::Kind::MechanismCopy, i, false, {}});
      columns.push_back(std::move(on));
      tags.push_back({ColumnTag::Kind::MechanismCopy, i, true, {}});
      continue;
    }
    columns.push_back(std::move(col));
    tags.push_back({ColumnTag::Kind::Parent, i, false, {}});
  }

  if (scheme.adds_fixed_effects()) {
    // Identical condition sets share a single indicator.
    std::vector<std::pair<std::vector<char>, std::vector<std::size_t>>> groups;
    auto add = [&](std::size_t target, const std::vector<char>& mask) {
      for (auto& g : groups)
        if (g.first == mask) {
          g.second.push_back(target);
          return;
        }
      groups.push_back({mask, {target}});
    };
    if (out) {
      for (std::size_t i : pset.parents) {
        const auto mask = conditions_of(i);
        if (any(mask)) add(i, mask);
      }
    } else if (child_inhibited) {
      add(j, child_mask);
    }
    for (auto& [mask, targets] : groups) {
      columns.push_back(condition_indicator(mask));
      tags.push_back({ColumnTag::Kind::FixedEffect, 0, false, targets});
    }
  }

  DesignPair dp;
  dp.x0 = x0_;
  dp.response = responses_.col(static_cast<Eigen::Index>(j));
  const auto n = lagged_.rows();
  const auto b = static_cast<Eigen::Index>(columns.size());
  dp.x_raw.resize(n, b);
  for (Eigen::Index k = 0; k < b; ++k) dp.x_raw.col(k) = columns[static_cast<std::size_t>(k)];
  dp.tags = std::move(tags);

  auto fail = [&](Eigen::Index k, const std::string& why) {
    const std::string label = dp.tags[static_cast<std::size_t>(k)].label(node_names_);
    std::ostringstream os;
    os << "rank-deficient design for node " << node_names_[j] << ": column " << k << " ("
       << label << ") " << why;
    throw RankDeficientError(label, os.str());
  };

  for (Eigen::Index k = 0; k < b; ++k)
    if (dp.x_raw.col(k).cwiseAbs().maxCoeff() == 0.0) fail(k, "is a column of zeros");

  dp.x_gamma = project_out_intercepts(dp.x_raw);
  for (Eigen::Index k = 0; k < b; ++k)
    if (dp.x_gamma.col(k).norm() <= kSpanTolerance * dp.x_raw.col(k).norm())
      fail(k, "lies in the span of the intercept columns");

  if (b > 1) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dp.x_gamma);
    qr.setThreshold(kRankThreshold);
    if (qr.rank() < b) fail(qr.colsPermutation().indices()(qr.rank()), "is linearly dependent on the others");
  }
  return dp;
}

DesignPair build_design(const TimeCourseDataset& data, const InterventionDesign& design,
                        const ParentSet& pset) {
  const ResolvedDesign resolved(design, data);
  return DesignBuilder(data, resolved).build(pset);
}

}  // namespace cdbn
