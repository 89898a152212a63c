#include <doctest.h>

#include <random>
#include <set>

#include "cdbn/design.hpp"
#include "cdbn/errors.hpp"
#include "support/oracles.hpp"

using namespace cdbn;

namespace {

const InterventionScheme kAllSchemes[] = {
    {InterventionKind::None, InterventionDirection::Out},
    {InterventionKind::Perfect, InterventionDirection::Out},
    {InterventionKind::Perfect, InterventionDirection::In},
    {InterventionKind::FixedEffect, InterventionDirection::Out},
    {InterventionKind::FixedEffect, InterventionDirection::In},
    {InterventionKind::MechanismChange, InterventionDirection::Out},
    {InterventionKind::MechanismChange, InterventionDirection::In},
    {InterventionKind::PerfectFixedEffect, InterventionDirection::Out},
    {InterventionKind::PerfectFixedEffect, InterventionDirection::In},
};

// 4 nodes, conditions: none, A inhibited, B inhibited, A and B inhibited.
TimeCourseDataset four_condition_data(unsigned seed) {
  const auto r = fixtures::random_dataset(4, 4, 5, seed);
  std::vector<double> values;
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t t = 0; t < 5; ++t) values.push_back(r.value(k, c, t));
  return TimeCourseDataset({"A", "B", "C", "D"}, {"none", "Ai", "Bi", "ABi"}, r.times(), values);
}

InterventionDesign ab_design(InterventionScheme s) {
  return {{{"none", {}}, {"Ai", {"A"}}, {"Bi", {"B"}}, {"ABi", {"A", "B"}}}, s};
}

std::vector<std::vector<std::size_t>> all_subsets(std::size_t p, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  for (unsigned mask = 0; mask < (1u << p); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < p; ++i)
      if (mask & (1u << i)) s.push_back(i);
    if (s.size() <= m) out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("shapes for a 3-node, 32-row design") {
  const auto data = fixtures::random_dataset(3, 4, 8, 2);
  const auto dp = build_design(data, {{}, {}}, {1, {0}});
  CHECK(dp.x0.rows() == 32);
  CHECK(dp.x0.cols() == 2);
  CHECK(dp.x_gamma.rows() == 32);
  CHECK(dp.x_gamma.cols() == 1);
  CHECK(dp.response.size() == 32);

  const auto empty = build_design(data, {{}, {}}, {1, {}});
  CHECK(empty.b() == 0);
  CHECK(empty.x0 == dp.x0);
}

TEST_CASE("perfect-out zeroes the inhibited parent's rows") {
  // 2 nodes, 2 conditions, T = 3; parent P inhibited in condition "inh".
  TimeCourseDataset data({"P", "Q"}, {"ctl", "inh"}, {0, 1, 2},
                         {1, 2, 3, 4, 5, 6,     // P: ctl 1 2 3, inh 4 5 6
                          7, 8, 9, 10, 11, 12});  // Q
  const InterventionDesign design{{{"inh", {"P"}}}, {InterventionKind::Perfect, InterventionDirection::Out}};
  const auto dp = build_design(data, design, {1, {0}});
  Eigen::VectorXd expected(6);
  expected << 0, 1, 2, 0, 0, 0;
  CHECK(dp.x_raw.col(0) == expected);
  Eigen::VectorXd resp(6);
  resp << 7, 8, 9, 10, 11, 12;
  CHECK(dp.response == resp);
  CHECK(dp.tags[0].kind == ColumnTag::Kind::Parent);

  // Without the intervention the same column keeps its lagged values.
  const auto plain = build_design(data, {{}, {}}, {1, {0}});
  Eigen::VectorXd lagged(6);
  lagged << 0, 1, 2, 0, 4, 5;
  CHECK(plain.x_raw.col(0) == lagged);
}

TEST_CASE("orthogonalize") {
  const Eigen::MatrixXd x0 = intercept_design(2, 4);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;

  SUBCASE("random 8x3 input is orthogonal to X0") {
    Eigen::MatrixXd x(8, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = z(gen);
    const auto r = orthogonalize(x0, x);
    CHECK((x0.transpose() * r).cwiseAbs().maxCoeff() < 1e-10);
    SUBCASE("idempotent") { CHECK((orthogonalize(x0, r) - r).cwiseAbs().maxCoeff() < 1e-12); }
  }
  SUBCASE("already orthogonal columns are unchanged") {
    Eigen::VectorXd v(8);
    v << 0, 1, -1, 0, 0, 2, -2, 0;
    CHECK((orthogonalize(x0, v) - v).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("a column constant over t > 0 vanishes there") {
    Eigen::VectorXd v(8);
    v << 5, 3, 3, 3, 7, 3, 3, 3;
    const auto r = orthogonalize(x0, v);
    for (int row : {1, 2, 3, 5, 6, 7}) CHECK(std::abs(r(row)) < 1e-12);
  }
  SUBCASE("rank-deficient X0 is rejected") {
    Eigen::MatrixXd bad(4, 2);
    bad << 1, 1, 1, 1, 1, 1, 1, 1;
    CHECK_THROWS_AS(orthogonalize(bad, Eigen::MatrixXd::Ones(4, 1)), NumericalError);
  }
}

TEST_CASE("scheme none matches the classical lagged design for every parent set") {
  const auto data = fixtures::random_dataset(4, 3, 5, 11);
  for (const auto& s : all_subsets(4, 4)) {
    const auto dp = build_design(data, {{}, {}}, {2, s});
    const auto with_empty = build_design(data, {{{"c0", {}}, {"c1", {}}}, {InterventionKind::PerfectFixedEffect,
                                                                          InterventionDirection::Out}},
                                         {2, s});
    REQUIRE(dp.b() == static_cast<Eigen::Index>(s.size()));
    for (std::size_t k = 0; k < s.size(); ++k)
      CHECK(dp.x_raw.col(static_cast<Eigen::Index>(k)) == oracle::lagged_column(data, s[k]));
    CHECK(dp.x_gamma == with_empty.x_gamma);
    CHECK(dp.response == oracle::response(data, 2));
    CHECK(dp.x0 == oracle::intercepts(data));
  }
}

TEST_CASE("design invariants hold under every scheme") {
  const auto data = four_condition_data(21);
  for (const auto& scheme : kAllSchemes) {
    CAPTURE(to_string(scheme));
    const InterventionDesign design = ab_design(scheme);
    const ResolvedDesign resolved(design, data);
    const DesignBuilder builder(data, resolved);
    const DesignBuilder plain(data, ResolvedDesign(design.scheme, 4, 4));
    for (std::size_t j = 0; j < 4; ++j)
      for (const auto& s : all_subsets(4, 3)) {
        DesignPair dp;
        try {
          dp = builder.build({j, s});
        } catch (const RankDeficientError&) {
          continue;
        }
        if (dp.b() > 0) CHECK((dp.x0.transpose() * dp.x_gamma).cwiseAbs().maxCoeff() <= 1e-10);
        REQUIRE(dp.tags.size() == static_cast<std::size_t>(dp.b()));
        std::set<std::string> labels;
        for (const auto& t : dp.tags) labels.insert(t.label(data.node_names()));
        CHECK(labels.size() == dp.tags.size());

        // Rows of the uninhibited condition (index 0) match the scheme-none
        // design for every lagged-value column.
        const auto ref = plain.build({j, s});
        for (std::size_t k = 0; k < dp.tags.size(); ++k) {
          const auto& tag = dp.tags[k];
          if (tag.kind == ColumnTag::Kind::FixedEffect || tag.inhibited_regime) {
            CHECK(dp.x_raw.col(static_cast<Eigen::Index>(k)).head(5).isZero());
            continue;
          }
          const auto pos = std::find(s.begin(), s.end(), tag.parent) - s.begin();
          CHECK(dp.x_raw.col(static_cast<Eigen::Index>(k)).head(5) == ref.x_raw.col(pos).head(5));
        }
      }
  }
}

TEST_CASE("fixed-effect columns") {
  const auto data = four_condition_data(4);
  SUBCASE("out: one indicator per inhibited parent in the set, covering t = 0") {
    const auto design = ab_design({InterventionKind::FixedEffect, InterventionDirection::Out});
    const auto dp = build_design(data, design, {2, {0, 3}});
    REQUIRE(dp.b() == 3);
    CHECK(dp.tags[2].kind == ColumnTag::Kind::FixedEffect);
    CHECK(dp.tags[2].targets == std::vector<std::size_t>{0});
    Eigen::VectorXd ind = Eigen::VectorXd::Zero(20);
    ind.segment(5, 5).setOnes();   // Ai
    ind.segment(15, 5).setOnes();  // ABi
    CHECK(dp.x_raw.col(2) == ind);
    CHECK(dp.tags[2].label(data.node_names()) == "fixed-effect(A)");

    // No inhibited parent in the set: no indicator.
    CHECK(build_design(data, design, {2, {2, 3}}).b() == 2);
  }
  SUBCASE("out: identical indicators are merged") {
    const InterventionDesign same{{{"Ai", {"A", "B"}}, {"ABi", {"A", "B"}}},
                                  {InterventionKind::FixedEffect, InterventionDirection::Out}};
    const auto dp = build_design(data, same, {2, {0, 1}});
    REQUIRE(dp.b() == 3);
    CHECK(dp.tags[2].targets == std::vector<std::size_t>{0, 1});
    CHECK(dp.tags[2].label(data.node_names()) == "fixed-effect(A+B)");
  }
  SUBCASE("in: indicator for an inhibited child regardless of parents") {
    const auto design = ab_design({InterventionKind::FixedEffect, InterventionDirection::In});
    const auto dp = build_design(data, design, {0, {}});
    REQUIRE(dp.b() == 1);
    CHECK(dp.tags[0].targets == std::vector<std::size_t>{0});
    CHECK(build_design(data, design, {2, {}}).b() == 0);
  }
}

TEST_CASE("perfect-in zeroes every parent column in the child's inhibited conditions") {
  const auto data = four_condition_data(8);
  const auto design = ab_design({InterventionKind::Perfect, InterventionDirection::In});
  const auto dp = build_design(data, design, {1, {0, 2, 3}});
  for (Eigen::Index k = 0; k < 3; ++k) {
    CHECK(dp.x_raw.col(k).segment(10, 10).isZero());   // Bi, ABi
    CHECK_FALSE(dp.x_raw.col(k).segment(5, 5).isZero());  // Ai keeps its values
  }
}

TEST_CASE("mechanism change splits a column into two regimes") {
  const auto data = four_condition_data(9);
  const auto out = build_design(data, ab_design({InterventionKind::MechanismChange, InterventionDirection::Out}),
                                {2, {0, 2}});
  REQUIRE(out.b() == 3);
  CHECK(out.tags[0].label(data.node_names()) == "A@uninhibited");
  CHECK(out.tags[1].label(data.node_names()) == "A@inhibited");
  CHECK(out.x_raw.col(0) + out.x_raw.col(1) == oracle::lagged_column(data, 0));
  CHECK(out.x_raw.col(1).head(5).isZero());

  const auto in = build_design(data, ab_design({InterventionKind::MechanismChange, InterventionDirection::In}),
                               {0, {2, 3}});
  CHECK(in.b() == 4);
  CHECK(build_design(data, ab_design({InterventionKind::MechanismChange, InterventionDirection::In}), {2, {2, 3}})
            .b() == 2);
}

TEST_CASE("augmentations that create a zero column raise a structured rank error") {
  const auto data = four_condition_data(12);
  // A is inhibited in every condition: perfect zeroing leaves nothing.
  const InterventionDesign everywhere{{{"none", {"A"}}, {"Ai", {"A"}}, {"Bi", {"A"}}, {"ABi", {"A"}}},
                                      {InterventionKind::Perfect, InterventionDirection::Out}};
  try {
    build_design(data, everywhere, {2, {0}});
    FAIL("expected a rank error");
  } catch (const RankDeficientError& e) {
    CHECK(e.column() == "A");
    CHECK(std::string(e.what()).find("column of zeros") != std::string::npos);
  }
  // The matching fixed effect is constant, i.e. inside span(X0).
  const InterventionDesign fe{everywhere.targets, {InterventionKind::FixedEffect, InterventionDirection::Out}};
  CHECK_THROWS_AS(build_design(data, fe, {2, {0}}), RankDeficientError);

  // Two parents with identical lagged series are linearly dependent.
  const auto dup = data.with_node_values(1, [&] {
    std::vector<double> v;
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t t = 0; t < 5; ++t) v.push_back(data.value(0, c, t));
    return v;
  }());
  CHECK_THROWS_AS(build_design(dup, {{}, {}}, {2, {0, 1}}), RankDeficientError);
}

TEST_CASE("parent set validation") {
  CHECK_NOTHROW(validate_parent_set({0, {0, 2}}, 3, 2));
  CHECK_THROWS_AS(validate_parent_set({0, {0, 1, 2}}, 3, 2), InputError);
  CHECK_THROWS_AS(validate_parent_set({0, {2, 1}}, 3, 3), InputError);
  CHECK_THROWS_AS(validate_parent_set({0, {1, 1}}, 3, 3), InputError);
  CHECK_THROWS_AS(validate_parent_set({0, {3}}, 3, 3), InputError);
  CHECK_THROWS_AS(validate_parent_set({3, {}}, 3, 3), InputError);
}
