#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "cdbn/errors.hpp"
#include "cdbn/inference.hpp"
#include "cdbn/simulate.hpp"
#include "support/oracles.hpp"

using namespace cdbn;

namespace {

InferenceSettings settings_for(std::size_t m, ExecutionPolicy exec = {}) {
  InferenceSettings s;
  s.max_indegree = m;
  s.execution = exec;
  return s;
}

unsigned mask_of(const std::vector<std::size_t>& parents) {
  unsigned m = 0;
  for (auto i : parents) m |= 1u << i;
  return m;
}

// Dataset in which node `child` follows `parent` with a strong lag-1 effect.
TimeCourseDataset signal_dataset(std::size_t p, std::size_t parent, std::size_t child, double beta, double noise,
                                 unsigned seed) {
  const std::size_t C = 3, T = 8;
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<double> v(p * C * T);
  auto at = [&](std::size_t k, std::size_t c, std::size_t t) -> double& { return v[(k * C + c) * T + t]; };
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t k = 0; k < p; ++k) at(k, c, t) = z(gen);
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t t = 1; t < T; ++t) at(child, c, t) = beta * at(parent, c, t - 1) + noise * z(gen);
  std::vector<double> times(T);
  std::iota(times.begin(), times.end(), 0.0);
  return TimeCourseDataset(fixtures::letters(p), {"c0", "c1", "c2"}, times, v);
}

}  // namespace

TEST_CASE("enumeration counts and order") {
  CHECK(count_parent_sets(15, 3) == 576);
  for (unsigned p = 1; p <= 12; ++p)
    for (unsigned m = 0; m <= p; ++m) {
      const auto sets = enumerate_parent_sets(p, m);
      REQUIRE(sets.size() == oracle::binomial_sum(p, m));
      CHECK(count_parent_sets(p, m) == sets.size());
      std::set<std::vector<std::size_t>> unique(sets.begin(), sets.end());
      CHECK(unique.size() == sets.size());
      for (std::size_t k = 1; k < sets.size(); ++k) {
        const auto& a = sets[k - 1];
        const auto& b = sets[k];
        CHECK(std::is_sorted(b.begin(), b.end()));
        if (a.size() == b.size()) {
          // colex: compare from the largest element down
          CHECK(std::lexicographical_compare(a.rbegin(), a.rend(), b.rbegin(), b.rend()));
        } else {
          CHECK(a.size() + 1 == b.size());
        }
      }
    }
}

TEST_CASE("m = 0 gives the empty model with probability one") {
  const auto data = fixtures::random_dataset(4, 2, 6, 3);
  const auto post = infer_network(data, {{}, {}}, settings_for(0));
  for (const auto& node : post.nodes) {
    REQUIRE(node.models.size() == 1);
    CHECK(node.models[0].probability == 1.0);
    CHECK(node.models[0].pset.parents.empty());
  }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(post.edges(i, j) == 0.0);
}

TEST_CASE("a single node only has its self-edge as candidate") {
  const auto data = fixtures::random_dataset(1, 2, 6, 4);
  const auto post = infer_network(data, {{}, {}}, settings_for(1));
  REQUIRE(post.nodes[0].models.size() == 2);
  CHECK(post.nodes[0].models[1].pset.parents == std::vector<std::size_t>{0});
  CHECK(post.edges(0, 0) == doctest::Approx(post.nodes[0].models[1].probability));
  CHECK_THROWS_AS(infer_node(0, data, {{}, {}}, settings_for(2)), InputError);
}

TEST_CASE("48 nodes, in-degree 2, 32 rows") {
  const auto data = fixtures::random_dataset(48, 4, 8, 48);
  const auto post = infer_network(data, {{}, {}}, settings_for(2));
  std::size_t total = 0;
  for (const auto& node : post.nodes) total += node.models.size() + node.excluded.size();
  CHECK(total == 56496);
  CHECK(total == 48 * oracle::binomial_sum(48, 2));
}

TEST_CASE("posteriors match a 50-digit brute-force normalizer") {
  for (unsigned seed = 1; seed <= 6; ++seed)
    for (std::size_t p = 1; p <= 4; ++p) {
      const auto data = fixtures::random_dataset(p, 3, 5, seed * 10 + static_cast<unsigned>(p));
      for (std::size_t j = 0; j < p; ++j) {
        const auto post = infer_node(j, data, {{}, {}}, settings_for(p));
        const auto exact = oracle::classical_posterior(data, j, p);
        REQUIRE(post.models.size() == exact.size());
        double tv = 0.0, total = 0.0;
        for (const auto& m : post.models) {
          tv += std::abs(m.probability - exact.at(mask_of(m.pset.parents)));
          total += m.probability;
        }
        CHECK(0.5 * tv < 1e-9);
        CHECK(std::abs(total - 1.0) < 1e-10);
      }
    }
}

TEST_CASE("a dominant parent wins the node posterior") {
  const auto data = signal_dataset(3, 2, 0, 0.9, 0.1, 5);
  const auto post = infer_node(0, data, {{}, {}}, settings_for(2));
  const auto& best = post.map_model();
  CHECK(best.pset.parents == std::vector<std::size_t>{2});
  const auto exact = oracle::classical_posterior(data, 0, 2);
  const auto top = std::max_element(exact.begin(), exact.end(),
                                    [](const auto& a, const auto& b) { return a.second < b.second; });
  CHECK(top->first == mask_of({2}));
  CHECK(best.probability == doctest::Approx(top->second).epsilon(1e-9));
}

TEST_CASE("edge probabilities are the sum over models containing the parent") {
  SUBCASE("hand posterior") {
    NodePosterior np;
    np.node = 1;
    np.models = {{{1, {}}, {}, 0.3}, {{1, {0}}, {}, 0.7}};
    std::vector<NodePosterior> all(2);
    all[0].node = 0;
    all[0].models = {{{0, {}}, {}, 1.0}};
    all[1] = np;
    const auto e = edge_probabilities(all);
    CHECK(e(0, 1) == 0.7);
    CHECK(e(1, 1) == 0.0);
    CHECK(e(0, 0) == 0.0);
  }
  SUBCASE("random posteriors against an independent double sum") {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t p = 5;
    const auto sets = enumerate_parent_sets(p, 3);
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<NodePosterior> posts(p);
      for (std::size_t j = 0; j < p; ++j) {
        posts[j].node = j;
        double total = 0.0;
        for (const auto& s : sets) {
          posts[j].models.push_back({{j, s}, {}, u(gen)});
          total += posts[j].models.back().probability;
        }
        for (auto& m : posts[j].models) m.probability /= total;
      }
      const auto e = edge_probabilities(posts);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
          double sum = 0.0;
          for (const auto& m : posts[j].models)
            sum += (std::find(m.pset.parents.begin(), m.pset.parents.end(), i) != m.pset.parents.end())
                       ? m.probability
                       : 0.0;
          CHECK(e(i, j) == sum);
          CHECK(posts[j].inclusion_probability(i) == sum);
        }
    }
  }
}

TEST_CASE("serial and parallel execution agree bit for bit") {
  const auto data = fixtures::random_dataset(9, 4, 8, 77);
  const InterventionDesign design{{{"c1", {"A"}}, {"c2", {"B"}}, {"c3", {"A", "B"}}},
                                  {InterventionKind::PerfectFixedEffect, InterventionDirection::Out}};
  const DesignBuilder builder(data, ResolvedDesign(design, data));
  const auto sets = enumerate_parent_sets(9, 3);
  const auto settings = settings_for(3);
  for (std::size_t j : {0u, 4u, 8u}) {
    const auto a = kernels::score_models_serial(builder, j, sets, settings);
    const auto b = kernels::score_models_parallel(builder, j, sets, settings);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].ok == b[k].ok);
      CHECK(a[k].score.log_posterior_unnorm == b[k].score.log_posterior_unnorm);
      CHECK(a[k].error == b[k].error);
    }
  }
  const auto serial = infer_network(data, design, settings_for(3, ExecutionPolicy::serial()));
  for (int workers : {0, 2, 3, 8}) {
    const auto par = infer_network(data, design, settings_for(3, {true, workers}));
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 9; ++j) CHECK(par.edges(i, j) == serial.edges(i, j));
  }
}

TEST_CASE("posterior does not depend on enumeration order") {
  const auto data = fixtures::random_dataset(5, 3, 6, 12);
  const DesignBuilder builder(data, ResolvedDesign({}, 5, 3));
  auto sets = enumerate_parent_sets(5, 3);
  const auto settings = settings_for(3);
  const auto ref = normalize_posterior(1, sets, kernels::score_models_serial(builder, 1, sets, settings));
  std::mt19937_64 gen(2);
  std::shuffle(sets.begin(), sets.end(), gen);
  const auto shuffled = normalize_posterior(1, sets, kernels::score_models_serial(builder, 1, sets, settings));
  CHECK(std::abs(shuffled.log_evidence - ref.log_evidence) < 1e-12);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(std::abs(shuffled.inclusion_probability(i) - ref.inclusion_probability(i)) < 1e-12);
}

TEST_CASE("permuting nodes permutes the edge matrix") {
  const auto data = fixtures::random_dataset(6, 3, 6, 19);
  const std::vector<std::size_t> perm{3, 0, 5, 1, 4, 2};
  const auto a = infer_network(data, {{}, {}}, settings_for(2)).edges;
  const auto b = infer_network(data.permuted(perm), {{}, {}}, settings_for(2)).edges;
  const auto pa = a.permuted(perm);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(pa(i, j) - b(i, j)) < 1e-10);
}

TEST_CASE("column j depends only on node j's response") {
  // Values at the last time point are never used as lagged predictors.
  const auto data = fixtures::random_dataset(5, 3, 6, 23);
  std::vector<double> series;
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t t = 0; t < 6; ++t) series.push_back(t == 5 ? 10.0 * data.value(2, c, t) + 1 : data.value(2, c, t));
  const auto changed = data.with_node_values(2, series);
  const auto a = infer_network(data, {{}, {}}, settings_for(2)).edges;
  const auto b = infer_network(changed, {{}, {}}, settings_for(2)).edges;
  for (std::size_t j = 0; j < 5; ++j)
    for (std::size_t i = 0; i < 5; ++i) {
      if (j == 2) continue;
      CHECK(a(i, j) == b(i, j));
    }
}

TEST_CASE("scheme none and an all-empty design give identical output") {
  const auto data = fixtures::random_dataset(5, 3, 6, 29);
  const auto a = infer_network(data, {{}, {}}, settings_for(2));
  for (auto kind : {InterventionKind::Perfect, InterventionKind::FixedEffect, InterventionKind::MechanismChange,
                    InterventionKind::PerfectFixedEffect})
    for (auto dir : {InterventionDirection::In, InterventionDirection::Out}) {
      const auto b = infer_network(data, {{{"c0", {}}, {"c1", {}}, {"c2", {}}}, {kind, dir}}, settings_for(2));
      for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) CHECK(a.edges(i, j) == b.edges(i, j));
    }
}

TEST_CASE("degenerate models are excluded and recorded") {
  // B duplicates A, so any set containing both is rank deficient.
  const auto base = fixtures::random_dataset(3, 2, 6, 31);
  std::vector<double> copy;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t t = 0; t < 6; ++t) copy.push_back(base.value(0, c, t));
  const auto data = base.with_node_values(1, copy);
  const auto post = infer_node(2, data, {{}, {}}, settings_for(2));
  CHECK(post.excluded.size() == 1);
  CHECK(post.excluded[0].pset.parents == std::vector<std::size_t>{0, 1});
  CHECK(post.excluded[0].reason.find("rank-deficient") != std::string::npos);
  CHECK(post.models.size() == 6);
  double total = 0.0;
  for (const auto& m : post.models) total += m.probability;
  CHECK(std::abs(total - 1.0) < 1e-12);

  // A constant response makes every model degenerate.
  const auto flat = base.with_node_values(2, std::vector<double>(12, 3.0));
  CHECK_THROWS_AS(infer_node(2, flat, {{}, {}}, settings_for(1)), NumericalError);
  CHECK_THROWS_AS(infer_network(flat, {{}, {}}, settings_for(1)), NumericalError);
}

TEST_CASE("fitted values") {
  SUBCASE("empty model: block means") {
    const auto data = fixtures::random_dataset(2, 3, 5, 37);
    const DesignBuilder builder(data, ResolvedDesign({}, 2, 3));
    const auto post = infer_network(builder, settings_for(0));
    const auto fit = fitted_values(post.nodes, builder);
    for (std::size_t k = 0; k < 2; ++k) {
      double later = 0.0, first = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        first += data.value(k, c, 0) / 3.0;
        for (std::size_t t = 1; t < 5; ++t) later += data.value(k, c, t) / 12.0;
      }
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(fit(k, c, 0) == doctest::Approx(first));
        CHECK(fit(k, c, 3) == doctest::Approx(later));
      }
    }
  }
  SUBCASE("noiseless single-parent data: shrunken generating mean") {
    const auto data = signal_dataset(3, 1, 0, 0.8, 0.0, 41);
    const DesignBuilder builder(data, ResolvedDesign({}, 3, 3));
    const auto post = infer_node(0, builder, settings_for(1));
    REQUIRE(post.map_model().pset.parents == std::vector<std::size_t>{1});
    CHECK(post.map_model().probability > 0.999999);
    const auto fit = fitted_node(post, builder);
    const auto dp = builder.build({0, {1}});
    const double n = static_cast<double>(dp.n());
    // Least-squares fit recovers the generating coefficient exactly.
    const Eigen::VectorXd beta = dp.x_gamma.colPivHouseholderQr().solve(dp.response);
    CHECK(beta(0) == doctest::Approx(0.8).epsilon(1e-10));
    const Eigen::VectorXd alpha = dp.x0.colPivHouseholderQr().solve(dp.response);
    const Eigen::VectorXd expected = dp.x0 * alpha + n / (n + 1) * dp.x_gamma * beta;
    CHECK((fit - expected).cwiseAbs().maxCoeff() < 1e-5);
  }
  SUBCASE("fixed-effect fits track the shift in inhibited conditions") {
    std::vector<std::string> names{"EGFR", "AKT", "MAPK"};
    Adjacency topo(3, std::vector<bool>(3, false));
    topo[0][1] = topo[0][2] = true;
    SimulationConfig cfg;
    cfg.regime = InterventionKind::FixedEffect;
    cfg.conditions = {{"DMSO", {}}, {"EGFRi", {"EGFR"}}};
    cfg.default_shift = -2.0;
    cfg.sigma = 0.25;
    cfg.seed = 3;
    const auto rep = simulate_replicate(names, topo, cfg, 0);
    InterventionDesign design = rep.sample.design;
    design.scheme = {InterventionKind::PerfectFixedEffect, InterventionDirection::Out};
    const DesignBuilder builder(rep.sample.data, ResolvedDesign(design, rep.sample.data));
    const auto post = infer_network(builder, settings_for(2));
    const auto fit = fitted_values(post.nodes, builder);
    for (std::size_t k : {1u, 2u}) {
      double shift_fit = 0.0, shift_data = 0.0;
      for (std::size_t t = 0; t < 8; ++t) {
        shift_fit += (fit(k, 1, t) - fit(k, 0, t)) / 8.0;
        shift_data += (rep.sample.data.value(k, 1, t) - rep.sample.data.value(k, 0, t)) / 8.0;
      }
      CHECK(shift_fit < -1.0);
      CHECK(std::abs(shift_fit - shift_data) < 0.5);
    }
  }
}
