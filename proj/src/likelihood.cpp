#include "cdbn/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cdbn/errors.hpp"

namespace cdbn {

namespace {

constexpr double kQuadraticFloor = 1e-12;

void check_dimensions(const DesignPair& dp) {
  if (dp.n() <= dp.a() + dp.b()) {
    std::ostringstream os;
    os << "too few observations: n = " << dp.n() << " must exceed a + b = " << dp.a() + dp.b();
    throw NumericalError(os.str());
  }
}

double assemble(const DesignPair& dp, double quad, double g) {
  const double xx = dp.response.squaredNorm();
  if (!(quad > kQuadraticFloor * xx)) {
    std::ostringstream os;
    os << "nonpositive residual quadratic form (" << quad << ") for a model with b = " << dp.b();
    throw NumericalError(os.str());
  }
  const double half_df = 0.5 * static_cast<double>(dp.n() - dp.a());
  return log_normalizing_constant(dp.x0) - 0.5 * static_cast<double>(dp.b()) * std::log1p(g) -
         half_df * std::log(quad);
}

}  // namespace

double log_normalizing_constant(const Eigen::MatrixXd& x0) {
  const auto n = x0.rows();
  const auto a = x0.cols();
  const double half_df = 0.5 * static_cast<double>(n - a);
  const Eigen::MatrixXd gram = x0.transpose() * x0;
  const double log_det = gram.ldlt().vectorD().array().log().sum();
  return std::lgamma(half_df) - std::numbers::ln2 - half_df * std::log(std::numbers::pi) - log_det;
}

double log_marginal_likelihood(const DesignPair& dp, const LikelihoodOptions& opts) {
  check_dimensions(dp);
  const double g = opts.g.value_or(static_cast<double>(dp.n()));

  // Residual of x after the intercepts.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr0(dp.x0);
  const Eigen::VectorXd r0 = dp.response - dp.x0 * qr0.solve(dp.response);
  const double s0 = r0.squaredNorm();
  if (dp.b() == 0) return assemble(dp, s0, g);

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(dp.x_gamma);
  const Eigen::VectorXd resid = r0 - dp.x_gamma * qr.solve(r0);
  const double rss = resid.squaredNorm();
  return assemble(dp, (s0 + g * rss) / (g + 1.0), g);
}

double log_marginal_likelihood_projection(const DesignPair& dp, const LikelihoodOptions& opts) {
  check_dimensions(dp);
  const double g = opts.g.value_or(static_cast<double>(dp.n()));
  const auto n = dp.n();
  const Eigen::MatrixXd p0 =
      dp.x0 * (dp.x0.transpose() * dp.x0).inverse() * dp.x0.transpose();
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - p0;
  if (dp.b() > 0) {
    const Eigen::MatrixXd pg =
        dp.x_gamma * (dp.x_gamma.transpose() * dp.x_gamma).inverse() * dp.x_gamma.transpose();
    m -= (g / (g + 1.0)) * pg;
  }
  return assemble(dp, dp.response.dot(m * dp.response), g);
}

double log_binomial(std::size_t n, std::size_t k) {
  if (k > n) return -INFINITY;
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

double log_model_prior(const ParentSet& pset, const NetworkPrior& prior, std::size_t p, std::size_t m) {
  if (pset.size() > m) throw InputError("parent set exceeds the in-degree bound");
  double penalty = 0.0;
  if (prior.lambda != 0.0 && !prior.graph.empty()) {
    std::size_t diff = 0;
    for (std::size_t i = 0; i < p; ++i) {
      const bool in_prior = prior.graph[i][pset.node];
      if (in_prior != pset.contains(i)) ++diff;
    }
    penalty = prior.lambda * static_cast<double>(diff);
  }
  return -log_binomial(p, pset.size()) - penalty;
}

}  // namespace cdbn
