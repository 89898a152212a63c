#pragma once

#include <cstddef>
#include <optional>

#include "cdbn/data.hpp"
#include "cdbn/design.hpp"

namespace cdbn {

struct ModelScore {
  double log_marginal = 0.0;
  double log_prior = 0.0;
  double log_posterior_unnorm = 0.0;
};

struct LikelihoodOptions {
  // g-prior scale; unset means g = n.
  std::optional<double> g;
};

// Log marginal likelihood of x under the g-prior regression
//
//   p(x|γ) = K (g+1)^{-b/2} ( xᵀ(I − P0 − g/(g+1) Pγ) x )^{-(n−a)/2}
//   K      = ½ Γ((n−a)/2) π^{-(n−a)/2} |X0ᵀX0|^{-1}
//
// with g = n by default. The quadratic form is evaluated from least-squares
// residuals (xᵀ(I−P0)x + g·RSS)/(g+1), which needs Xγ ⊥ X0.
// Throws NumericalError if n ≤ a + b or the quadratic form is below
// 1e-12·xᵀx.
double log_marginal_likelihood(const DesignPair& dp, const LikelihoodOptions& opts = {});

// Same quantity from explicit projection matrices; O(n³), for cross-checks.
double log_marginal_likelihood_projection(const DesignPair& dp, const LikelihoodOptions& opts = {});

// log K alone.
double log_normalizing_constant(const Eigen::MatrixXd& x0);

// −log C(p, |γ|) − λ (|γ∖γ0| + |γ0∖γ|), unnormalized.
double log_model_prior(const ParentSet& pset, const NetworkPrior& prior, std::size_t p, std::size_t m);

double log_binomial(std::size_t n, std::size_t k);

}  // namespace cdbn
