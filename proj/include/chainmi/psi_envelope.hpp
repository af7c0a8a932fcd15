// psi_envelope.hpp
//
// Convex tail envelopes psi (psi(0) = psi'(0) = 0) bounding a cumulant
// generating function, their Legendre duals
//     psi*(x) = sup_{lambda >= 0} { lambda x - psi(lambda) }
// and the inverse psi*^{-1}, which turns nats into process units.
#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace chainmi {

inline constexpr double kDefaultLambdaMax = 1e6;

class PsiEnvelope {
 public:
  using Evaluator = std::function<double(double)>;

  /// psi(lambda) = lambda^2 sigma2 / 2 with closed-form dual and inverse.
  static PsiEnvelope subgaussian(double sigma2);

  /// Arbitrary convex evaluator; checked for psi(0) = 0, nonnegativity and
  /// midpoint convexity on a sampled grid. Throws InvalidEnvelope.
  static PsiEnvelope general(Evaluator psi, double lambda_max = kDefaultLambdaMax);

  /// Piecewise-linear interpolation through (lambda, psi) knots; the first
  /// knot must be (0, 0) and slopes must be nondecreasing. The last segment
  /// is extended linearly.
  static PsiEnvelope from_grid(std::vector<std::pair<double, double>> knots,
                               double lambda_max = kDefaultLambdaMax);

  bool is_subgaussian() const noexcept { return subgaussian_; }
  double sigma2() const noexcept { return sigma2_; }
  double lambda_max() const noexcept { return lambda_max_; }
  const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }

  double operator()(double lambda) const;

  /// Same envelope with the variance proxy (or the lambda scale for general
  /// kinds) multiplied: psi_c(lambda) = psi(sqrt(c) lambda).
  PsiEnvelope scaled(double factor) const;

 private:
  PsiEnvelope() = default;

  bool subgaussian_ = true;
  double sigma2_ = 1.0;
  double lambda_max_ = kDefaultLambdaMax;
  Evaluator eval_;
  std::vector<std::pair<double, double>> knots_;
};

/// Legendre dual. Returns 0 for x <= 0. General kinds maximize the concave
/// lambda x - psi(lambda) by geometric bracketing then golden-section search;
/// throws DomainCapReached when the maximizer escapes lambda_max.
double psi_star(const PsiEnvelope& env, double x);

/// Inverse of psi* on [0, inf). Closed form for subgaussian envelopes,
/// bracketing plus bisection otherwise (BracketFailure when no bracket exists).
double psi_star_inverse(const PsiEnvelope& env, double y);

}  // namespace chainmi
