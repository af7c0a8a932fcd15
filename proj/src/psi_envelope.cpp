#include "chainmi/psi_envelope.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chainmi/error.hpp"

namespace chainmi {

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1/golden ratio
constexpr int kMaxGoldenIterations = 300;
constexpr int kMaxBisections = 400;
constexpr int kMaxBracketDoublings = 1100;

}  // namespace

PsiEnvelope PsiEnvelope::subgaussian(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(Errc::InvalidEnvelope, "variance proxy must be positive and finite");
  }
  PsiEnvelope env;
  env.subgaussian_ = true;
  env.sigma2_ = sigma2;
  return env;
}

PsiEnvelope PsiEnvelope::general(Evaluator psi, double lambda_max) {
  if (!psi) throw Error(Errc::InvalidEnvelope, "missing evaluator");
  if (!(lambda_max > 0.0)) throw Error(Errc::InvalidEnvelope, "lambda_max must be positive");
  if (std::abs(psi(0.0)) > 1e-12) throw Error(Errc::InvalidEnvelope, "psi(0) must be 0");

  // Midpoint convexity on a geometric grid reaching the domain cap.
  std::vector<double> grid{0.0};
  for (double lam = 1e-6; lam < lambda_max; lam *= 2.0) grid.push_back(lam);
  grid.push_back(lambda_max);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = psi(grid[i]);
    if (!(v >= -1e-12)) {
      throw Error(Errc::InvalidEnvelope, "psi is negative at lambda = " + std::to_string(grid[i]));
    }
    if (i + 1 < grid.size()) {
      const double a = grid[i];
      const double b = grid[i + 1];
      const double mid = psi(0.5 * (a + b));
      const double chord = 0.5 * (v + psi(b));
      if (mid > chord + 1e-12 * (1.0 + std::abs(chord))) {
        throw Error(Errc::InvalidEnvelope, "psi fails midpoint convexity near lambda = " +
                                               std::to_string(a));
      }
    }
  }

  PsiEnvelope env;
  env.subgaussian_ = false;
  env.lambda_max_ = lambda_max;
  env.eval_ = std::move(psi);
  return env;
}

PsiEnvelope PsiEnvelope::from_grid(std::vector<std::pair<double, double>> knots, double lambda_max) {
  if (knots.size() < 2) throw Error(Errc::InvalidEnvelope, "need at least two knots");
  std::sort(knots.begin(), knots.end());
  if (knots.front().first != 0.0 || knots.front().second != 0.0) {
    throw Error(Errc::InvalidEnvelope, "first knot must be (0, 0)");
  }
  double prev_slope = -1.0;
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double dl = knots[i].first - knots[i - 1].first;
    if (!(dl > 0.0)) throw Error(Errc::InvalidEnvelope, "knot lambdas must be distinct");
    const double slope = (knots[i].second - knots[i - 1].second) / dl;
    if (slope < 0.0 || slope + 1e-12 < prev_slope) {
      throw Error(Errc::InvalidEnvelope, "knot slopes must be nonnegative and nondecreasing");
    }
    prev_slope = slope;
  }
  auto eval = [knots](double lam) {
    auto hi = std::upper_bound(knots.begin(), knots.end(), lam,
                               [](double v, const auto& k) { return v < k.first; });
    if (hi == knots.begin()) return 0.0;
    if (hi == knots.end()) hi = std::prev(knots.end());
    const auto lo = std::prev(hi);
    const double t = (lam - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
  };
  PsiEnvelope env = general(eval, lambda_max);
  env.knots_ = std::move(knots);
  return env;
}

double PsiEnvelope::operator()(double lambda) const {
  if (subgaussian_) return 0.5 * lambda * lambda * sigma2_;
  return eval_(lambda);
}

PsiEnvelope PsiEnvelope::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(Errc::InvalidEnvelope, "scale factor must be positive");
  if (subgaussian_) return subgaussian(sigma2_ * factor);
  const double root = std::sqrt(factor);
  PsiEnvelope env = general([inner = eval_, root](double lam) { return inner(root * lam); },
                            lambda_max_ / root);
  return env;
}

double psi_star(const PsiEnvelope& env, double x) {
  if (std::isnan(x)) throw Error(Errc::InvalidArgument, "x is NaN");
  if (x <= 0.0) return 0.0;
  if (env.is_subgaussian()) return x * x / (2.0 * env.sigma2());

  const auto objective = [&](double lam) { return lam * x - env(lam); };
  // Concavity: once g(2h) <= g(h) the maximizer lies in [0, 2h].
  double h = 1.0;
  while (objective(2.0 * h) > objective(h)) {
    h *= 2.0;
    if (2.0 * h > env.lambda_max()) {
      throw Error(Errc::DomainCapReached, "dual maximizer exceeds lambda_max at x = " + std::to_string(x));
    }
  }
  double a = 0.0;
  double b = std::min(2.0 * h, env.lambda_max());
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = objective(c);
  double fd = objective(d);
  for (int it = 0; it < kMaxGoldenIterations && (b - a) > 1e-14 * std::max(1.0, b); ++it) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = objective(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = objective(c);
    }
  }
  const double best = std::max({objective(a), objective(b), fc, fd, 0.0});
  return best;
}

double psi_star_inverse(const PsiEnvelope& env, double y) {
  if (!(y >= 0.0)) throw Error(Errc::OutOfRange, "psi*^{-1} is defined for y >= 0");
  if (std::isinf(y)) return y;
  if (y == 0.0) return 0.0;
  if (env.is_subgaussian()) return std::sqrt(2.0 * env.sigma2() * y);

  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (psi_star(env, hi) < y) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > kMaxBracketDoublings || !std::isfinite(hi)) {
      throw Error(Errc::BracketFailure, "psi* stays below y = " + std::to_string(y));
    }
  }
  for (int it = 0; it < kMaxBisections && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psi_star(env, mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace chainmi
