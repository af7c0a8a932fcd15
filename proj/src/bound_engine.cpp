#include "chainmi/bound_engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "chainmi/error.hpp"
#include "chainmi/info_theory.hpp"

namespace chainmi {

TailCap TailCap::log_cardinality(double base, double offset) {
  const double lb = std::log(base);
  return TailCap{Kind::LogCardinality, lb, offset * lb};
}

TailCap TailCap::constant(double value) { return TailCap{Kind::Linear, 0.0, value}; }

void LevelSeries::validate() const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(Errc::InvalidArgument, "level " + std::to_string(k_start + static_cast<int>(i)) +
                                             " is not finite");
    }
    if (values[i] < 0.0) {
      throw Error(Errc::NegativeValue, "level " + std::to_string(k_start + static_cast<int>(i)) +
                                           " is negative");
    }
  }
}

double BoundReport::terms_sum() const {
  double s = 0.0;
  for (const auto& [k, term] : per_level_terms) s += term;
  return s;
}

namespace {

constexpr int kMaxTailLevels = 100000;

// Level contribution before the 2^{-k} weight and the outer constant.
using LevelTransform = std::function<double(double)>;

struct SeriesInput {
  int k_start;
  std::vector<double> values;
  // Raw cap on values beyond the last level; always present here (zero-after-last
  // becomes the zero cap).
  TailCap cap;
};

TailCap effective_cap(const LevelSeries& series) {
  if (series.tail_mode == TailMode::ZeroAfterLast) return TailCap::constant(0.0);
  if (!series.cap) {
    throw Error(Errc::MissingTailCap, "series ends at level " + std::to_string(series.k_last()) +
                                          " without a tail cap or zero-after-last declaration");
  }
  return *series.cap;
}

BoundReport sum_levels(const char* formula_id, const char* theorem, double coefficient,
                       const SeriesInput& in, const LevelTransform& transform, double tail_tolerance) {
  if (!(tail_tolerance > 0.0)) throw Error(Errc::InvalidArgument, "tail tolerance must be positive");
  BoundReport report;
  report.formula_id = formula_id;
  report.theorem = theorem;
  report.tail_tolerance = tail_tolerance;
  report.per_level_terms.reserve(in.values.size());
  for (std::size_t i = 0; i < in.values.size(); ++i) {
    const int k = in.k_start + static_cast<int>(i);
    report.per_level_terms.emplace_back(k, coefficient * std::ldexp(1.0, -k) * transform(in.values[i]));
  }
  const int last = in.k_start + static_cast<int>(in.values.size()) - 1;
  report.truncation_k = last;

  double tail = 0.0;
  if (in.cap.slope == 0.0) {
    if (in.cap.intercept < 0.0) throw Error(Errc::NegativeValue, "tail cap is negative");
    // sum_{k > last} 2^{-k} = 2^{-last}
    tail = coefficient * std::ldexp(1.0, -last) * transform(in.cap.intercept);
  } else {
    double previous = std::numeric_limits<double>::infinity();
    int k = last + 1;
    for (; k <= last + kMaxTailLevels; ++k) {
      const double cap = in.cap.at(k);
      if (cap < 0.0) throw Error(Errc::NegativeValue, "tail cap is negative at level " + std::to_string(k));
      const double term = coefficient * std::ldexp(1.0, -k) * transform(cap);
      tail += term;
      if (term < 1e-3 * tail_tolerance && term <= previous) break;
      previous = term;
    }
    if (k > last + kMaxTailLevels) {
      throw Error(Errc::TailTooLoose, "tail did not converge within the iteration cap");
    }
  }
  if (tail > tail_tolerance) {
    throw Error(Errc::TailTooLoose, "tail estimate " + std::to_string(tail) + " exceeds tolerance " +
                                        std::to_string(tail_tolerance) +
                                        "; supply more levels");
  }
  report.tail_estimate = tail;
  report.bound_value = report.terms_sum() + tail;
  return report;
}

double checked_sqrt(double v) { return std::sqrt(std::max(v, 0.0)); }

}  // namespace

double maximal_bound(const PsiEnvelope& env, std::size_t cardinality, bool absolute) {
  if (cardinality == 0) throw Error(Errc::InvalidArgument, "cardinality must be >= 1");
  const double n = static_cast<double>(cardinality);
  return psi_star_inverse(env, std::log(absolute ? 2.0 * n : n));
}

double mi_bound(const PsiEnvelope& env, double mi, MiVariant variant) {
  if (std::isnan(mi) || mi < 0.0) throw Error(Errc::NegativeValue, "mutual information must be >= 0");
  if (std::isinf(mi)) return std::numeric_limits<double>::infinity();
  const double info = variant == MiVariant::ExpectedAbsolute ? mi + std::numbers::ln2 : mi;
  return psi_star_inverse(env, info);
}

BoundReport dudley_bound(const LevelSeries& log_covering, double tail_tolerance) {
  log_covering.validate();
  return sum_levels("dudley", "Dudley entropy bound", kDudleyConstant,
                    {log_covering.k_start, log_covering.values, effective_cap(log_covering)}, checked_sqrt,
                    tail_tolerance);
}

BoundReport chained_bound(const PsiEnvelope& env, const LevelSeries& mi_series, ChainVariant variant,
                          double tail_tolerance) {
  mi_series.validate();
  const double shift = variant == ChainVariant::Absolute ? std::numbers::ln2 : 0.0;
  LevelTransform transform = [&env, shift](double v) {
    if (env.is_subgaussian()) return std::sqrt(env.sigma2() * (v + shift));
    return psi_star_inverse(env, v + shift);
  };
  // Subgaussian: 3 sqrt(2) 2^{-k} sqrt(s2 I_k). General envelopes keep the same
  // outer constant with psi*^{-1}(I_k) inside, which for psi = lambda^2/2 is a
  // factor sqrt(2) above the subgaussian closed form.
  const bool absolute = variant == ChainVariant::Absolute;
  return sum_levels(absolute ? "chained-b" : "chained-a",
                    absolute ? "chained mutual information bound, absolute deviation form"
                             : "chained mutual information bound, expectation form",
                    kChainedConstant, {mi_series.k_start, mi_series.values, effective_cap(mi_series)},
                    transform, tail_tolerance);
}

BoundReport small_subset_bound(double alpha, const LevelSeries& log_covering_small,
                               const LevelSeries& log_covering_rest, double tail_tolerance) {
  const double h = binary_entropy(alpha);
  log_covering_small.validate();
  log_covering_rest.validate();
  if (log_covering_small.k_start != log_covering_rest.k_start ||
      log_covering_small.values.size() != log_covering_rest.values.size()) {
    throw Error(Errc::RangeMismatch, "both covering series must span the same levels");
  }
  SeriesInput in;
  in.k_start = log_covering_small.k_start;
  in.values.resize(log_covering_small.values.size());
  for (std::size_t i = 0; i < in.values.size(); ++i) {
    in.values[i] = alpha * log_covering_small.values[i] + (1.0 - alpha) * log_covering_rest.values[i];
  }
  const TailCap c1 = effective_cap(log_covering_small);
  const TailCap c2 = effective_cap(log_covering_rest);
  in.cap = TailCap{TailCap::Kind::Linear, alpha * c1.slope + (1.0 - alpha) * c2.slope,
                   alpha * c1.intercept + (1.0 - alpha) * c2.intercept};
  return sum_levels("small-subset", "small subset chaining bound", kDudleyConstant, in,
                    [h](double v) { return std::sqrt(std::max(v, 0.0) + h); }, tail_tolerance);
}

LipschitzResult lipschitz_net_bound(double expected_lipschitz, const PsiEnvelope& env,
                                    const std::vector<LipschitzCandidate>& candidates) {
  if (candidates.empty()) throw Error(Errc::EmptyCandidates, "no candidate scales");
  if (!(expected_lipschitz >= 0.0)) throw Error(Errc::NegativeValue, "E[C] must be >= 0");
  LipschitzResult out;
  out.bound = std::numeric_limits<double>::infinity();
  out.best_scale = std::numeric_limits<double>::infinity();
  for (const auto& c : candidates) {
    if (!(c.scale > 0.0)) throw Error(Errc::InvalidArgument, "candidate scale must be positive");
    if (!(c.mi >= 0.0)) throw Error(Errc::NegativeValue, "candidate information must be >= 0");
    const double v = c.scale * expected_lipschitz + psi_star_inverse(env, c.mi);
    out.candidate_values.push_back(v);
    if (v < out.bound || (v == out.bound && c.scale < out.best_scale)) {
      out.bound = v;
      out.best_scale = c.scale;
    }
  }
  return out;
}

TailBound tail_bound_sup(const PsiEnvelope& env, std::size_t cardinality, double u) {
  if (cardinality == 0) throw Error(Errc::InvalidArgument, "cardinality must be >= 1");
  if (!(u >= 0.0)) throw Error(Errc::OutOfRange, "u must be >= 0");
  const double log_n = std::log(static_cast<double>(cardinality));
  TailBound out;
  out.threshold = psi_star_inverse(env, log_n + u);
  out.union_branch = std::min(1.0, std::exp(-u));
  out.variational_branch = 1.0;
  out.probability = out.union_branch;
  if (env.is_subgaussian()) {
    out.additive_threshold = std::sqrt(2.0 * env.sigma2() * log_n) + std::sqrt(2.0 * env.sigma2() * u);
  }
  return out;
}

TailBound tail_bound_selected(const PsiEnvelope& env, double mi, std::size_t cardinality, double u) {
  if (cardinality == 0) throw Error(Errc::InvalidArgument, "cardinality must be >= 1");
  if (!(u >= 0.0)) throw Error(Errc::OutOfRange, "u must be >= 0");
  if (!(mi >= 0.0) || !std::isfinite(mi)) {
    throw Error(Errc::OutOfRange, "selected mode needs finite mutual information >= 0");
  }
  if (mi + u == 0.0) throw Error(Errc::UndefinedAtZero, "I + u must be positive");
  const double s = mi + u;
  TailBound out;
  out.threshold = psi_star_inverse(env, s);
  out.variational_branch = (mi + std::log(2.0 - std::exp(-s))) / s;
  out.union_branch = std::exp(std::log(static_cast<double>(cardinality)) - s);
  out.probability = std::clamp(std::min(out.variational_branch, out.union_branch), 0.0, 1.0);
  if (env.is_subgaussian()) {
    out.additive_threshold = std::sqrt(2.0 * env.sigma2() * mi) + std::sqrt(2.0 * env.sigma2() * u);
  }
  return out;
}

LevelSeries log_covering_series(const FiniteMetricSpace& space, int k_min, double tail_tolerance,
                                CoverMode mode, double coefficient) {
  if (!(tail_tolerance > 0.0)) throw Error(Errc::InvalidArgument, "tail tolerance must be positive");
  if (space.size() == 0) throw Error(Errc::InvalidArgument, "empty space");
  const double cap = std::log(static_cast<double>(space.size()));
  LevelSeries series;
  series.k_start = k_min;
  series.cap = TailCap::constant(cap);
  for (int k = k_min;; ++k) {
    series.values.push_back(std::log(static_cast<double>(covering_number(space, std::ldexp(1.0, -k), mode))));
    if (coefficient * std::ldexp(1.0, -k) * std::sqrt(cap) <= 0.5 * tail_tolerance) break;
    if (k > k_min + 2000) throw Error(Errc::TailTooLoose, "covering series did not close");
  }
  return series;
}

}  // namespace chainmi
