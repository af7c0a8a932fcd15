// bound_engine.hpp
//
// Expected-supremum and expected-selection bounds as pure functions of
// precomputed inputs: covering numbers, mutual information per resolution
// level, and a psi envelope. Infinite series are summed over the supplied
// levels and closed with an explicitly declared tail (see LevelSeries).
#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chainmi/metric_core.hpp"
#include "chainmi/psi_envelope.hpp"

namespace chainmi {

inline constexpr double kDudleyConstant = 6.0;
// 3 * sqrt(2)
inline constexpr double kChainedConstant = 4.242640687119285146;

/// Upper envelope value_k <= slope * k + intercept for every level past the
/// last supplied entry.
struct TailCap {
  enum class Kind { Linear, LogCardinality };
  Kind kind = Kind::Linear;
  double slope = 0.0;
  double intercept = 0.0;

  double at(int k) const noexcept { return slope * k + intercept; }

  /// log of a cardinality growing as base^{k + offset}: (k + offset) log base.
  static TailCap log_cardinality(double base, double offset);
  static TailCap constant(double value);
};

enum class TailMode { AnalyticCap, ZeroAfterLast };

/// Per-level inputs (log covering numbers or mutual information, nats) for
/// consecutive levels k_start, k_start + 1, ...
struct LevelSeries {
  int k_start = 0;
  std::vector<double> values;
  TailMode tail_mode = TailMode::AnalyticCap;
  std::optional<TailCap> cap;

  int k_last() const noexcept { return k_start + static_cast<int>(values.size()) - 1; }
  double at(int k) const { return values.at(static_cast<std::size_t>(k - k_start)); }

  /// Throws NegativeValue / InvalidArgument on bad entries.
  void validate() const;
};

struct BoundReport {
  std::string formula_id;
  std::string theorem;
  double bound_value = 0.0;
  bool infinite = false;
  std::vector<std::pair<int, double>> per_level_terms;
  int truncation_k = 0;
  double tail_estimate = 0.0;
  double tail_tolerance = 0.0;

  double terms_sum() const;
};

enum class MiVariant { Expectation, AbsoluteExpectation, ExpectedAbsolute };
enum class ChainVariant { Expectation, Absolute };

double maximal_bound(const PsiEnvelope& env, std::size_t cardinality, bool absolute);

/// `mi` may be +infinity, which propagates.
double mi_bound(const PsiEnvelope& env, double mi, MiVariant variant);

BoundReport dudley_bound(const LevelSeries& log_covering, double tail_tolerance);

BoundReport chained_bound(const PsiEnvelope& env, const LevelSeries& mi_series, ChainVariant variant,
                          double tail_tolerance);

BoundReport small_subset_bound(double alpha, const LevelSeries& log_covering_small,
                               const LevelSeries& log_covering_rest, double tail_tolerance);

struct LipschitzCandidate {
  double scale = 0.0;
  double mi = 0.0;
};

struct LipschitzResult {
  double best_scale = 0.0;
  double bound = 0.0;
  std::vector<double> candidate_values;
};

LipschitzResult lipschitz_net_bound(double expected_lipschitz, const PsiEnvelope& env,
                                    const std::vector<LipschitzCandidate>& candidates);

struct TailBound {
  double threshold = 0.0;  // psi*^{-1}(information + u)
  double probability = 1.0;
  double union_branch = 1.0;
  double variational_branch = 1.0;  // selected mode only
  std::optional<double> additive_threshold;  // subgaussian: sqrt(2 s2 info) + sqrt(2 s2 u)
};

/// P[sup X_t >= psi*^{-1}(log|T| + u)] <= e^{-u}.
TailBound tail_bound_sup(const PsiEnvelope& env, std::size_t cardinality, double u);

/// Tail of the selected value X_W at threshold psi*^{-1}(I + u).
TailBound tail_bound_selected(const PsiEnvelope& env, double mi, std::size_t cardinality, double u);

/// log N(T, d, 2^{-k}) for k = k_min.. until the series tail under the cap
/// log|T| falls below `tail_tolerance` (with the given outer constant).
LevelSeries log_covering_series(const FiniteMetricSpace& space, int k_min, double tail_tolerance,
                                CoverMode mode = CoverMode::Greedy,
                                double coefficient = kDudleyConstant);

}  // namespace chainmi
