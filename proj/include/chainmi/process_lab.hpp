// process_lab.hpp
//
// Canonical Gaussian processes X_t = <t, G>, selection rules W, closed forms
// for the noisy-argmax circle example, and seeded Monte-Carlo oracles.
//
// Randomness: sample i belongs to batch i / kBatchSize, and every batch draws
// from its own generator seeded by (seed, batch). Results therefore depend on
// the seed only, never on thread count or scheduling.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "chainmi/bound_engine.hpp"
#include "chainmi/metric_core.hpp"

namespace chainmi {

inline constexpr std::size_t kBatchSize = 4096;

using Rng = std::mt19937_64;

/// Generator for stream `stream` of the run seeded with `seed`.
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

class CanonicalProcessSpec {
 public:
  enum class Kind { Points, Identity, UnitCircle };

  static CanonicalProcessSpec from_points(Matrix points);
  /// X_i = G_i for i < n (n independent standard normals).
  static CanonicalProcessSpec identity(std::size_t n);
  /// Continuous index set {(sin phi, cos phi)}; values are reported through
  /// the phase, never on a grid.
  static CanonicalProcessSpec unit_circle();

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  /// Number of indices for finite kinds; 0 for the circle.
  std::size_t index_count() const noexcept;
  const Matrix& points() const noexcept { return points_; }

  /// Euclidean metric on the index set (finite kinds only).
  FiniteMetricSpace metric() const;
  /// max_t ||t||^2: every X_t is N(0, ||t||^2).
  double variance_proxy() const;

  /// Process values for one Gaussian draw (finite kinds only).
  std::vector<double> values(std::span<const double> gaussian) const;

 private:
  Kind kind_ = Kind::Points;
  std::size_t dim_ = 0;
  Matrix points_;
};

/// count x |T| matrix of realizations, deterministic in `seed`.
Matrix sample_process(const CanonicalProcessSpec& spec, std::uint64_t seed, std::size_t count);

/// Gaussian vector and (for finite kinds) the process values it induces.
struct Realization {
  std::vector<double> gaussian;
  std::vector<double> values;
};

struct SelectionRule {
  enum class Kind { Argmax, NoisyCircleArgmax, TwoBlock, Custom };

  Kind kind = Kind::Argmax;
  double epsilon = 1.0;         // NoisyCircleArgmax: atom mass at zero noise
  std::size_t block_size = 1;   // TwoBlock: indices [0, m) form the likely block
  double delta = 0.0;           // TwoBlock: probability of using the other block
  Matrix table;                 // Custom: P(W = j | orthant code of G = q), row q

  static SelectionRule argmax();
  static SelectionRule noisy_circle_argmax(double epsilon);
  static SelectionRule two_block(std::size_t m, double delta);
  static SelectionRule custom(Matrix table);
  /// Custom rule whose rows all equal the uniform law: W independent of X.
  static SelectionRule independent(std::size_t dim, std::size_t index_count);
};

struct Selection {
  std::size_t index = 0;
  double phase = 0.0;  // circle only
};

/// Bit i of the code is set when gaussian[i] > 0.
std::size_t orthant_code(std::span<const double> gaussian);

/// Argmax ties go to the lowest index. For the circle the noiseless argmax
/// phase is atan2(G1, G2) mapped into [0, 2 pi).
Selection select(const SelectionRule& rule, const CanonicalProcessSpec& spec, const Realization& r,
                 Rng& noise);

double circle_argmax_phase(std::span<const double> gaussian);

/// I([W]_k; X_T) for the noisy circle argmax: log m - H(spiked law), m = 2^{k+2}.
double circle_mi_level(double epsilon, int k);

/// I(W; X_T) itself: +infinity whenever the noise has an atom (epsilon > 0).
double circle_total_mi(double epsilon);

struct CircleReference {
  double true_bias = 0.0;  // E[X_W] = epsilon sqrt(pi/2)
  double sup_mean = 0.0;   // E[sup X_phi] = sqrt(pi/2)
};

CircleReference circle_reference(double epsilon);

/// circle_mi_level for k = -1..k_last with the log-cardinality tail cap (k+2) log 2.
LevelSeries circle_mi_series(double epsilon, int k_last);

/// log |P_k| = (k+2) log 2 for k = -1..k_last with the matching cap.
LevelSeries circle_log_cardinality_series(int k_last);

struct Statistic {
  enum class Kind { SelectedMean, SupMean, TailFreq, SupTailFreq };

  Kind kind = Kind::SelectedMean;
  double threshold = 0.0;
  /// Circle only: evaluate X at the midpoint of the level-k arc containing W.
  std::optional<int> projection_level;

  static Statistic selected_mean() { return {Kind::SelectedMean, 0.0, std::nullopt}; }
  static Statistic sup_mean() { return {Kind::SupMean, 0.0, std::nullopt}; }
  static Statistic tail_freq(double threshold, std::optional<int> level = std::nullopt) {
    return {Kind::TailFreq, threshold, level};
  }
  static Statistic sup_tail_freq(double threshold) { return {Kind::SupTailFreq, threshold, std::nullopt}; }
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Per-sample statistic values, in sample order.
std::vector<double> mc_values(const CanonicalProcessSpec& spec, const SelectionRule& rule,
                              const Statistic& statistic, std::size_t samples, std::uint64_t seed);

McEstimate summarize(std::span<const double> values);

/// Requires samples >= 100.
McEstimate mc_estimate(const CanonicalProcessSpec& spec, const SelectionRule& rule,
                       const Statistic& statistic, std::size_t samples, std::uint64_t seed);

/// (1 - delta) log m + delta log(n - m) + H_b(delta) >= H(W) >= I(W; X).
double two_block_mi_cap(std::size_t n, std::size_t m, double delta);

/// Exact I(W; orthant(G)) for a Custom rule, enumerating the 2^dim equally
/// likely orthants. Upper-bounds I(W; X_T) because W sees X only through G's
/// orthant.
double custom_rule_mi(const SelectionRule& rule, std::size_t dim);

}  // namespace chainmi
