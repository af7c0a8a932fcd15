// info_theory.hpp
//
// Discrete information measures in nats. 0 log 0 = 0 throughout.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "chainmi/metric_core.hpp"

namespace chainmi {

inline constexpr double kNormalizationTol = 1e-12;

/// Finite joint law of a pair (w, x); rows index w, columns index x.
class JointDistribution {
 public:
  /// Throws NotNormalized unless entries are >= 0 and sum to 1 within `tol`.
  explicit JointDistribution(Matrix table, double tol = kNormalizationTol);

  /// Normalizes nonnegative weights (e.g. counts) into a joint.
  static JointDistribution from_weights(const Matrix& weights);

  std::size_t rows() const noexcept { return table_.size(); }
  std::size_t cols() const noexcept { return table_.empty() ? 0 : table_.front().size(); }
  double operator()(std::size_t w, std::size_t x) const noexcept { return table_[w][x]; }
  const Matrix& table() const noexcept { return table_; }

  std::vector<double> marginal_w() const;
  std::vector<double> marginal_x() const;
  std::vector<double> flattened() const;

 private:
  Matrix table_;
};

double entropy(std::span<const double> dist, double tol = kNormalizationTol);

double binary_entropy(double alpha);

/// D(p || q); +infinity when p is not absolutely continuous w.r.t. q.
double kl_divergence(std::span<const double> p, std::span<const double> q,
                     double tol = kNormalizationTol);

double mutual_information(const JointDistribution& joint);

/// Mutual information of the empirical joint frequency table. Upward-biased
/// for small samples (first order (|W|-1)(|X|-1)/(2n)).
double plug_in_mi(std::span<const std::pair<std::int64_t, std::int64_t>> samples);

/// First-order upward bias of plug_in_mi for the given label alphabet sizes.
double plug_in_mi_bias(std::size_t w_labels, std::size_t x_labels, std::size_t samples) noexcept;

/// D(p||q) - (E_p[f*] - log E_q[exp f*]) at f* = log(p/q). Zero at the
/// optimum of the Donsker-Varadhan representation.
double dv_gap(std::span<const double> p, std::span<const double> q,
              double tol = kNormalizationTol);

/// The Donsker-Varadhan objective E_p[f] - log E_q[exp f] for an arbitrary
/// test function f (entries may be -infinity where p vanishes).
double dv_objective(std::span<const double> p, std::span<const double> q, std::span<const double> f);

}  // namespace chainmi
