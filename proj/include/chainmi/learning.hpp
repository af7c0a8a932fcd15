// learning.hpp
//
// Finite statistical-learning problems mapped onto the chained bound: the
// generalization-error process gen(w) = L_mu(w) - L_S(w) is subgaussian for
//     d(w, v) = || loss(w, .) - loss(v, .) ||_inf / sqrt(n)
// and I([W]_k; S) feeds the level series.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chainmi/bound_engine.hpp"
#include "chainmi/metric_core.hpp"
#include "chainmi/process_lab.hpp"

namespace chainmi {

inline constexpr std::size_t kDefaultEnumerationCap = 1000000;

/// P_{W|S}: maps a sample (example ids, length n) to a law over hypotheses.
using LearningKernel = std::function<std::vector<double>(std::span<const std::size_t>)>;

struct LearningProblem {
  std::vector<double> example_probs;  // mu(z)
  Matrix loss;                        // loss[w][z] >= 0
  std::size_t sample_size = 1;        // n
  LearningKernel kernel;

  std::size_t hypotheses() const noexcept { return loss.size(); }
  std::size_t examples() const noexcept { return example_probs.size(); }

  /// Throws KernelInvalid / NotNormalized / InvalidArgument.
  void validate() const;
};

/// Deterministic empirical risk minimizer, ties to the lowest hypothesis id.
LearningKernel erm_kernel(const Matrix& loss);
/// Ignores the sample.
LearningKernel constant_kernel(std::vector<double> probs);
/// P(w | S) proportional to exp(-beta * n * L_S(w)).
LearningKernel gibbs_kernel(const Matrix& loss, double beta);
/// One row per sample in lexicographic order of (z_1, ..., z_n), z_1 slowest.
LearningKernel table_kernel(Matrix rows, std::size_t examples, std::size_t sample_size);

FiniteMetricSpace gen_metric(const LearningProblem& problem);

/// Exact log E[exp(lambda (gen(w) - gen(v)))] by enumerating samples.
double gen_increment_log_mgf(const LearningProblem& problem, std::size_t w, std::size_t v, double lambda,
                             std::size_t enumeration_cap = kDefaultEnumerationCap);

struct AdapterResult {
  std::optional<FiniteMetricSpace> metric;
  bool degenerate = false;        // all hypotheses share one loss profile
  bool enumerated = true;         // false: Monte-Carlo over samples
  bool enumeration_cap_exceeded = false;
  int k_min = 0;
  int k_separated = 0;            // first level whose cells are loss-profile classes
  LevelSeries mi_series;          // I([W]_k; S)
  double mi_total = 0.0;          // I(W; S)
  double gen = 0.0;               // gen(mu, P_{W|S})
  double gen_abs = 0.0;           // E|L_mu(W) - L_S(W)|
  double gen_std_error = 0.0;     // 0 when enumerated
  BoundReport bound_a;
  std::optional<BoundReport> bound_b;
  std::string bound_b_skipped_reason;
};

/// Builds the gen-process metric and a dyadic hierarchy over hypotheses,
/// computes I([W]_k; S) and gen exactly when |Z|^n <= enumeration_cap (else
/// by Monte-Carlo over samples, flagged), and evaluates the chained bound on
/// gen (expectation form) and on gen+ (absolute form, only when some
/// hypothesis has identically zero loss).
AdapterResult learning_adapter(const LearningProblem& problem, int k_max, std::size_t mc_samples,
                               std::uint64_t seed, double tail_tolerance = 1e-9,
                               std::size_t enumeration_cap = kDefaultEnumerationCap);

/// Independent oracle: draws S ~ mu^n and W ~ P_{W|S}, averages L_mu(W) - L_S(W).
McEstimate learning_gen_mc(const LearningProblem& problem, std::size_t samples, std::uint64_t seed);

}  // namespace chainmi
