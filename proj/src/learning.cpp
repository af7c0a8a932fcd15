#include "chainmi/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chainmi/error.hpp"

namespace chainmi {

namespace {

// |Z|^n, or nullopt when it exceeds `cap`.
std::optional<std::size_t> sample_space_size(std::size_t examples, std::size_t n, std::size_t cap) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > cap / std::max<std::size_t>(examples, 1)) return std::nullopt;
    total *= examples;
  }
  if (total > cap) return std::nullopt;
  return total;
}

// Visits every sample with its probability under mu^n (z_1 varies slowest).
template <class Visitor>
void for_each_sample(const LearningProblem& p, Visitor&& visit) {
  const std::size_t n = p.sample_size;
  const std::size_t z = p.examples();
  std::vector<std::size_t> sample(n, 0);
  while (true) {
    double prob = 1.0;
    for (std::size_t i : sample) prob *= p.example_probs[i];
    visit(std::span<const std::size_t>(sample), prob);
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++sample[pos] < z) break;
      sample[pos] = 0;
      if (pos == 0) return;
    }
    if (n == 0) return;
  }
}

std::vector<double> population_risk(const LearningProblem& p) {
  std::vector<double> out(p.hypotheses(), 0.0);
  for (std::size_t w = 0; w < p.hypotheses(); ++w) {
    for (std::size_t z = 0; z < p.examples(); ++z) out[w] += p.example_probs[z] * p.loss[w][z];
  }
  return out;
}

std::vector<double> empirical_risk(const LearningProblem& p, std::span<const std::size_t> sample) {
  std::vector<double> out(p.hypotheses(), 0.0);
  for (std::size_t w = 0; w < p.hypotheses(); ++w) {
    for (std::size_t z : sample) out[w] += p.loss[w][z];
    out[w] /= static_cast<double>(sample.size());
  }
  return out;
}

std::vector<double> checked_row(const LearningProblem& p, std::span<const std::size_t> sample) {
  std::vector<double> row = p.kernel(sample);
  if (row.size() != p.hypotheses()) throw Error(Errc::KernelInvalid, "kernel row has the wrong width");
  double s = 0.0;
  for (double v : row) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::KernelInvalid, "kernel row has a negative entry");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw Error(Errc::KernelInvalid, "kernel row sums to " + std::to_string(s));
  return row;
}

constexpr double kInfoRoundoff = 1e-14;

double xlogy_ratio(double p, double q) { return p > 0.0 ? p * std::log(p / q) : 0.0; }

}  // namespace

void LearningProblem::validate() const {
  if (example_probs.empty()) throw Error(Errc::InvalidArgument, "no examples");
  double s = 0.0;
  for (double v : example_probs) {
    if (!(v >= 0.0)) throw Error(Errc::NotNormalized, "example probabilities must be >= 0");
    s += v;
  }
  if (std::abs(s - 1.0) > 1e-9) throw Error(Errc::NotNormalized, "example probabilities do not sum to 1");
  if (loss.empty()) throw Error(Errc::InvalidArgument, "no hypotheses");
  for (const auto& row : loss) {
    if (row.size() != examples()) throw Error(Errc::InvalidArgument, "loss row width != number of examples");
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw Error(Errc::InvalidArgument, "losses must be finite and >= 0");
    }
  }
  if (sample_size < 1) throw Error(Errc::InvalidArgument, "sample size must be >= 1");
  if (!kernel) throw Error(Errc::KernelInvalid, "missing kernel");
}

LearningKernel erm_kernel(const Matrix& loss) {
  return [loss](std::span<const std::size_t> sample) {
    std::vector<double> row(loss.size(), 0.0);
    std::size_t best = 0;
    double best_risk = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < loss.size(); ++w) {
      double r = 0.0;
      for (std::size_t z : sample) r += loss[w][z];
      if (r < best_risk) {
        best_risk = r;
        best = w;
      }
    }
    row[best] = 1.0;
    return row;
  };
}

LearningKernel constant_kernel(std::vector<double> probs) {
  return [probs = std::move(probs)](std::span<const std::size_t>) { return probs; };
}

LearningKernel gibbs_kernel(const Matrix& loss, double beta) {
  if (!(beta >= 0.0)) throw Error(Errc::KernelInvalid, "beta must be >= 0");
  return [loss, beta](std::span<const std::size_t> sample) {
    std::vector<double> row(loss.size());
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < loss.size(); ++w) {
      double r = 0.0;
      for (std::size_t z : sample) r += loss[w][z];
      row[w] = -beta * r;
      lo = std::min(lo, beta * r);
    }
    double s = 0.0;
    for (double& v : row) {
      v = std::exp(v + lo);
      s += v;
    }
    for (double& v : row) v /= s;
    return row;
  };
}

LearningKernel table_kernel(Matrix rows, std::size_t examples, std::size_t sample_size) {
  const auto total = sample_space_size(examples, sample_size, rows.size());
  if (!total || *total != rows.size()) {
    throw Error(Errc::KernelInvalid, "kernel table needs |Z|^n rows");
  }
  return [rows = std::move(rows), examples](std::span<const std::size_t> sample) {
    std::size_t idx = 0;
    for (std::size_t z : sample) idx = idx * examples + z;
    return rows.at(idx);
  };
}

FiniteMetricSpace gen_metric(const LearningProblem& problem) {
  problem.validate();
  const std::size_t h = problem.hypotheses();
  const double root_n = std::sqrt(static_cast<double>(problem.sample_size));
  Matrix dist(h, std::vector<double>(h, 0.0));
  for (std::size_t w = 0; w < h; ++w) {
    for (std::size_t v = w + 1; v < h; ++v) {
      double sup = 0.0;
      for (std::size_t z = 0; z < problem.examples(); ++z) {
        sup = std::max(sup, std::abs(problem.loss[w][z] - problem.loss[v][z]));
      }
      dist[w][v] = dist[v][w] = sup / root_n;
    }
  }
  return FiniteMetricSpace::validate(dist);
}

double gen_increment_log_mgf(const LearningProblem& problem, std::size_t w, std::size_t v, double lambda,
                             std::size_t enumeration_cap) {
  problem.validate();
  if (w >= problem.hypotheses() || v >= problem.hypotheses()) {
    throw Error(Errc::InvalidArgument, "hypothesis id out of range");
  }
  if (!sample_space_size(problem.examples(), problem.sample_size, enumeration_cap)) {
    throw Error(Errc::EnumerationCapExceeded, "sample space exceeds the enumeration cap");
  }
  const std::vector<double> pop = population_risk(problem);
  double mgf = 0.0;
  for_each_sample(problem, [&](std::span<const std::size_t> s, double prob) {
    double diff = 0.0;
    for (std::size_t z : s) diff += problem.loss[w][z] - problem.loss[v][z];
    diff /= static_cast<double>(s.size());
    mgf += prob * std::exp(lambda * ((pop[w] - pop[v]) - diff));
  });
  return std::log(mgf);
}

AdapterResult learning_adapter(const LearningProblem& problem, int k_max, std::size_t mc_samples,
                               std::uint64_t seed, double tail_tolerance, std::size_t enumeration_cap) {
  problem.validate();
  AdapterResult out;
  const std::size_t hyp = problem.hypotheses();
  const std::vector<double> pop = population_risk(problem);

  // Samples with their weights: exact enumeration, or equally weighted draws.
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<double>> emp;
  std::vector<double> weight;
  if (sample_space_size(problem.examples(), problem.sample_size, enumeration_cap)) {
    for_each_sample(problem, [&](std::span<const std::size_t> s, double prob) {
      if (prob == 0.0) return;
      rows.push_back(checked_row(problem, s));
      emp.push_back(empirical_risk(problem, s));
      weight.push_back(prob);
    });
  } else {
    out.enumerated = false;
    out.enumeration_cap_exceeded = true;
    if (mc_samples < 2) throw Error(Errc::InvalidArgument, "Monte-Carlo fallback needs samples");
    std::discrete_distribution<std::size_t> mu(problem.example_probs.begin(), problem.example_probs.end());
    std::vector<std::size_t> s(problem.sample_size);
    Rng rng;
    for (std::size_t j = 0; j < mc_samples; ++j) {
      if (j % kBatchSize == 0) {
        rng = make_stream(seed, j / kBatchSize);
        mu.reset();
      }
      for (auto& z : s) z = mu(rng);
      rows.push_back(checked_row(problem, s));
      emp.push_back(empirical_risk(problem, s));
      weight.push_back(1.0 / static_cast<double>(mc_samples));
    }
  }

  // gen and gen+ (W integrated out against the kernel row).
  std::vector<double> per_sample(rows.size(), 0.0);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    double g = 0.0;
    double ga = 0.0;
    for (std::size_t w = 0; w < hyp; ++w) {
      g += rows[j][w] * (pop[w] - emp[j][w]);
      ga += rows[j][w] * std::abs(pop[w] - emp[j][w]);
    }
    per_sample[j] = g;
    out.gen += weight[j] * g;
    out.gen_abs += weight[j] * ga;
  }
  if (!out.enumerated) out.gen_std_error = summarize(per_sample).std_error;

  // I(C; S) = sum_S P(S) D(P_{C|S} || P_C) for a labelling C = label(W).
  std::vector<double> marginal(hyp, 0.0);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t w = 0; w < hyp; ++w) marginal[w] += weight[j] * rows[j][w];
  }
  auto info_of_labels = [&](const std::vector<std::size_t>& label, std::size_t cells) {
    std::vector<double> pc(cells, 0.0);
    for (std::size_t w = 0; w < hyp; ++w) pc[label[w]] += marginal[w];
    double info = 0.0;
    std::vector<double> cond(cells);
    for (std::size_t j = 0; j < rows.size(); ++j) {
      std::fill(cond.begin(), cond.end(), 0.0);
      for (std::size_t w = 0; w < hyp; ++w) cond[label[w]] += rows[j][w];
      double d = 0.0;
      for (std::size_t c = 0; c < cells; ++c) d += xlogy_ratio(cond[c], pc[c]);
      info += weight[j] * d;
    }
    // Sample-blind kernels leave only round-off, which sqrt would inflate to ~1e-8.
    return info < kInfoRoundoff ? 0.0 : info;
  };
  std::vector<std::size_t> identity(hyp);
  for (std::size_t w = 0; w < hyp; ++w) identity[w] = w;
  out.mi_total = info_of_labels(identity, hyp);

  FiniteMetricSpace metric = gen_metric(problem);
  out.metric = metric;
  if (!(metric.diameter() > 0.0)) {
    // Every hypothesis has the same gen, so E[gen(W)] = E[gen(w)] = 0.
    out.degenerate = true;
    out.mi_series.tail_mode = TailMode::ZeroAfterLast;
    out.bound_a.formula_id = "chained-a";
    out.bound_a.theorem = "chained mutual information bound, expectation form (degenerate metric)";
    out.bound_a.tail_tolerance = tail_tolerance;
    out.bound_b_skipped_reason = "degenerate metric";
    return out;
  }

  out.k_min = base_scale_index(metric);
  double min_positive = metric.diameter();
  for (std::size_t w = 0; w < hyp; ++w) {
    for (std::size_t v = 0; v < hyp; ++v) {
      if (metric(w, v) > 0.0) min_positive = std::min(min_positive, metric(w, v));
    }
  }
  int k_sep = out.k_min;
  while (!(std::ldexp(1.0, -k_sep) < min_positive)) ++k_sep;
  out.k_separated = k_sep;
  const int k_top = std::max({k_max, k_sep, out.k_min});
  const PartitionHierarchy hierarchy = build_dyadic_hierarchy(metric, out.k_min, k_top);

  out.mi_series.k_start = out.k_min;
  for (int k = out.k_min; k <= k_top; ++k) {
    const PartitionLevel& lvl = hierarchy.level(k);
    out.mi_series.values.push_back(info_of_labels(lvl.cell_of, lvl.cell_count()));
  }
  // Past k_sep the cells are the loss-profile classes, so I_k stays constant.
  const double settled = out.mi_series.values.back();
  while (kChainedConstant * std::ldexp(1.0, -out.mi_series.k_last()) *
             std::sqrt(settled + std::numbers::ln2) > 0.5 * tail_tolerance) {
    out.mi_series.values.push_back(settled);
  }
  out.mi_series.cap = TailCap::constant(settled);

  const PsiEnvelope unit = PsiEnvelope::subgaussian(1.0);
  out.bound_a = chained_bound(unit, out.mi_series, ChainVariant::Expectation, tail_tolerance);

  const bool has_zero_loss = std::any_of(problem.loss.begin(), problem.loss.end(), [](const auto& row) {
    return std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; });
  });
  if (has_zero_loss) {
    out.bound_b = chained_bound(unit, out.mi_series, ChainVariant::Absolute, tail_tolerance);
  } else {
    out.bound_b_skipped_reason = "no hypothesis has identically zero loss";
  }
  return out;
}

McEstimate learning_gen_mc(const LearningProblem& problem, std::size_t samples, std::uint64_t seed) {
  problem.validate();
  const std::vector<double> pop = population_risk(problem);
  std::vector<double> values(samples);
  std::vector<std::size_t> s(problem.sample_size);
  for (std::size_t b = 0; b * kBatchSize < samples; ++b) {
    Rng rng = make_stream(seed, b);
    std::discrete_distribution<std::size_t> mu(problem.example_probs.begin(), problem.example_probs.end());
    const std::size_t end = std::min(samples, (b + 1) * kBatchSize);
    for (std::size_t j = b * kBatchSize; j < end; ++j) {
      for (auto& z : s) z = mu(rng);
      const std::vector<double> row = checked_row(problem, s);
      std::discrete_distribution<std::size_t> pick(row.begin(), row.end());
      const std::size_t w = pick(rng);
      double risk = 0.0;
      for (std::size_t z : s) risk += problem.loss[w][z];
      values[j] = pop[w] - risk / static_cast<double>(s.size());
    }
  }
  return summarize(values);
}

}  // namespace chainmi
