#include "chainmi/process_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "chainmi/error.hpp"
#include "chainmi/info_theory.hpp"

namespace chainmi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(Errc::OutOfRange, std::string(name) + " must lie in [0, 1]");
}

void check_rule(const SelectionRule& rule, const CanonicalProcessSpec& spec) {
  const bool circle = spec.kind() == CanonicalProcessSpec::Kind::UnitCircle;
  switch (rule.kind) {
    case SelectionRule::Kind::Argmax:
      break;
    case SelectionRule::Kind::NoisyCircleArgmax:
      if (!circle) throw Error(Errc::InvalidArgument, "noisy circle argmax needs the unit circle");
      require_unit_interval(rule.epsilon, "epsilon");
      break;
    case SelectionRule::Kind::TwoBlock:
      if (circle) throw Error(Errc::InvalidArgument, "two-block selection needs a finite index set");
      if (rule.block_size < 1 || rule.block_size >= spec.index_count()) {
        throw Error(Errc::OutOfRange, "two-block needs 1 <= m < n");
      }
      require_unit_interval(rule.delta, "delta");
      break;
    case SelectionRule::Kind::Custom: {
      if (circle) throw Error(Errc::InvalidArgument, "custom selection needs a finite index set");
      const std::size_t rows = std::size_t{1} << spec.dim();
      if (rule.table.size() != rows) {
        throw Error(Errc::InvalidArgument, "custom table needs one row per orthant (" + std::to_string(rows) + ")");
      }
      for (const auto& row : rule.table) {
        if (row.size() != spec.index_count()) throw Error(Errc::InvalidArgument, "custom row width != |T|");
        double s = 0.0;
        for (double p : row) {
          if (!(p >= 0.0)) throw Error(Errc::NotNormalized, "custom row has a negative entry");
          s += p;
        }
        if (std::abs(s - 1.0) > 1e-9) throw Error(Errc::NotNormalized, "custom row does not sum to 1");
      }
      break;
    }
  }
}

std::size_t argmax_in(std::span<const double> v, std::size_t lo, std::size_t hi) {
  std::size_t best = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

CanonicalProcessSpec CanonicalProcessSpec::from_points(Matrix points) {
  if (points.empty()) throw Error(Errc::EmptyRealization, "index set is empty");
  const std::size_t dim = points.front().size();
  if (dim == 0) throw Error(Errc::InvalidArgument, "points need at least one coordinate");
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(Errc::InvalidArgument, "points must share one dimension");
  }
  CanonicalProcessSpec spec;
  spec.kind_ = Kind::Points;
  spec.dim_ = dim;
  spec.points_ = std::move(points);
  return spec;
}

CanonicalProcessSpec CanonicalProcessSpec::identity(std::size_t n) {
  if (n == 0) throw Error(Errc::EmptyRealization, "index set is empty");
  CanonicalProcessSpec spec;
  spec.kind_ = Kind::Identity;
  spec.dim_ = n;
  return spec;
}

CanonicalProcessSpec CanonicalProcessSpec::unit_circle() {
  CanonicalProcessSpec spec;
  spec.kind_ = Kind::UnitCircle;
  spec.dim_ = 2;
  return spec;
}

std::size_t CanonicalProcessSpec::index_count() const noexcept {
  switch (kind_) {
    case Kind::Points: return points_.size();
    case Kind::Identity: return dim_;
    case Kind::UnitCircle: return 0;
  }
  return 0;
}

FiniteMetricSpace CanonicalProcessSpec::metric() const {
  switch (kind_) {
    case Kind::Points:
      return FiniteMetricSpace::from_points(points_);
    case Kind::Identity: {
      Matrix basis(dim_, std::vector<double>(dim_, 0.0));
      for (std::size_t i = 0; i < dim_; ++i) basis[i][i] = 1.0;
      return FiniteMetricSpace::from_points(basis);
    }
    case Kind::UnitCircle:
      break;
  }
  throw Error(Errc::InvalidArgument, "the unit circle has no finite metric");
}

double CanonicalProcessSpec::variance_proxy() const {
  if (kind_ != Kind::Points) return 1.0;
  double best = 0.0;
  for (const auto& p : points_) {
    best = std::max(best, std::inner_product(p.begin(), p.end(), p.begin(), 0.0));
  }
  return best;
}

std::vector<double> CanonicalProcessSpec::values(std::span<const double> gaussian) const {
  if (gaussian.size() != dim_) throw Error(Errc::InvalidArgument, "gaussian draw has the wrong dimension");
  switch (kind_) {
    case Kind::Identity:
      return {gaussian.begin(), gaussian.end()};
    case Kind::Points: {
      std::vector<double> out(points_.size());
      for (std::size_t t = 0; t < points_.size(); ++t) {
        out[t] = std::inner_product(points_[t].begin(), points_[t].end(), gaussian.begin(), 0.0);
      }
      return out;
    }
    case Kind::UnitCircle:
      break;
  }
  throw Error(Errc::InvalidArgument, "the unit circle has a continuum of values");
}

Matrix sample_process(const CanonicalProcessSpec& spec, std::uint64_t seed, std::size_t count) {
  if (count == 0) throw Error(Errc::InvalidArgument, "count must be >= 1");
  Matrix out;
  out.reserve(count);
  std::vector<double> g(spec.dim());
  for (std::size_t b = 0; b * kBatchSize < count; ++b) {
    Rng rng = make_stream(seed, b);
    std::normal_distribution<double> normal;
    const std::size_t end = std::min(count, (b + 1) * kBatchSize);
    for (std::size_t s = b * kBatchSize; s < end; ++s) {
      for (double& x : g) x = normal(rng);
      out.push_back(spec.values(g));
    }
  }
  return out;
}

SelectionRule SelectionRule::argmax() { return SelectionRule{}; }

SelectionRule SelectionRule::noisy_circle_argmax(double epsilon) {
  require_unit_interval(epsilon, "epsilon");
  SelectionRule r;
  r.kind = Kind::NoisyCircleArgmax;
  r.epsilon = epsilon;
  return r;
}

SelectionRule SelectionRule::two_block(std::size_t m, double delta) {
  require_unit_interval(delta, "delta");
  SelectionRule r;
  r.kind = Kind::TwoBlock;
  r.block_size = m;
  r.delta = delta;
  return r;
}

SelectionRule SelectionRule::custom(Matrix table) {
  SelectionRule r;
  r.kind = Kind::Custom;
  r.table = std::move(table);
  return r;
}

SelectionRule SelectionRule::independent(std::size_t dim, std::size_t index_count) {
  if (index_count == 0) throw Error(Errc::EmptyRealization, "index set is empty");
  return custom(Matrix(std::size_t{1} << dim,
                       std::vector<double>(index_count, 1.0 / static_cast<double>(index_count))));
}

std::size_t orthant_code(std::span<const double> gaussian) {
  std::size_t code = 0;
  for (std::size_t i = 0; i < gaussian.size(); ++i) {
    if (gaussian[i] > 0.0) code |= std::size_t{1} << i;
  }
  return code;
}

double circle_argmax_phase(std::span<const double> gaussian) {
  // <(sin phi, cos phi), (g1, g2)> peaks where (sin phi, cos phi) is parallel to g.
  double phase = std::atan2(gaussian[0], gaussian[1]);
  if (phase < 0.0) phase += kTwoPi;
  if (phase >= kTwoPi) phase = 0.0;
  return phase;
}

Selection select(const SelectionRule& rule, const CanonicalProcessSpec& spec, const Realization& r,
                 Rng& noise) {
  const bool circle = spec.kind() == CanonicalProcessSpec::Kind::UnitCircle;
  if (circle ? r.gaussian.size() < 2 : r.values.empty()) {
    throw Error(Errc::EmptyRealization, "nothing to select from");
  }
  Selection out;
  switch (rule.kind) {
    case SelectionRule::Kind::Argmax:
      if (circle) {
        out.phase = circle_argmax_phase(r.gaussian);
      } else {
        out.index = argmax_in(r.values, 0, r.values.size());
      }
      break;
    case SelectionRule::Kind::NoisyCircleArgmax: {
      if (!circle) throw Error(Errc::InvalidArgument, "noisy circle argmax needs the unit circle");
      double phase = circle_argmax_phase(r.gaussian);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      if (unit(noise) >= rule.epsilon) {
        std::uniform_real_distribution<double> z(-std::numbers::pi, std::numbers::pi);
        phase += z(noise);
      }
      phase = std::fmod(phase, kTwoPi);
      if (phase < 0.0) phase += kTwoPi;
      if (phase >= kTwoPi) phase = 0.0;
      out.phase = phase;
      break;
    }
    case SelectionRule::Kind::TwoBlock: {
      const std::size_t m = rule.block_size;
      if (m < 1 || m >= r.values.size()) throw Error(Errc::OutOfRange, "two-block needs 1 <= m < n");
      std::bernoulli_distribution other(rule.delta);
      out.index = other(noise) ? argmax_in(r.values, m, r.values.size()) : argmax_in(r.values, 0, m);
      break;
    }
    case SelectionRule::Kind::Custom: {
      const auto& row = rule.table.at(orthant_code(r.gaussian));
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      double u = unit(noise);
      out.index = row.size() - 1;
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (u < row[j]) {
          out.index = j;
          break;
        }
        u -= row[j];
      }
      break;
    }
  }
  return out;
}

double circle_mi_level(double epsilon, int k) {
  require_unit_interval(epsilon, "epsilon");
  if (k < -1) throw Error(Errc::OutOfRange, "circle levels start at k = -1");
  const double m = std::ldexp(1.0, k + 2);
  const double q = (1.0 - epsilon) / m;
  const double p1 = epsilon + q;
  // Relative entropy to the uniform law on m arcs; exactly 0 at epsilon = 0.
  double d = p1 * std::log1p(epsilon * (m - 1.0));
  if (q > 0.0) d += (m - 1.0) * q * std::log1p(-epsilon);
  return std::max(d, 0.0);
}

double circle_total_mi(double epsilon) {
  require_unit_interval(epsilon, "epsilon");
  return epsilon > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

CircleReference circle_reference(double epsilon) {
  require_unit_interval(epsilon, "epsilon");
  const double sup_mean = std::sqrt(std::numbers::pi / 2.0);
  return {epsilon * sup_mean, sup_mean};
}

LevelSeries circle_mi_series(double epsilon, int k_last) {
  if (k_last < -1) throw Error(Errc::OutOfRange, "circle levels start at k = -1");
  LevelSeries s;
  s.k_start = -1;
  for (int k = -1; k <= k_last; ++k) s.values.push_back(circle_mi_level(epsilon, k));
  s.cap = TailCap::log_cardinality(2.0, 2.0);
  return s;
}

LevelSeries circle_log_cardinality_series(int k_last) {
  if (k_last < -1) throw Error(Errc::OutOfRange, "circle levels start at k = -1");
  LevelSeries s;
  s.k_start = -1;
  for (int k = -1; k <= k_last; ++k) s.values.push_back((k + 2) * std::numbers::ln2);
  s.cap = TailCap::log_cardinality(2.0, 2.0);
  return s;
}

std::vector<double> mc_values(const CanonicalProcessSpec& spec, const SelectionRule& rule,
                              const Statistic& statistic, std::size_t samples, std::uint64_t seed) {
  const bool circle = spec.kind() == CanonicalProcessSpec::Kind::UnitCircle;
  const bool needs_selection =
      statistic.kind == Statistic::Kind::SelectedMean || statistic.kind == Statistic::Kind::TailFreq;
  if (needs_selection) check_rule(rule, spec);
  if (statistic.projection_level && !circle) {
    throw Error(Errc::InvalidArgument, "projection levels apply to the unit circle only");
  }

  std::vector<double> out(samples);
  const std::size_t batches = (samples + kBatchSize - 1) / kBatchSize;

  auto run_batch = [&](std::size_t b) {
    Rng rng = make_stream(seed, b);
    std::normal_distribution<double> normal;
    Realization r;
    r.gaussian.resize(spec.dim());
    const std::size_t end = std::min(samples, (b + 1) * kBatchSize);
    for (std::size_t s = b * kBatchSize; s < end; ++s) {
      for (double& x : r.gaussian) x = normal(rng);
      if (!circle) r.values = spec.values(r.gaussian);

      double sup = 0.0;
      if (!needs_selection) {
        sup = circle ? std::hypot(r.gaussian[0], r.gaussian[1])
                     : *std::max_element(r.values.begin(), r.values.end());
      }
      double selected = 0.0;
      if (needs_selection) {
        const Selection w = select(rule, spec, r, rng);
        if (circle) {
          double phase = w.phase;
          if (statistic.projection_level) {
            const int k = *statistic.projection_level;
            phase = circle_cell_center(k, circle_dyadic_partition(k, phase));
          }
          selected = std::sin(phase) * r.gaussian[0] + std::cos(phase) * r.gaussian[1];
        } else {
          selected = r.values[w.index];
        }
      }
      switch (statistic.kind) {
        case Statistic::Kind::SelectedMean: out[s] = selected; break;
        case Statistic::Kind::SupMean: out[s] = sup; break;
        case Statistic::Kind::TailFreq: out[s] = selected >= statistic.threshold ? 1.0 : 0.0; break;
        case Statistic::Kind::SupTailFreq: out[s] = sup >= statistic.threshold ? 1.0 : 0.0; break;
      }
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(batches, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t b = 0; b < batches; ++b) run_batch(b);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < batches; b = next++) {
        try {
          run_batch(b);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

McEstimate summarize(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptySample, "no samples");
  McEstimate est;
  est.samples = values.size();
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  est.estimate = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.estimate) * (v - est.estimate);
    est.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return est;
}

McEstimate mc_estimate(const CanonicalProcessSpec& spec, const SelectionRule& rule,
                       const Statistic& statistic, std::size_t samples, std::uint64_t seed) {
  if (samples < 100) throw Error(Errc::InvalidArgument, "Monte-Carlo estimates need >= 100 samples");
  const std::vector<double> v = mc_values(spec, rule, statistic, samples, seed);
  return summarize(v);
}

double two_block_mi_cap(std::size_t n, std::size_t m, double delta) {
  if (m < 1 || m >= n) throw Error(Errc::OutOfRange, "two-block needs 1 <= m < n");
  require_unit_interval(delta, "delta");
  double cap = binary_entropy(delta);
  if (delta < 1.0) cap += (1.0 - delta) * std::log(static_cast<double>(m));
  if (delta > 0.0) cap += delta * std::log(static_cast<double>(n - m));
  return cap;
}

double custom_rule_mi(const SelectionRule& rule, std::size_t dim) {
  if (rule.kind != SelectionRule::Kind::Custom) throw Error(Errc::InvalidArgument, "not a custom rule");
  const std::size_t rows = std::size_t{1} << dim;
  if (rule.table.size() != rows) throw Error(Errc::InvalidArgument, "custom table needs one row per orthant");
  Matrix joint(rule.table.front().size(), std::vector<double>(rows, 0.0));
  for (std::size_t q = 0; q < rows; ++q) {
    for (std::size_t w = 0; w < rule.table[q].size(); ++w) {
      joint[w][q] = rule.table[q][w] / static_cast<double>(rows);
    }
  }
  return mutual_information(JointDistribution(std::move(joint), 1e-9));
}

}  // namespace chainmi
