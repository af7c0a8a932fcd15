// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "chainmi/bound_engine.hpp"
#include "chainmi/info_theory.hpp"
#include "chainmi/learning.hpp"
#include "chainmi/process_lab.hpp"
#include "generators.hpp"

using namespace chainmi;
using chainmi::testing::Gen;

namespace {

using Clock = std::chrono::steady_clock;

const PsiEnvelope kUnit = PsiEnvelope::subgaussian(1.0);
const std::vector<double> kEpsilons{1.0 / 20, 1.0 / 30, 1.0 / 40, 1.0 / 50, 1.0 / 100, 1.0 / 200, 1.0 / 400};
const std::vector<std::string> kEpsilonNames{"1/20", "1/30", "1/40", "1/50", "1/100", "1/200", "1/400"};
const std::vector<double> kCmiRow{1.1013, 0.7507, 0.5709, 0.4612, 0.2364, 0.1204, 0.0610};
const std::vector<double> kBiasRow{0.0626, 0.0417, 0.0313, 0.0250, 0.0125, 0.0062, 0.0031};
constexpr int kCircleLevels = 40;
constexpr double kCircleTailTol = 1e-6;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;
  std::size_t elided = 0;  // passing checks beyond the print limit

  void check(bool ok, const std::string& note) {
    if (!ok) pass = false;
    if (!ok || notes.size() < 40) {
      notes.push_back((ok ? "  ok   " : "  FAIL ") + note);
    } else {
      ++elided;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// 1. 3 sqrt(2) sum_{k >= -1} 2^{-k} sqrt(log 2^{k+2}) = 19.0352.
Outcome chaining_constant() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto r = chained_bound(kUnit, circle_log_cardinality_series(kCircleLevels), ChainVariant::Expectation,
                               kCircleTailTol);
  const double ms = ms_since(t0);
  o.check(std::abs(r.bound_value - 19.0352) <= 5e-3, fmt("value %.6f vs 19.0352 (tol 5e-3)", r.bound_value));
  o.check(ms < 1.0, fmt("runtime %.4f ms < 1 ms", ms));
  return o;
}

// 2. Reference CMI row.
Outcome cmi_row() {
  Outcome o;
  std::vector<double> values;
  const auto t0 = Clock::now();
  for (double eps : kEpsilons) {
    values.push_back(chained_bound(kUnit, circle_mi_series(eps, kCircleLevels), ChainVariant::Expectation,
                                   kCircleTailTol)
                         .bound_value);
  }
  const double ms = ms_since(t0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    o.check(std::abs(values[i] - kCmiRow[i]) <= 1e-3,
            "eps=" + kEpsilonNames[i] + fmt(": %.5f vs %.4f (tol 1e-3)", values[i], kCmiRow[i]));
  }
  o.check(ms < 10.0, fmt("runtime %.4f ms < 10 ms", ms));
  return o;
}

// 3. Reference E[X_W] row: analytic and Monte-Carlo.
Outcome bias_row() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto circle = CanonicalProcessSpec::unit_circle();
  for (std::size_t i = 0; i < kEpsilons.size(); ++i) {
    const double analytic = circle_reference(kEpsilons[i]).true_bias;
    o.check(std::abs(analytic - kBiasRow[i]) <= 5e-5,
            "eps=" + kEpsilonNames[i] +
                fmt(": analytic %.7f vs %.4f, |diff| %.2e (tol 5e-5)", analytic, kBiasRow[i],
                    std::abs(analytic - kBiasRow[i])));
    const auto mc = mc_estimate(circle, SelectionRule::noisy_circle_argmax(kEpsilons[i]),
                                Statistic::selected_mean(), 1000000, 3000 + i);
    o.check(std::abs(mc.estimate - kBiasRow[i]) <= 3.0 * mc.std_error,
            "eps=" + kEpsilonNames[i] +
                fmt(": MC %.5f +- %.5f vs %.4f (3 stderr)", mc.estimate, mc.std_error, kBiasRow[i]));
  }
  const double ms = ms_since(t0);
  o.check(ms < 30000.0, fmt("runtime %.0f ms < 30 s", ms));
  return o;
}

// 4. The plain MI bound diverges on the circle.
Outcome mi_divergence() {
  Outcome o;
  for (std::size_t i = 0; i < kEpsilons.size(); ++i) {
    double v = 0.0;
    bool threw = false;
    try {
      v = mi_bound(kUnit, circle_total_mi(kEpsilons[i]), MiVariant::Expectation);
    } catch (const std::exception&) {
      threw = true;
    }
    o.check(!threw && std::isinf(v) && v > 0, "eps=" + kEpsilonNames[i] + ": MI bound reported as +inf");
  }
  return o;
}

// 5. E[sup_phi X_phi] = sqrt(pi/2).
Outcome sup_oracle() {
  Outcome o;
  const auto mc = mc_estimate(CanonicalProcessSpec::unit_circle(), SelectionRule::argmax(), Statistic::sup_mean(),
                              1000000, 5000);
  o.check(std::abs(mc.estimate - 1.2533) <= 3.0 * mc.std_error,
          fmt("MC %.5f +- %.5f vs 1.2533 (3 stderr)", mc.estimate, mc.std_error));
  return o;
}

// Orthant-driven selector: half the rows pick argmax_t <t, sign(q)>, the rest are random laws.
Matrix random_selector(Gen& g, const Matrix& points, std::size_t dim) {
  Matrix table;
  for (std::size_t q = 0; q < (std::size_t{1} << dim); ++q) {
    if (g.coin()) {
      std::size_t best = 0;
      double best_v = -INFINITY;
      for (std::size_t t = 0; t < points.size(); ++t) {
        double v = 0.0;
        for (std::size_t i = 0; i < dim; ++i) v += points[t][i] * ((q >> i & 1u) ? 1.0 : -1.0);
        if (v > best_v) {
          best_v = v;
          best = t;
        }
      }
      std::vector<double> row(points.size(), 0.0);
      row[best] = 1.0;
      table.push_back(row);
    } else {
      table.push_back(g.simplex(points.size(), 0.5));
    }
  }
  return table;
}

struct FiniteInstance {
  CanonicalProcessSpec spec;
  SelectionRule rule;
  double mi = 0.0;
};

std::vector<FiniteInstance> finite_instances() {
  Gen g(6006);
  std::vector<FiniteInstance> out;
  for (int i = 0; i < 20; ++i) {
    const std::size_t dim = g.index(1, 8);
    const auto points = g.points(g.index(2, 32), dim);
    auto spec = CanonicalProcessSpec::from_points(points);
    auto rule = SelectionRule::custom(random_selector(g, points, dim));
    const double mi = custom_rule_mi(rule, dim);
    out.push_back({std::move(spec), std::move(rule), mi});
  }
  return out;
}

// 6. Bound validity on the circle and on random finite processes.
Outcome bound_validity() {
  Outcome o;
  const auto circle = CanonicalProcessSpec::unit_circle();
  for (std::size_t i = 0; i < kEpsilons.size(); ++i) {
    const double bound = chained_bound(kUnit, circle_mi_series(kEpsilons[i], kCircleLevels),
                                       ChainVariant::Expectation, kCircleTailTol)
                             .bound_value;
    const auto mc = mc_estimate(circle, SelectionRule::noisy_circle_argmax(kEpsilons[i]),
                                Statistic::selected_mean(), 200000, 6000 + i);
    o.check(mc.estimate <= bound, "circle eps=" + kEpsilonNames[i] +
                                      fmt(": MC %.5f <= CMI bound %.5f", mc.estimate, bound));
  }

  const auto instances = finite_instances();
  std::uint64_t seed = 6100;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    const double s2 = inst.spec.variance_proxy();
    const auto env = PsiEnvelope::subgaussian(s2);
    const std::string tag = "process " + std::to_string(i) + " (dim " + std::to_string(inst.spec.dim()) +
                            ", |T| " + std::to_string(inst.spec.index_count()) + ")";
    const auto mean = mc_estimate(inst.spec, inst.rule, Statistic::selected_mean(), 100000, seed++);
    const double mb = mi_bound(env, inst.mi, MiVariant::Expectation);
    o.check(mean.estimate <= mb + 3.0 * mean.std_error,
            tag + fmt(": mean %.4f <= mi bound %.4f + 3 stderr (%.4f)", mean.estimate, mb, mean.std_error));
    for (double u : {0.5, 1.5, 3.0}) {
      const auto sel = tail_bound_selected(env, inst.mi, inst.spec.index_count(), u);
      const auto f = mc_estimate(inst.spec, inst.rule, Statistic::tail_freq(sel.threshold), 100000, seed++);
      o.check(f.estimate <= sel.probability + 3.0 * f.std_error,
              tag + fmt(": selected tail u=%.1f freq %.5f <= %.5f", u, f.estimate, sel.probability));
      const auto sup = tail_bound_sup(env, inst.spec.index_count(), u);
      const auto fs = mc_estimate(inst.spec, inst.rule, Statistic::sup_tail_freq(sup.threshold), 100000, seed++);
      o.check(fs.estimate <= sup.probability + 3.0 * fs.std_error,
              tag + fmt(": sup tail u=%.1f freq %.5f <= %.5f", u, fs.estimate, sup.probability));
    }
  }
  return o;
}

Matrix relabel(const Matrix& joint, const std::vector<std::size_t>& label, std::size_t labels) {
  Matrix out(labels, std::vector<double>(joint.front().size(), 0.0));
  for (std::size_t w = 0; w < joint.size(); ++w) {
    for (std::size_t x = 0; x < joint[w].size(); ++x) out[label[w]][x] += joint[w][x];
  }
  return out;
}

// 7. Coarsening never increases information.
Outcome refinement_dpi() {
  Outcome o;
  Gen g(7007);
  double worst = -INFINITY;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t rows = g.index(2, 12);
    const Matrix joint = g.joint(rows, g.index(2, 8), 0.15);
    const std::size_t fine_n = g.index(1, rows);
    std::vector<std::size_t> fine(rows);
    for (auto& l : fine) l = g.index(0, fine_n - 1);
    const std::size_t coarse_n = g.index(1, fine_n);
    std::vector<std::size_t> h(fine_n);
    for (auto& l : h) l = g.index(0, coarse_n - 1);
    std::vector<std::size_t> coarse(rows);
    for (std::size_t w = 0; w < rows; ++w) coarse[w] = h[fine[w]];
    const double i_fine = mutual_information(JointDistribution(relabel(joint, fine, fine_n), 1e-9));
    const double i_coarse = mutual_information(JointDistribution(relabel(joint, coarse, coarse_n), 1e-9));
    worst = std::max(worst, i_coarse - i_fine);
  }
  o.check(worst <= 1e-10, fmt("max I(coarse) - I(fine) over 100 joints = %.3e <= 1e-10", worst));
  return o;
}

// 8. Numerical dual inverse and Donsker-Varadhan.
Outcome legendre() {
  Outcome o;
  double worst_inv = 0.0;
  for (double s2 : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    const auto env = PsiEnvelope::general([s2](double l) { return 0.5 * s2 * l * l; });
    for (double y : {1e-6, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
      worst_inv = std::max(worst_inv, std::abs(psi_star_inverse(env, y) - std::sqrt(2.0 * s2 * y)));
    }
  }
  o.check(worst_inv <= 1e-8, fmt("max |general inverse - sqrt(2 s2 y)| = %.3e <= 1e-8", worst_inv));
  Gen g(8008);
  double worst_gap = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = g.index(2, 10);
    const auto p = g.simplex(n, 0.2);
    const auto q = g.simplex(n);
    worst_gap = std::max(worst_gap, std::abs(dv_gap(p, q)));
  }
  o.check(worst_gap <= 1e-9, fmt("max |dv_gap| over 100 pairs = %.3e <= 1e-9", worst_gap));
  return o;
}

// 9. Learning adapter against exhaustive enumeration and Monte-Carlo.
Outcome learning_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  LearningProblem p;
  p.example_probs = {0.4, 0.6};
  p.loss = {{0.0, 1.0}, {1.0, 0.0}, {0.3, 0.6}, {0.8, 0.1}};
  p.sample_size = 4;
  p.kernel = erm_kernel(p.loss);
  const auto r = learning_adapter(p, 6, 0, 9000);
  const auto mc = learning_gen_mc(p, 400000, 9001);
  const double ms = ms_since(t0);
  o.check(r.enumerated, "exact enumeration of all 16 samples");
  o.check(r.gen <= r.bound_a.bound_value, fmt("exact gen %.5f <= chained bound %.5f", r.gen, r.bound_a.bound_value));
  o.check(std::abs(r.gen - mc.estimate) <= 3.0 * mc.std_error,
          fmt("exact gen %.5f vs MC %.5f +- %.5f (3 stderr)", r.gen, mc.estimate, mc.std_error));
  o.check(ms < 10000.0, fmt("runtime %.1f ms < 10 s", ms));
  return o;
}

// 10. Ordering: I_k series never beats log|P_k| series; small subset endpoint.
Outcome ordering() {
  Outcome o;
  Gen g(1010);
  std::size_t level_violations = 0;
  std::size_t instances = 0;
  auto compare = [&](const BoundReport& mi, const BoundReport& card) {
    ++instances;
    for (std::size_t i = 0; i < mi.per_level_terms.size(); ++i) {
      if (mi.per_level_terms[i].second > card.per_level_terms[i].second + 1e-15) ++level_violations;
    }
    if (mi.bound_value > card.bound_value + 1e-12) ++level_violations;
  };

  for (int rep = 0; rep < 50; ++rep) {
    const double eps = rep < 7 ? kEpsilons[static_cast<std::size_t>(rep)] : g.uniform();
    compare(chained_bound(kUnit, circle_mi_series(eps, kCircleLevels), ChainVariant::Expectation, kCircleTailTol),
            chained_bound(kUnit, circle_log_cardinality_series(kCircleLevels), ChainVariant::Expectation,
                          kCircleTailTol));
  }

  // Finite processes: I([W]_k; orthant) against log of the level-k cell count.
  for (const auto& inst : finite_instances()) {
    const auto space = inst.spec.metric();
    const int k0 = base_scale_index(space);
    const int k1 = k0 + 45;
    const auto h = build_dyadic_hierarchy(space, k0, k1);
    const std::size_t rows = inst.rule.table.size();
    LevelSeries mi_series;
    LevelSeries card_series;
    mi_series.k_start = card_series.k_start = k0;
    for (int k = k0; k <= k1; ++k) {
      const auto& lvl = h.level(k);
      Matrix joint(lvl.cell_count(), std::vector<double>(rows, 0.0));
      for (std::size_t q = 0; q < rows; ++q) {
        for (std::size_t t = 0; t < space.size(); ++t) {
          joint[lvl.cell_of[t]][q] += inst.rule.table[q][t] / static_cast<double>(rows);
        }
      }
      mi_series.values.push_back(mutual_information(JointDistribution(joint, 1e-9)));
      card_series.values.push_back(std::log(static_cast<double>(lvl.cell_count())));
    }
    mi_series.cap = TailCap::constant(mi_series.values.back());
    card_series.cap = TailCap::constant(card_series.values.back());
    const auto env = PsiEnvelope::subgaussian(inst.spec.variance_proxy());
    compare(chained_bound(env, mi_series, ChainVariant::Expectation, 1e-6),
            chained_bound(env, card_series, ChainVariant::Expectation, 1e-6));
  }
  o.check(level_violations == 0,
          "chained(I_k) <= chained(log|P_k|) level-wise on " + std::to_string(instances) + " instances, " +
              std::to_string(level_violations) + " violations");

  // Small subset at alpha = 1 reduces to the T1 Dudley sum.
  const auto circle = equispaced_circle(64);
  std::vector<std::size_t> t1{0, 1, 2, 3, 4};
  std::vector<std::size_t> t2;
  for (std::size_t i = 5; i < 64; ++i) t2.push_back(i);
  auto covering_levels = [](const FiniteMetricSpace& s) {
    LevelSeries out;
    out.k_start = 0;
    for (int k = 0; k <= 40; ++k) {
      out.values.push_back(std::log(static_cast<double>(covering_number(s, std::ldexp(1.0, -k), CoverMode::Greedy))));
    }
    out.cap = TailCap::constant(std::log(static_cast<double>(s.size())));
    return out;
  };
  const auto s1 = covering_levels(circle.subspace(t1));
  const auto s2 = covering_levels(circle.subspace(t2));
  const double ss = small_subset_bound(1.0, s1, s2, 1e-9).bound_value;
  const double dd = dudley_bound(s1, 1e-9).bound_value;
  o.check(std::abs(ss - dd) <= 1e-12, fmt("small subset(alpha=1) %.12f vs Dudley(T1) %.12f", ss, dd));
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"C1 chaining constant 19.0352", chaining_constant},
      {"C2 CMI bound row", cmi_row},
      {"C3 E[X_W] row (analytic 5e-5, MC 3 stderr)", bias_row},
      {"C4 MI bound is +inf on the circle", mi_divergence},
      {"C5 E[sup X] = 1.2533 by MC", sup_oracle},
      {"C6 bound validity (circle + 20 finite processes)", bound_validity},
      {"C7 refinement data processing", refinement_dpi},
      {"C8 Legendre dual inverse and DV gap", legendre},
      {"C9 learning adapter oracle", learning_oracle},
      {"C10 ordering and small-subset endpoint", ordering},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s\n", o.pass ? "PASS" : "FAIL", c.name);
    for (const auto& n : o.notes) std::printf("%s\n", n.c_str());
    if (o.elided > 0) std::printf("  ok   ... %zu further checks passed\n", o.elided);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
