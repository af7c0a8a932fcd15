// Seeded Monte-Carlo runs of a process under a selection rule: per-sample
// statistic values plus a summary with optional bound comparisons.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "chainmi/bound_engine.hpp"
#include "chainmi/process_lab.hpp"
#include "commands.hpp"

namespace chainmi::cli {

namespace {

constexpr std::size_t kMaxOrthantDim = 16;

std::string g(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CanonicalProcessSpec load_process(const Json& j) {
  reject_unknown(j, {"identity", "points", "circle"}, "process");
  if (j.size() != 1) throw ConfigError("process: give exactly one of identity, points, circle");
  if (j.contains("identity")) {
    const std::size_t n = count(j["identity"], "process.identity");
    if (n == 0) throw ConfigError("process.identity: need at least one index");
    return CanonicalProcessSpec::identity(n);
  }
  if (j.contains("points")) return CanonicalProcessSpec::from_points(matrix_of(j["points"], "process.points"));
  if (!j["circle"].is_boolean() || !j["circle"].get<bool>()) throw ConfigError("process.circle: expected true");
  return CanonicalProcessSpec::unit_circle();
}

struct Selector {
  std::string kind;
  SelectionRule rule;
  double epsilon = 1.0;
};

Selector load_selector(const Json& j, const CanonicalProcessSpec& spec) {
  const std::string kind = string_of(require(j, "kind", "selector"), "selector.kind");
  const bool circle = spec.kind() == CanonicalProcessSpec::Kind::UnitCircle;
  Selector out{kind, SelectionRule::argmax(), 1.0};
  if (kind == "argmax") {
    reject_unknown(j, {"kind"}, "selector");
  } else if (kind == "noisy_circle") {
    reject_unknown(j, {"kind", "epsilon"}, "selector");
    if (!circle) throw ConfigError("selector noisy_circle: needs the circle process");
    out.epsilon = extended_number(require(j, "epsilon", "selector"), "selector.epsilon");
    if (!(out.epsilon >= 0.0 && out.epsilon <= 1.0)) throw ConfigError("selector.epsilon: must lie in [0, 1]");
    out.rule = SelectionRule::noisy_circle_argmax(out.epsilon);
  } else if (kind == "two_block") {
    reject_unknown(j, {"kind", "m", "delta"}, "selector");
    const std::size_t m = count(require(j, "m", "selector"), "selector.m");
    const double delta = number(require(j, "delta", "selector"), "selector.delta");
    if (circle || m == 0 || m >= spec.index_count()) {
      throw ConfigError("selector two_block: needs a finite process and 0 < m < |T|");
    }
    if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("selector.delta: must lie in [0, 1]");
    out.rule = SelectionRule::two_block(m, delta);
  } else if (kind == "independent" || kind == "custom") {
    if (circle) throw ConfigError("selector " + kind + ": needs a finite process");
    if (spec.dim() > kMaxOrthantDim) {
      throw ConfigError("selector " + kind + ": orthant tables need dimension <= " + std::to_string(kMaxOrthantDim));
    }
    if (kind == "independent") {
      reject_unknown(j, {"kind"}, "selector");
      out.rule = SelectionRule::independent(spec.dim(), spec.index_count());
    } else {
      reject_unknown(j, {"kind", "table"}, "selector");
      Matrix table = matrix_of(require(j, "table", "selector"), "selector.table");
      if (table.size() != (std::size_t{1} << spec.dim())) {
        throw ConfigError("selector.table: need 2^dim = " + std::to_string(std::size_t{1} << spec.dim()) + " rows");
      }
      for (const auto& row : table) {
        if (row.size() != spec.index_count()) throw ConfigError("selector.table: each row needs |T| entries");
      }
      out.rule = SelectionRule::custom(std::move(table));
    }
  } else {
    throw ConfigError("selector.kind: expected argmax, noisy_circle, two_block, independent or custom");
  }
  return out;
}

// I(W; X) or an upper bound on it, for the selected index itself.
double selection_information(const Selector& sel, const CanonicalProcessSpec& spec) {
  switch (sel.rule.kind) {
    case SelectionRule::Kind::NoisyCircleArgmax:
      return circle_total_mi(sel.epsilon);
    case SelectionRule::Kind::TwoBlock:
      return two_block_mi_cap(spec.index_count(), sel.rule.block_size, sel.rule.delta);
    case SelectionRule::Kind::Custom:
      return custom_rule_mi(sel.rule, spec.dim());
    case SelectionRule::Kind::Argmax:
      break;
  }
  if (spec.kind() == CanonicalProcessSpec::Kind::UnitCircle) return std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(spec.index_count()));
}

}  // namespace

int run_simulate(const Settings& s) {
  const Json& c = s.config;
  reject_unknown(c, {"seed", "samples", "tol", "kmax", "out", "format", "process", "selector", "statistic", "compare"},
                 "config");
  const auto spec = load_process(require(c, "process", "config"));
  const bool circle = spec.kind() == CanonicalProcessSpec::Kind::UnitCircle;
  const Selector sel =
      c.contains("selector") ? load_selector(c["selector"], spec) : Selector{"argmax", SelectionRule::argmax(), 1.0};
  const double sigma2 = circle ? 1.0 : spec.variance_proxy();
  if (!(sigma2 > 0.0)) throw ConfigError("process: every index is the origin, nothing to simulate");
  const auto env = PsiEnvelope::subgaussian(sigma2);

  // Statistic, with thresholds derived from the tail bounds when only u is given.
  const Json st = c.contains("statistic") ? c["statistic"] : Json{{"kind", "selected_mean"}};
  reject_unknown(st, {"kind", "threshold", "u", "level", "mi"}, "statistic");
  const std::string stat_kind = string_of(require(st, "kind", "statistic"), "statistic.kind");
  std::optional<int> level;
  if (st.contains("level")) {
    if (!circle || !st["level"].is_number_integer() || st["level"].get<int>() < -1) {
      throw ConfigError("statistic.level: an integer >= -1, circle process only");
    }
    level = st["level"].get<int>();
  }
  double info = selection_information(sel, spec);
  if (level) info = circle_mi_level(sel.epsilon, *level);
  if (st.contains("mi")) info = extended_number(st["mi"], "statistic.mi");
  const std::size_t cardinality = level ? std::size_t{1} << (*level + 2) : spec.index_count();

  Statistic statistic;
  std::optional<TailBound> tail;
  if (stat_kind == "selected_mean") {
    statistic = Statistic::selected_mean();
  } else if (stat_kind == "sup_mean") {
    statistic = Statistic::sup_mean();
  } else if (stat_kind == "tail_freq" || stat_kind == "sup_tail_freq") {
    const bool sup = stat_kind == "sup_tail_freq";
    if (st.contains("u")) {
      const double u = number(st["u"], "statistic.u");
      if (sup && circle) throw ConfigError("statistic: the circle supremum tail needs an explicit threshold");
      if (!sup && cardinality == 0) throw ConfigError("statistic: the circle selected tail needs a level");
      tail = sup ? tail_bound_sup(env, cardinality, u) : tail_bound_selected(env, info, cardinality, u);
    }
    double threshold = 0.0;
    if (st.contains("threshold")) {
      threshold = number(st["threshold"], "statistic.threshold");
    } else if (tail) {
      threshold = tail->additive_threshold && !sup ? *tail->additive_threshold : tail->threshold;
    } else {
      throw ConfigError("statistic: tail frequencies need a threshold or u");
    }
    if (tail && threshold + 1e-12 < tail->threshold) {
      throw ConfigError("statistic.threshold: below the tail bound's threshold, the bound does not apply");
    }
    statistic = sup ? Statistic::sup_tail_freq(threshold) : Statistic::tail_freq(threshold, level);
  } else {
    throw ConfigError("statistic.kind: expected selected_mean, sup_mean, tail_freq or sup_tail_freq");
  }

  const Json compare = c.contains("compare") ? c["compare"] : Json::array();
  if (!compare.is_array()) throw ConfigError("compare: expected an array");
  for (std::size_t i = 0; i < compare.size(); ++i) {
    const std::string where = "compare[" + std::to_string(i) + "]";
    const std::string kind = string_of(require(compare[i], "kind", where), where + ".kind");
    const bool mean_stat = stat_kind == "selected_mean" || stat_kind == "sup_mean";
    if ((kind == "two_block_cap" || kind == "mi_bound" || kind == "chained_bound") && stat_kind != "selected_mean") {
      throw ConfigError(where + ": " + kind + " compares the selected mean");
    }
    if (kind == "two_block_cap" && sel.rule.kind != SelectionRule::Kind::TwoBlock) {
      throw ConfigError(where + ": two_block_cap needs the two_block selector");
    }
    if (kind == "chained_bound" && sel.rule.kind != SelectionRule::Kind::NoisyCircleArgmax) {
      throw ConfigError(where + ": chained_bound needs the noisy_circle selector");
    }
    if (kind == "tail_bound" && !tail) throw ConfigError(where + ": tail_bound needs a tail statistic with u");
    if (kind == "zero_mean" && !mean_stat) throw ConfigError(where + ": zero_mean compares a mean");
    if (kind != "two_block_cap" && kind != "mi_bound" && kind != "chained_bound" && kind != "tail_bound" &&
        kind != "zero_mean" && kind != "reference") {
      throw ConfigError(where + ".kind: unknown comparison '" + kind + "'");
    }
  }

  const auto values = mc_values(spec, sel.rule, statistic, s.samples, s.seed);
  const auto est = summarize(values);
  const double slack = 3.0 * est.std_error;

  Checks checks;
  Json comparisons = Json::array();
  auto record = [&](const std::string& kind, const std::string& relation, double reference, bool ok) {
    comparisons.push_back({{"kind", kind}, {"relation", relation}, {"reference", num(reference)},
                           {"estimate", est.estimate}, {"std_error", est.std_error}, {"pass", ok}});
    checks.add(kind, ok, g(est.estimate) + " +- " + g(est.std_error) + " " + relation + " " + g(reference));
  };
  for (const auto& cmp : compare) {
    const std::string kind = cmp["kind"].get<std::string>();
    if (kind == "two_block_cap") {
      const double cap = two_block_mi_cap(spec.index_count(), sel.rule.block_size, sel.rule.delta);
      record(kind, "<=", std::sqrt(2.0 * sigma2 * cap), est.estimate <= std::sqrt(2.0 * sigma2 * cap) + slack);
    } else if (kind == "zero_mean") {
      record(kind, "~=", 0.0, std::abs(est.estimate) <= slack);
    } else if (kind == "tail_bound") {
      record(kind, "<=", tail->probability, est.estimate <= tail->probability + slack);
    } else if (kind == "mi_bound") {
      const double b = mi_bound(env, info, MiVariant::Expectation);
      record(kind, "<=", b, est.estimate <= b + slack);
    } else if (kind == "chained_bound") {
      if (s.kmax < 0) throw ConfigError("kmax: the circle series needs kmax >= 0");
      const double b =
          chained_bound(env, circle_mi_series(sel.epsilon, s.kmax), ChainVariant::Expectation, s.tol).bound_value;
      record(kind, "<=", b, est.estimate <= b + slack);
    } else {
      double value = 0.0;
      if (cmp.contains("value")) {
        value = number(cmp["value"], "compare.value");
      } else if (circle && stat_kind == "selected_mean") {
        value = circle_reference(sel.epsilon).true_bias;
      } else if (circle && stat_kind == "sup_mean") {
        value = circle_reference(sel.epsilon).sup_mean;
      } else {
        throw ConfigError("compare reference: needs a value for this process");
      }
      record(kind, "~=", value, std::abs(est.estimate - value) <= slack);
    }
  }

  Json summary;
  summary["command"] = "simulate";
  summary["seed"] = s.seed;
  summary["samples"] = s.samples;
  summary["process"] = c["process"];
  summary["selector"] = sel.kind;
  summary["statistic"] = stat_kind;
  if (statistic.kind == Statistic::Kind::TailFreq || statistic.kind == Statistic::Kind::SupTailFreq) {
    summary["threshold"] = statistic.threshold;
  }
  if (level) summary["level"] = *level;
  summary["information"] = num(info);
  summary["estimate"] = est.estimate;
  summary["std_error"] = est.std_error;
  summary["comparisons"] = std::move(comparisons);
  summary["pass"] = checks.pass;

  std::ostringstream os;
  os << "sample_id,statistic,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) os << i << ',' << stat_kind << ',' << format_double(values[i]) << '\n';

  Output out(s);
  if (out.to_stdout()) {
    out.write("summary.json", dump(summary));
  } else {
    out.write("samples.csv", os.str());
    out.write("summary.json", dump(summary));
  }
  for (const auto& chk : checks.list) {
    std::cerr << (chk["pass"].get<bool>() ? "ok   " : "FAIL ") << chk["name"].get<std::string>() << ": "
              << chk["detail"].get<std::string>() << '\n';
  }
  return checks.pass ? kExitOk : kExitValidation;
}

}  // namespace chainmi::cli
