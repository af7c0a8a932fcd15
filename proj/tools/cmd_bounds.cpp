// Evaluates a list of bounds over one metric space and envelope and writes one
// report per bound. Bounds with an in-run oracle also record a check.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>

#include "chainmi/bound_engine.hpp"
#include "chainmi/csv.hpp"
#include "chainmi/error.hpp"
#include "chainmi/learning.hpp"
#include "chainmi/process_lab.hpp"
#include "commands.hpp"

namespace chainmi::cli {

namespace {

std::string g(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Matrix matrix_or_csv(const Json& j, const Settings& s, const std::string& where) {
  if (j.is_object()) {
    reject_unknown(j, {"csv"}, where);
    return read_numeric_csv_file((s.config_dir / string_of(require(j, "csv", where), where + ".csv")).string());
  }
  return matrix_of(j, where);
}

FiniteMetricSpace load_space(const Json& j, const Settings& s) {
  reject_unknown(j, {"csv", "distances", "points", "circle"}, "space");
  if (j.size() != 1) throw ConfigError("space: give exactly one of csv, distances, points, circle");
  if (j.contains("csv")) {
    return validate_metric(read_numeric_csv_file((s.config_dir / string_of(j["csv"], "space.csv")).string()));
  }
  if (j.contains("distances")) return validate_metric(matrix_of(j["distances"], "space.distances"));
  if (j.contains("points")) return FiniteMetricSpace::from_points(matrix_of(j["points"], "space.points"));
  const std::size_t n = count(j["circle"], "space.circle");
  if (n == 0) throw ConfigError("space.circle: need at least one point");
  return equispaced_circle(n);
}

PsiEnvelope load_envelope(const Json& c) {
  if (!c.contains("envelope")) return PsiEnvelope::subgaussian(1.0);
  const Json& j = c["envelope"];
  reject_unknown(j, {"subgaussian", "grid"}, "envelope");
  if (j.size() != 1) throw ConfigError("envelope: give exactly one of subgaussian, grid");
  if (j.contains("subgaussian")) {
    const double s2 = number(j["subgaussian"], "envelope.subgaussian");
    if (!(s2 > 0.0)) throw ConfigError("envelope.subgaussian: variance proxy must be positive");
    return PsiEnvelope::subgaussian(s2);
  }
  const Json& grid = j["grid"];
  reject_unknown(grid, {"knots", "lambda_max"}, "envelope.grid");
  std::vector<std::pair<double, double>> knots;
  for (const auto& row : matrix_of(require(grid, "knots", "envelope.grid"), "envelope.grid.knots")) {
    if (row.size() != 2) throw ConfigError("envelope.grid.knots: each knot is [lambda, psi]");
    knots.emplace_back(row[0], row[1]);
  }
  return PsiEnvelope::from_grid(std::move(knots), number_or(grid, "lambda_max", kDefaultLambdaMax, "envelope.grid"));
}

LevelSeries load_series(const Json& j, const std::string& where) {
  reject_unknown(j, {"k_start", "values", "tail"}, where);
  LevelSeries series;
  const Json& k = require(j, "k_start", where);
  if (!k.is_number_integer()) throw ConfigError(where + ".k_start: expected an integer");
  series.k_start = k.get<int>();
  series.values = vector_of(require(j, "values", where), where + ".values");
  if (j.contains("tail")) {
    const Json& t = j["tail"];
    if (t.is_string() && t.get<std::string>() == "zero") {
      series.tail_mode = TailMode::ZeroAfterLast;
    } else {
      reject_unknown(t, {"constant", "linear", "log_cardinality"}, where + ".tail");
      if (t.size() != 1) throw ConfigError(where + ".tail: give exactly one cap");
      if (t.contains("constant")) {
        series.cap = TailCap::constant(number(t["constant"], where + ".tail.constant"));
      } else {
        const auto p = vector_of(t.contains("linear") ? t["linear"] : t["log_cardinality"], where + ".tail");
        if (p.size() != 2) throw ConfigError(where + ".tail: expected two numbers");
        series.cap = t.contains("linear") ? TailCap{TailCap::Kind::Linear, p[0], p[1]}
                                          : TailCap::log_cardinality(p[0], p[1]);
      }
    }
  }
  return series;
}

std::size_t cardinality_for(const Json& b, const std::optional<FiniteMetricSpace>& space, const std::string& where) {
  if (b.contains("cardinality")) {
    const std::size_t n = count(b["cardinality"], where + ".cardinality");
    if (n == 0) throw ConfigError(where + ".cardinality: must be >= 1");
    return n;
  }
  if (!space) throw ConfigError(where + ": needs a space or an explicit cardinality");
  return space->size();
}

const FiniteMetricSpace& need_space(const std::optional<FiniteMetricSpace>& space, const std::string& where) {
  if (!space) throw ConfigError(where + ": needs a space");
  return *space;
}

CoverMode cover_mode(const Json& b, const std::string& where) {
  if (!b.contains("cover")) return CoverMode::Greedy;
  const std::string m = string_of(b["cover"], where + ".cover");
  if (m == "greedy") return CoverMode::Greedy;
  if (m == "exact") return CoverMode::Exact;
  throw ConfigError(where + ".cover: expected greedy or exact");
}

BoundReport scalar_report(const std::string& id, const std::string& theorem, double value) {
  BoundReport r;
  r.formula_id = id;
  r.theorem = theorem;
  r.bound_value = value;
  r.infinite = std::isinf(value);
  return r;
}

LearningKernel load_kernel(const Json& j, const Matrix& loss, std::size_t examples, std::size_t n,
                           const Settings& s, const std::string& where) {
  const std::string kind = string_of(require(j, "kind", where), where + ".kind");
  if (kind == "erm") {
    reject_unknown(j, {"kind"}, where);
    return erm_kernel(loss);
  }
  if (kind == "gibbs") {
    reject_unknown(j, {"kind", "beta"}, where);
    const double beta = number(require(j, "beta", where), where + ".beta");
    if (!(beta >= 0.0)) throw ConfigError(where + ".beta: must be >= 0");
    return gibbs_kernel(loss, beta);
  }
  if (kind == "constant") {
    reject_unknown(j, {"kind", "probs"}, where);
    return constant_kernel(vector_of(require(j, "probs", where), where + ".probs"));
  }
  if (kind == "table") {
    reject_unknown(j, {"kind", "rows"}, where);
    return table_kernel(matrix_or_csv(require(j, "rows", where), s, where + ".rows"), examples, n);
  }
  throw ConfigError(where + ".kind: expected erm, gibbs, constant or table");
}

// One bound; returns the report JSON and records checks.
Json evaluate(const Json& b, std::size_t index, const Settings& s, const std::optional<FiniteMetricSpace>& space,
              std::optional<int> k_min_override, const PsiEnvelope& env, Checks& checks, BoundReport& report) {
  const std::string where = "bounds[" + std::to_string(index) + "]";
  const std::string kind = string_of(require(b, "kind", where), where + ".kind");
  Json details = Json::object();

  auto k_min_of = [&](const FiniteMetricSpace& sp) {
    const int base = base_scale_index(sp);
    if (!k_min_override) return base;
    if (*k_min_override > base) {
      throw ConfigError("k_min: " + std::to_string(*k_min_override) + " is above the coarsest admissible level " +
                        std::to_string(base));
    }
    return *k_min_override;
  };

  if (kind == "maximal") {
    reject_unknown(b, {"kind", "absolute", "cardinality"}, where);
    const bool absolute = b.contains("absolute") && b["absolute"].get<bool>();
    const std::size_t n = cardinality_for(b, space, where);
    report = scalar_report(absolute ? "maximal-abs" : "maximal", "maximal inequality", maximal_bound(env, n, absolute));
    details["cardinality"] = n;
  } else if (kind == "mi") {
    reject_unknown(b, {"kind", "mi", "variant"}, where);
    const double mi = extended_number(require(b, "mi", where), where + ".mi");
    const std::string v = b.contains("variant") ? string_of(b["variant"], where + ".variant") : "expectation";
    MiVariant variant;
    if (v == "expectation") {
      variant = MiVariant::Expectation;
    } else if (v == "absolute-expectation") {
      variant = MiVariant::AbsoluteExpectation;
    } else if (v == "expected-absolute") {
      variant = MiVariant::ExpectedAbsolute;
    } else {
      throw ConfigError(where + ".variant: expected expectation, absolute-expectation or expected-absolute");
    }
    report = scalar_report("mi-" + v, "mutual information bound", mi_bound(env, mi, variant));
    details["mi"] = num(mi);
  } else if (kind == "dudley") {
    reject_unknown(b, {"kind", "cover", "oracle"}, where);
    const auto& sp = need_space(space, where);
    const int k_min = k_min_of(sp);
    report = dudley_bound(log_covering_series(sp, k_min, s.tol, cover_mode(b, where)), s.tol);
    details["k_min"] = k_min;
    const bool oracle = !b.contains("oracle") || b["oracle"].get<bool>();
    if (oracle && sp.has_coordinates()) {
      const auto mc = mc_estimate(CanonicalProcessSpec::from_points(sp.coordinates()), SelectionRule::argmax(),
                                  Statistic::sup_mean(), s.samples, derive_seed(s.seed, index));
      details["sup_mean_estimate"] = mc.estimate;
      details["sup_mean_stderr"] = mc.std_error;
      checks.add(where + " dudley >= MC sup mean", report.bound_value + 3.0 * mc.std_error >= mc.estimate,
                 g(report.bound_value) + " vs " + g(mc.estimate) + " +- " + g(mc.std_error));
    }
  } else if (kind == "chained") {
    reject_unknown(b, {"kind", "variant", "series", "circle_epsilon"}, where);
    const std::string v = b.contains("variant") ? string_of(b["variant"], where + ".variant") : "expectation";
    if (v != "expectation" && v != "absolute") throw ConfigError(where + ".variant: expected expectation or absolute");
    LevelSeries series;
    if (b.contains("circle_epsilon") == b.contains("series")) {
      throw ConfigError(where + ": give exactly one of series, circle_epsilon");
    }
    if (b.contains("series")) {
      series = load_series(b["series"], where + ".series");
    } else {
      if (s.kmax < 0) throw ConfigError("kmax: the circle series needs kmax >= 0");
      const double eps = extended_number(b["circle_epsilon"], where + ".circle_epsilon");
      series = circle_mi_series(eps, s.kmax);
      details["circle_epsilon"] = eps;
    }
    report = chained_bound(env, series, v == "absolute" ? ChainVariant::Absolute : ChainVariant::Expectation, s.tol);
  } else if (kind == "small-subset") {
    reject_unknown(b, {"kind", "alpha", "subset", "cover"}, where);
    const auto& sp = need_space(space, where);
    const double alpha = number(require(b, "alpha", where), where + ".alpha");
    std::vector<bool> in_small(sp.size(), false);
    std::vector<std::size_t> small;
    for (const auto& id : require(b, "subset", where)) {
      const std::size_t i = count(id, where + ".subset");
      if (i >= sp.size() || in_small[i]) throw ConfigError(where + ".subset: bad or repeated id " + std::to_string(i));
      in_small[i] = true;
      small.push_back(i);
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < sp.size(); ++i) {
      if (!in_small[i]) rest.push_back(i);
    }
    if (small.empty() || rest.empty()) throw ConfigError(where + ".subset: both parts must be nonempty");
    const auto mode = cover_mode(b, where);
    const int k_min = k_min_of(sp);
    const auto s1 = sp.subspace(small);
    const auto s2 = sp.subspace(rest);
    // Same levels for both parts; stop once the tail under log|T| + log 2 is small.
    const double cap = std::log(static_cast<double>(std::max(small.size(), rest.size())));
    LevelSeries c1, c2;
    c1.k_start = c2.k_start = k_min;
    c1.cap = TailCap::constant(std::log(static_cast<double>(small.size())));
    c2.cap = TailCap::constant(std::log(static_cast<double>(rest.size())));
    for (int k = k_min;; ++k) {
      const double scale = std::ldexp(1.0, -k);
      c1.values.push_back(std::log(static_cast<double>(covering_number(s1, scale, mode))));
      c2.values.push_back(std::log(static_cast<double>(covering_number(s2, scale, mode))));
      if (kDudleyConstant * scale * std::sqrt(cap + std::log(2.0)) <= 0.5 * s.tol) break;
    }
    report = small_subset_bound(alpha, c1, c2, s.tol);
    details["alpha"] = alpha;
    details["k_min"] = k_min;
  } else if (kind == "lipschitz") {
    reject_unknown(b, {"kind", "expected_lipschitz", "candidates"}, where);
    const double lip = number(require(b, "expected_lipschitz", where), where + ".expected_lipschitz");
    std::vector<LipschitzCandidate> candidates;
    for (const auto& row : matrix_of(require(b, "candidates", where), where + ".candidates")) {
      if (row.size() != 2) throw ConfigError(where + ".candidates: each candidate is [scale, mi]");
      candidates.push_back({row[0], row[1]});
    }
    const auto r = lipschitz_net_bound(lip, env, candidates);
    report = scalar_report("lipschitz-net", "Lipschitz epsilon-net bound", r.bound);
    details["best_scale"] = r.best_scale;
    Json values = Json::array();
    for (double v : r.candidate_values) values.push_back(v);
    details["candidate_values"] = std::move(values);
  } else if (kind == "tail") {
    reject_unknown(b, {"kind", "mode", "u", "mi", "cardinality"}, where);
    const std::string mode = string_of(require(b, "mode", where), where + ".mode");
    const double u = number(require(b, "u", where), where + ".u");
    const std::size_t n = cardinality_for(b, space, where);
    TailBound t;
    if (mode == "sup") {
      t = tail_bound_sup(env, n, u);
    } else if (mode == "selected") {
      t = tail_bound_selected(env, extended_number(require(b, "mi", where), where + ".mi"), n, u);
      details["variational_branch"] = t.variational_branch;
    } else {
      throw ConfigError(where + ".mode: expected sup or selected");
    }
    report = scalar_report("tail-" + mode, mode == "sup" ? "maximal tail bound" : "selected-index tail bound",
                           t.probability);
    details["threshold"] = t.threshold;
    details["union_branch"] = t.union_branch;
    if (t.additive_threshold) details["additive_threshold"] = *t.additive_threshold;
  } else if (kind == "learning") {
    reject_unknown(b, {"kind", "example_probs", "loss", "sample_size", "kernel", "enumeration_cap"}, where);
    LearningProblem p;
    p.example_probs = vector_of(require(b, "example_probs", where), where + ".example_probs");
    p.loss = matrix_or_csv(require(b, "loss", where), s, where + ".loss");
    p.sample_size = count(require(b, "sample_size", where), where + ".sample_size");
    p.kernel = load_kernel(require(b, "kernel", where), p.loss, p.examples(), p.sample_size, s, where + ".kernel");
    p.validate();
    const std::size_t cap =
        b.contains("enumeration_cap") ? count(b["enumeration_cap"], where + ".enumeration_cap") : kDefaultEnumerationCap;
    const auto r = learning_adapter(p, s.kmax, s.samples, derive_seed(s.seed, 2 * index), s.tol, cap);
    report = r.bound_a;
    details["gen"] = r.gen;
    details["gen_abs"] = r.gen_abs;
    details["gen_stderr"] = r.gen_std_error;
    details["enumerated"] = r.enumerated;
    details["enumeration_cap_exceeded"] = r.enumeration_cap_exceeded;
    details["degenerate"] = r.degenerate;
    details["mi_total"] = r.mi_total;
    details["k_min"] = r.k_min;
    details["k_separated"] = r.k_separated;
    if (r.bound_b) {
      details["bound_b"] = to_json(*r.bound_b);
    } else {
      details["bound_b_skipped"] = r.bound_b_skipped_reason;
    }
    checks.add(where + " gen <= chained bound", r.gen <= r.bound_a.bound_value + 3.0 * r.gen_std_error + 1e-12,
               g(r.gen) + " vs " + g(r.bound_a.bound_value));
    if (r.bound_b) {
      checks.add(where + " E|gen| <= absolute chained bound",
                 r.gen_abs <= r.bound_b->bound_value + 3.0 * r.gen_std_error + 1e-12,
                 g(r.gen_abs) + " vs " + g(r.bound_b->bound_value));
    }
    const auto mc = learning_gen_mc(p, s.samples, derive_seed(s.seed, 2 * index + 1));
    details["gen_mc"] = mc.estimate;
    details["gen_mc_stderr"] = mc.std_error;
    const double se = std::hypot(mc.std_error, r.gen_std_error);
    checks.add(where + " gen matches Monte-Carlo draw of (S, W)", std::abs(mc.estimate - r.gen) <= 3.0 * se + 1e-12,
               g(r.gen) + " vs " + g(mc.estimate) + " +- " + g(mc.std_error));
  } else {
    throw ConfigError(where + ".kind: unknown bound '" + kind + "'");
  }

  Json j = to_json(report);
  j["kind"] = kind;
  j["details"] = std::move(details);
  return j;
}

}  // namespace

int run_bounds(const Settings& s) {
  const Json& c = s.config;
  reject_unknown(c, {"seed", "samples", "tol", "kmax", "out", "format", "space", "envelope", "k_min", "bounds"},
                 "config");
  std::optional<FiniteMetricSpace> space;
  if (c.contains("space")) space = load_space(c["space"], s);
  std::optional<int> k_min;
  if (c.contains("k_min")) {
    if (!c["k_min"].is_number_integer()) throw ConfigError("k_min: expected an integer");
    k_min = c["k_min"].get<int>();
  }
  const PsiEnvelope env = load_envelope(c);
  const Json& bounds = require(c, "bounds", "config");
  if (!bounds.is_array() || bounds.empty()) throw ConfigError("bounds: expected a nonempty array");

  // Validate every block before any computation starts.
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!bounds[i].is_object()) throw ConfigError("bounds[" + std::to_string(i) + "]: expected an object");
    string_of(require(bounds[i], "kind", "bounds[" + std::to_string(i) + "]"), "kind");
  }

  Checks checks;
  std::vector<std::pair<std::string, std::string>> files;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    BoundReport report;
    Json j;
    try {
      j = evaluate(bounds[i], i, s, space, k_min, env, checks, report);
    } catch (const Error& e) {
      throw ConfigError("bounds[" + std::to_string(i) + "]: " + e.what());
    }
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%02zu_", i + 1);
    const std::string stem = prefix + j["kind"].get<std::string>();
    files.emplace_back(stem + "." + s.format, s.format == "csv" ? to_csv(report) : dump(j));
  }

  Output out(s);
  for (const auto& [name, content] : files) out.write(name, content);
  if (!out.to_stdout()) {
    Json summary;
    summary["command"] = "bounds";
    summary["seed"] = s.seed;
    summary["samples"] = s.samples;
    Json names = Json::array();
    for (const auto& f : files) names.push_back(f.first);
    summary["reports"] = std::move(names);
    summary["checks"] = checks.list;
    summary["pass"] = checks.pass;
    out.write("summary.json", dump(summary));
  }
  for (const auto& chk : checks.list) {
    std::cerr << (chk["pass"].get<bool>() ? "ok   " : "FAIL ") << chk["name"].get<std::string>() << ": "
              << chk["detail"].get<std::string>() << '\n';
  }
  return checks.pass ? kExitOk : kExitValidation;
}

}  // namespace chainmi::cli
