// Noisy argmax on the unit circle: bounds on E[X_W] against the exact bias
// and a Monte-Carlo estimate, with golden checks against reference values.
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "chainmi/bound_engine.hpp"
#include "chainmi/process_lab.hpp"
#include "commands.hpp"

namespace chainmi::cli {

namespace {

struct GoldenRow {
  double epsilon;
  double cmi;
  double bias;
};

// Reference values, cut (not rounded) to 4 decimals.
const std::vector<GoldenRow> kGolden{
    {1.0 / 20, 1.1013, 0.0626}, {1.0 / 30, 0.7507, 0.0417}, {1.0 / 40, 0.5709, 0.0313},
    {1.0 / 50, 0.4612, 0.0250}, {1.0 / 100, 0.2364, 0.0125}, {1.0 / 200, 0.1204, 0.0062},
    {1.0 / 400, 0.0610, 0.0031},
};
const std::vector<std::string> kDefaultEpsilons{"1/20", "1/30", "1/40", "1/50", "1/100", "1/200", "1/400"};
constexpr double kChainingGolden = 19.0352;
constexpr double kSupMeanGolden = 1.2533;

struct Tolerances {
  double cmi = 1e-3;
  double chaining = 5e-3;
  double bias = 1e-4;
  double mc_stderrs = 3.0;
};

std::string g(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string cell(double v, int decimals) {
  if (std::isinf(v)) return "∞";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

struct Row {
  std::string label;
  double epsilon = 0.0;
  double mi_bound = 0.0;
  double cmi_bound = 0.0;
  double cmi_levels = 0.0;  // bound without the declared tail remainder
  double analytic = 0.0;
  McEstimate mc;
};

std::string text_table(const std::vector<Row>& rows, double chaining) {
  std::vector<std::vector<std::string>> lines{{"epsilon"}, {"MI bound"}, {"chaining bound"}, {"CMI bound"},
                                              {"E[X_W] analytic"}, {"E[X_W] Monte-Carlo"}};
  for (const auto& r : rows) {
    lines[0].push_back(r.label);
    lines[1].push_back(cell(r.mi_bound, 4));
    lines[2].push_back(cell(chaining, 4));
    lines[3].push_back(cell(r.cmi_bound, 4));
    lines[4].push_back(cell(r.analytic, 4));
    lines[5].push_back(cell(r.mc.estimate, 4) + " ± " + cell(r.mc.std_error, 4));
  }
  // Column widths count code points so the multibyte symbols line up.
  auto width = [](const std::string& s) {
    std::size_t w = 0;
    for (unsigned char c : s) w += (c & 0xC0) != 0x80;
    return w;
  };
  std::vector<std::size_t> widths(lines[0].size(), 0);
  for (const auto& line : lines) {
    for (std::size_t c = 0; c < line.size(); ++c) widths[c] = std::max(widths[c], width(line[c]));
  }
  std::ostringstream os;
  for (const auto& line : lines) {
    for (std::size_t c = 0; c < line.size(); ++c) {
      const std::string pad(widths[c] - width(line[c]), ' ');
      os << (c == 0 ? line[c] + pad : "  " + pad + line[c]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace

int run_example1(const Settings& s, const std::vector<std::string>& epsilon_flags) {
  const Json& c = s.config;
  reject_unknown(c, {"seed", "samples", "tol", "kmax", "out", "format", "epsilons", "tolerances"}, "config");

  std::vector<std::pair<std::string, double>> epsilons;
  auto add_epsilon = [&](const Json& j, const std::string& where) {
    const double eps = extended_number(j, where);
    if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError(where + ": epsilon must lie in [0, 1]");
    epsilons.emplace_back(j.is_string() ? j.get<std::string>() : format_double(eps), eps);
  };
  if (!epsilon_flags.empty()) {
    for (std::size_t i = 0; i < epsilon_flags.size(); ++i) add_epsilon(Json(epsilon_flags[i]), "--epsilons");
  } else if (c.contains("epsilons")) {
    const Json& list = c["epsilons"];
    if (!list.is_array() || list.empty()) throw ConfigError("epsilons: expected a nonempty array");
    for (std::size_t i = 0; i < list.size(); ++i) add_epsilon(list[i], "epsilons[" + std::to_string(i) + "]");
  } else {
    for (const auto& e : kDefaultEpsilons) add_epsilon(Json(e), "default epsilons");
  }

  Tolerances tol;
  if (c.contains("tolerances")) {
    const Json& t = c["tolerances"];
    reject_unknown(t, {"cmi", "chaining", "bias", "mc_stderrs"}, "tolerances");
    tol.cmi = number_or(t, "cmi", tol.cmi, "tolerances");
    tol.chaining = number_or(t, "chaining", tol.chaining, "tolerances");
    tol.bias = number_or(t, "bias", tol.bias, "tolerances");
    tol.mc_stderrs = number_or(t, "mc_stderrs", tol.mc_stderrs, "tolerances");
  }
  if (s.kmax < 0) throw ConfigError("kmax: example1 needs kmax >= 0");

  const auto unit = PsiEnvelope::subgaussian(1.0);
  const double chaining =
      chained_bound(unit, circle_log_cardinality_series(s.kmax), ChainVariant::Expectation, s.tol).bound_value;
  const auto circle = CanonicalProcessSpec::unit_circle();

  std::vector<Row> rows;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    Row r;
    r.label = epsilons[i].first;
    r.epsilon = epsilons[i].second;
    r.mi_bound = mi_bound(unit, circle_total_mi(r.epsilon), MiVariant::Expectation);
    const auto cmi = chained_bound(unit, circle_mi_series(r.epsilon, s.kmax), ChainVariant::Expectation, s.tol);
    r.cmi_bound = cmi.bound_value;
    r.cmi_levels = cmi.terms_sum();
    r.analytic = circle_reference(r.epsilon).true_bias;
    r.mc = mc_estimate(circle, SelectionRule::noisy_circle_argmax(r.epsilon), Statistic::selected_mean(), s.samples,
                       derive_seed(s.seed, i));
    rows.push_back(r);
  }

  Checks checks;
  checks.add("chaining constant", std::abs(chaining - kChainingGolden) <= tol.chaining,
             g(chaining) + " vs " + g(kChainingGolden) + " (tol " + g(tol.chaining) + ")");
  for (const auto& r : rows) {
    const std::string at = "eps=" + r.label + ": ";
    if (r.epsilon > 0.0) {
      checks.add(at + "MI bound infinite", std::isinf(r.mi_bound) && r.mi_bound > 0, g(r.mi_bound));
    }
    for (const auto& gold : kGolden) {
      if (std::abs(gold.epsilon - r.epsilon) > 1e-12) continue;
      checks.add(at + "CMI bound vs table", std::abs(r.cmi_bound - gold.cmi) <= tol.cmi,
                 g(r.cmi_bound) + " vs " + g(gold.cmi) + " (tol " + g(tol.cmi) + ")");
      checks.add(at + "analytic E[X_W] vs table", std::abs(r.analytic - gold.bias) <= tol.bias,
                 g(r.analytic) + " vs " + g(gold.bias) + " (tol " + g(tol.bias) + ")");
    }
    checks.add(at + "Monte-Carlo E[X_W] vs analytic",
               std::abs(r.mc.estimate - r.analytic) <= tol.mc_stderrs * r.mc.std_error,
               g(r.mc.estimate) + " +- " + g(r.mc.std_error) + " vs " + g(r.analytic));
    checks.add(at + "analytic E[X_W] <= CMI bound", r.analytic <= r.cmi_bound + 1e-12,
               g(r.analytic) + " <= " + g(r.cmi_bound));
    if (r.epsilon == 0.0) {
      checks.add(at + "CMI level terms and E[X_W] vanish", r.cmi_levels == 0.0 && r.analytic == 0.0,
                 g(r.cmi_levels) + ", " + g(r.analytic));
      checks.add(at + "CMI bound within the tail tolerance", r.cmi_bound <= s.tol, g(r.cmi_bound));
    }
    if (r.epsilon == 1.0) {
      checks.add(at + "CMI bound equals chaining constant", std::abs(r.cmi_bound - chaining) <= 1e-9,
                 g(r.cmi_bound) + " vs " + g(chaining));
      checks.add(at + "Monte-Carlo E[X_W] near 1.2533",
                 std::abs(r.mc.estimate - kSupMeanGolden) <= tol.mc_stderrs * r.mc.std_error + 5e-5,
                 g(r.mc.estimate) + " +- " + g(r.mc.std_error));
    }
  }

  std::cout << text_table(rows, chaining);
  for (const auto& chk : checks.list) {
    std::cout << (chk["pass"].get<bool>() ? "ok   " : "FAIL ") << chk["name"].get<std::string>() << ": "
              << chk["detail"].get<std::string>() << '\n';
  }

  if (!s.out.empty()) {
    Output out(s);
    if (s.format == "csv") {
      std::ostringstream os;
      os << "epsilon,mi_bound,chaining_bound,cmi_bound,analytic_bias,mc_bias,mc_stderr\n";
      for (const auto& r : rows) {
        os << format_double(r.epsilon) << ',' << format_double(r.mi_bound) << ',' << format_double(chaining) << ','
           << format_double(r.cmi_bound) << ',' << format_double(r.analytic) << ',' << format_double(r.mc.estimate)
           << ',' << format_double(r.mc.std_error) << '\n';
      }
      out.write("example1.csv", os.str());
    } else {
      Json j;
      j["command"] = "example1";
      j["seed"] = s.seed;
      j["samples"] = s.samples;
      j["kmax"] = s.kmax;
      j["tail_tolerance"] = s.tol;
      j["chaining_bound"] = chaining;
      Json list = Json::array();
      for (const auto& r : rows) {
        list.push_back({{"epsilon", r.label},
                        {"epsilon_value", r.epsilon},
                        {"mi_bound", num(r.mi_bound)},
                        {"chaining_bound", chaining},
                        {"cmi_bound", r.cmi_bound},
                        {"analytic_bias", r.analytic},
                        {"mc_bias", r.mc.estimate},
                        {"mc_stderr", r.mc.std_error}});
      }
      j["rows"] = std::move(list);
      j["checks"] = checks.list;
      j["pass"] = checks.pass;
      out.write("example1.json", dump(j));
    }
  }
  return checks.pass ? kExitOk : kExitValidation;
}

}  // namespace chainmi::cli
