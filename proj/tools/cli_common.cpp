#include "cli_common.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace chainmi::cli {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double parse_plain(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(where + ": cannot read '" + s + "' as a number");
  }
  return v;
}

}  // namespace

Settings resolve(const Flags& flags, Settings s) {
  if (flags.config) {
    std::ifstream in(*flags.config);
    if (!in) throw ConfigError("cannot open config " + *flags.config);
    try {
      s.config = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError(*flags.config + ": " + e.what());
    }
    if (!s.config.is_object()) throw ConfigError(*flags.config + ": top level must be an object");
    s.config_dir = std::filesystem::path(*flags.config).parent_path();
    if (s.config_dir.empty()) s.config_dir = ".";
    const Json& c = s.config;
    if (c.contains("seed")) {
      if (!c["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
      s.seed = c["seed"].get<std::uint64_t>();
    }
    if (c.contains("samples")) s.samples = count(c["samples"], "samples");
    if (c.contains("tol")) s.tol = number(c["tol"], "tol");
    if (c.contains("kmax")) {
      if (!c["kmax"].is_number_integer()) throw ConfigError("kmax: expected an integer");
      s.kmax = c["kmax"].get<int>();
    }
    if (c.contains("out")) s.out = (s.config_dir / string_of(c["out"], "out")).string();
    if (c.contains("format")) s.format = string_of(c["format"], "format");
  }
  if (flags.seed) s.seed = *flags.seed;
  if (flags.samples) s.samples = *flags.samples;
  if (flags.tol) s.tol = *flags.tol;
  if (flags.kmax) s.kmax = *flags.kmax;
  if (flags.out) s.out = *flags.out;
  if (flags.format) s.format = *flags.format;

  if (s.samples < 100) throw ConfigError("samples: need at least 100");
  if (!(s.tol > 0.0) || !std::isfinite(s.tol)) throw ConfigError("tol: must be a positive number");
  if (s.kmax < -1) throw ConfigError("kmax: must be >= -1");
  if (s.format != "json" && s.format != "csv") throw ConfigError("format: expected csv or json");
  return s;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

const Json& require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j[key];
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": must be finite");
  return v;
}

double number_or(const Json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? number(j[key], where + "." + key) : fallback;
}

double extended_number(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ConfigError(where + ": expected a number, \"inf\" or a fraction");
  const std::string s = j.get<std::string>();
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  const auto slash = s.find('/');
  if (slash == std::string::npos) return parse_plain(s, where);
  const double num = parse_plain(s.substr(0, slash), where);
  const double den = parse_plain(s.substr(slash + 1), where);
  if (den == 0.0) throw ConfigError(where + ": zero denominator in '" + s + "'");
  return num / den;
}

std::size_t count(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw ConfigError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

std::vector<double> vector_of(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(extended_number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix matrix_of(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of rows");
  Matrix out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector_of(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string string_of(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

void reject_unknown(const Json& j, const std::vector<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == key;
    if (!ok) throw ConfigError(where + ": unknown field '" + key + "'");
  }
}

Output::Output(const Settings& s) : dir_(s.out) {
  if (dir_.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void Output::write(const std::string& filename, const std::string& content) const {
  if (dir_.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(dir_ / filename, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + (dir_ / filename).string());
  f << content;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

void Checks::add(const std::string& name, bool ok, const std::string& detail) {
  pass = pass && ok;
  list.push_back({{"name", name}, {"pass", ok}, {"detail", detail}});
}

}  // namespace chainmi::cli
