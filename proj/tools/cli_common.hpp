// Shared plumbing for the command-line driver: settings, config access, output.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chainmi/metric_core.hpp"
#include "chainmi/report_io.hpp"

namespace chainmi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitValidation = 2;

/// Bad flags, unreadable or malformed config, or values outside an operation's domain.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Values given on the command line; unset ones fall back to the config file.
struct Flags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<double> tol;
  std::optional<int> kmax;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> config;
};

struct Settings {
  std::uint64_t seed = 1;
  std::size_t samples = 100000;
  double tol = 1e-6;
  int kmax = 40;
  std::string out;  // empty: write to stdout
  std::string format = "json";
  Json config = Json::object();
  std::filesystem::path config_dir = ".";
};

/// Reads the config (if any) and applies flag overrides on top of `defaults`.
Settings resolve(const Flags& flags, Settings defaults);

/// Independent seed for sub-run `stream` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Typed access to config fields; `where` names the enclosing block in messages.
const Json& require(const Json& j, const std::string& key, const std::string& where);
double number(const Json& j, const std::string& where);
double number_or(const Json& j, const std::string& key, double fallback, const std::string& where);
/// Accepts numbers, "inf", and fractions such as "1/20".
double extended_number(const Json& j, const std::string& where);
std::size_t count(const Json& j, const std::string& where);
std::vector<double> vector_of(const Json& j, const std::string& where);
Matrix matrix_of(const Json& j, const std::string& where);
std::string string_of(const Json& j, const std::string& where);
void reject_unknown(const Json& j, const std::vector<std::string>& known, const std::string& where);

/// Writes named artifacts into the output directory, or to stdout when none is set.
class Output {
 public:
  explicit Output(const Settings& s);
  void write(const std::string& filename, const std::string& content) const;
  bool to_stdout() const noexcept { return dir_.empty(); }

 private:
  std::filesystem::path dir_;
};

std::string dump(const Json& j);
/// Finite values as numbers, infinities as "inf" / "-inf".
Json num(double v);

/// Collects named pass/fail checks for the summary and the exit code.
struct Checks {
  Json list = Json::array();
  bool pass = true;

  void add(const std::string& name, bool ok, const std::string& detail);
};

}  // namespace chainmi::cli
