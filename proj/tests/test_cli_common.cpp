#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "cli_common.hpp"

using namespace chainmi::cli;
using chainmi::Json;

TEST(ConfigValues, ExtendedNumbers) {
  EXPECT_DOUBLE_EQ(extended_number(Json("1/20"), "x"), 0.05);
  EXPECT_DOUBLE_EQ(extended_number(Json(0.25), "x"), 0.25);
  EXPECT_DOUBLE_EQ(extended_number(Json("0.125"), "x"), 0.125);
  EXPECT_TRUE(std::isinf(extended_number(Json("inf"), "x")));
  EXPECT_THROW(extended_number(Json("1/0"), "x"), ConfigError);
  EXPECT_THROW(extended_number(Json("abc"), "x"), ConfigError);
  EXPECT_THROW(extended_number(Json("1/2x"), "x"), ConfigError);
  EXPECT_THROW(extended_number(Json::array(), "x"), ConfigError);
}

TEST(ConfigValues, TypedAccessors) {
  const Json j = Json::parse(R"({"n": 3, "neg": -1, "m": [[1, 2], [3, "1/2"]], "s": "a"})");
  EXPECT_EQ(count(j["n"], "n"), 3u);
  EXPECT_THROW(count(j["neg"], "neg"), ConfigError);
  EXPECT_EQ(matrix_of(j["m"], "m"), (chainmi::Matrix{{1, 2}, {3, 0.5}}));
  EXPECT_EQ(string_of(j["s"], "s"), "a");
  EXPECT_THROW(require(j, "missing", "cfg"), ConfigError);
  EXPECT_DOUBLE_EQ(number_or(j, "absent", 7.0, "cfg"), 7.0);
  EXPECT_NO_THROW(reject_unknown(j, {"n", "neg", "m", "s"}, "cfg"));
  try {
    reject_unknown(j, {"n", "neg", "m"}, "cfg");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'s'"), std::string::npos);
  }
}

TEST(Settings, FlagsOverrideConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "chainmi_cli_common_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "cfg.json";
  std::ofstream(path) << R"({"seed": 9, "samples": 500, "tol": 0.01, "out": "res", "format": "csv"})";
  Flags f;
  f.config = path.string();
  auto s = resolve(f, Settings{});
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.samples, 500u);
  EXPECT_EQ(s.format, "csv");
  EXPECT_EQ(std::filesystem::path(s.out), dir / "res");
  f.seed = 4;
  f.samples = 1000;
  f.format = "json";
  s = resolve(f, Settings{});
  EXPECT_EQ(s.seed, 4u);
  EXPECT_EQ(s.samples, 1000u);
  EXPECT_EQ(s.format, "json");
  f.samples = 10;
  EXPECT_THROW(resolve(f, Settings{}), ConfigError);
  std::ofstream(path) << R"({"seed": -2})";
  f = Flags{};
  f.config = path.string();
  EXPECT_THROW(resolve(f, Settings{}), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST(Seeds, DerivedStreamsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
    for (std::uint64_t stream = 0; stream < 100; ++stream) seen.insert(derive_seed(seed, stream));
  }
  EXPECT_EQ(seen.size(), 300u);
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
}

TEST(Output, NumbersKeepInfinity) {
  EXPECT_EQ(num(INFINITY), "inf");
  EXPECT_EQ(num(-INFINITY), "-inf");
  EXPECT_EQ(num(1.5), 1.5);
}
