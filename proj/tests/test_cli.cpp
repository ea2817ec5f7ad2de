#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json.hpp"

using namespace entforge;
using namespace entforge::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("entforge_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(Grid, LogSpaced) {
  const auto g = parse_epsilon_grid("1e-4:1e-2:log:9");
  ASSERT_EQ(g.size(), 9u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-4);
  EXPECT_DOUBLE_EQ(g.back(), 1e-2);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(10.0, 0.25), 1e-12);
}

TEST(Grid, LinearAndList) {
  const auto g = parse_epsilon_grid("0:0.1:lin:3");
  EXPECT_EQ(g, (std::vector<double>{0.0, 0.05, 0.1}));
  EXPECT_EQ(parse_epsilon_grid("0, 0.001,0.01"), (std::vector<double>{0.0, 0.001, 0.01}));
  EXPECT_THROW(parse_epsilon_grid("0:1e-2:log:9"), std::invalid_argument);
  EXPECT_THROW(parse_epsilon_grid("1e-4:1e-2:cubic:9"), std::invalid_argument);
  EXPECT_THROW(parse_epsilon_grid("1e-4:1e-2:log:1"), std::invalid_argument);
  EXPECT_THROW(parse_epsilon_grid("abc"), std::invalid_argument);
}

TEST(Config, EmptyGivesDefaults) {
  const auto inv = resolve("generate", {});
  EXPECT_DOUBLE_EQ(inv.config.chaos, 1.5);
  EXPECT_EQ(inv.config.steps, 30);
  EXPECT_EQ(inv.config.master_seed, 0u);
  EXPECT_EQ(inv.config.qubit_range, (std::vector<int>{4, 6, 8, 10}));
  EXPECT_FALSE(inv.config.realizations.has_value());
}

TEST(Config, OddQubitsRejectedForSpectrum) {
  try {
    resolve("spectrum", {{"nq", "5"}});
    FAIL() << "expected an exception";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "balanced bipartitions require even n_q");
  }
}

TEST(Config, FileParsing) {
  const auto s = parse_config_text("# comment\nnq = 4,6\n\nk-param = 2.0  # trailing\nstrict = true\n");
  EXPECT_EQ(s.at("nq"), "4,6");
  EXPECT_EQ(s.at("k_param"), "2.0");
  EXPECT_THROW(parse_config_text("colour = red\n"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("nq 4\n"), std::invalid_argument);
  EXPECT_THROW(parse_config_text("nq = 4\nnq = 6\n"), std::invalid_argument);
}

TEST(Config, FlagsWinWithWarning) {
  std::vector<std::string> warnings;
  const auto merged = merge_settings({{"steps", "20"}, {"seed", "3"}}, {{"steps", "25"}, {"seed", "3"}}, warnings);
  EXPECT_EQ(merged.at("steps"), "25");
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("--steps"), std::string::npos);
}

TEST(Config, SeedFallsBackToEnvironment) {
  EXPECT_EQ(resolve("generate", {}, "77").config.master_seed, 77u);
  EXPECT_EQ(resolve("generate", {{"seed", "5"}}, "77").config.master_seed, 5u);
  EXPECT_THROW(resolve("generate", {}, "-1"), std::invalid_argument);
}

TEST(Config, ValueErrors) {
  EXPECT_THROW(resolve("generate", {{"k_param", "x"}}), std::invalid_argument);
  EXPECT_THROW(resolve("noise-sweep", {{"realizations", "0"}}), std::invalid_argument);
  EXPECT_THROW(resolve("noise-sweep", {{"eps_grid", "0.1,0.01"}}), std::invalid_argument);
  EXPECT_THROW(resolve("threshold", {{"bound_kind", "middle"}}), std::invalid_argument);
  EXPECT_THROW(resolve("frobnicate", {}), std::invalid_argument);
  EXPECT_THROW(resolve("generate", {{"colour", "red"}}), std::invalid_argument);
  EXPECT_EQ(resolve("noise-sweep", {{"realizations", "12"}}).config.realizations, 12u);
}

TEST(Format, SeventeenSignificantDigits) {
  const double x = 0.1 + 0.2;
  const std::string s = format_number(x);
  EXPECT_EQ(s, "0.30000000000000004");
  EXPECT_EQ(std::stod(s), x);
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Digest, Sha256) {
  const fs::path dir = scratch_dir("digest");
  fs::create_directories(dir);
  std::ofstream(dir / "abc.txt") << "abc";
  EXPECT_EQ(sha256_hex(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Dispatch, GenerateIsReproducible) {
  const fs::path a = scratch_dir("gen_a"), b = scratch_dir("gen_b");
  std::ostringstream log;
  auto inv = resolve("generate", {{"nq", "4,6"}, {"steps", "8"}, {"out", a.string()}});
  EXPECT_EQ(dispatch(inv, log), kExitOk);
  inv = resolve("generate", {{"nq", "4,6"}, {"steps", "8"}, {"out", b.string()}, {"workers", "3"}});
  EXPECT_EQ(dispatch(inv, log), kExitOk);
  const auto ma = read_json(a / "manifest.json"), mb = read_json(b / "manifest.json");
  ASSERT_EQ(ma["outputs"].size(), mb["outputs"].size());
  for (std::size_t i = 0; i < ma["outputs"].size(); ++i) {
    EXPECT_EQ(ma["outputs"][i]["sha256"], mb["outputs"][i]["sha256"]) << ma["outputs"][i]["file"];
  }
  std::ifstream csv(a / "generation.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "nq,t,mean_entropy,page_value,gap");
  EXPECT_EQ(ma["gate_count"][0]["actual"], 40);
  EXPECT_EQ(ma["gate_count"][0]["reference"], 52);
}

TEST(Dispatch, NoiseSweepSchemaAndDeterminism) {
  const fs::path a = scratch_dir("sweep_a"), b = scratch_dir("sweep_b");
  std::ostringstream log;
  const Settings s{{"nq", "4"}, {"steps", "3"}, {"eps_grid", "0.01,0.02"}, {"realizations", "16"}, {"seed", "9"}};
  auto sa = s, sb = s;
  sa["out"] = a.string();
  sb["out"] = b.string();
  sb["workers"] = "2";
  EXPECT_EQ(dispatch(resolve("noise-sweep", sa), log), kExitOk);
  EXPECT_EQ(dispatch(resolve("noise-sweep", sb), log), kExitOk);
  EXPECT_EQ(sha256_hex(a / "noise_sweep_t3.csv"), sha256_hex(b / "noise_sweep_t3.csv"));
  std::ifstream csv(a / "noise_sweep_t3.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "nq,eps,bound_kind,mean,std,stderr,n_realizations");
  const auto summary = read_json(a / "summary.json");
  EXPECT_EQ(summary["predictions"]["grid"].size(), 2u);
}

TEST(Dispatch, ThresholdWithoutBracket) {
  const fs::path dir = scratch_dir("nobracket");
  std::ostringstream log;
  const auto inv = resolve("threshold", {{"nq", "4"},
                                         {"steps", "2"},
                                         {"eps_grid", "1e-4,2e-4"},
                                         {"realizations", "8"},
                                         {"out", dir.string()}});
  EXPECT_EQ(dispatch(inv, log), kExitNoBracket);
  EXPECT_NE(log.str().find("no bracket"), std::string::npos);
  std::ifstream csv(dir / "thresholds.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  EXPECT_EQ(header, "nq,t,bound_kind,eps_threshold,method");
  EXPECT_EQ(row, "4,2,lower,nan,no-bracket");
}

TEST(Dispatch, ValidatePasses) {
  const fs::path dir = scratch_dir("validate");
  std::ostringstream log;
  EXPECT_EQ(dispatch(resolve("validate", {{"out", dir.string()}}), log), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "validation.csv"));
}

TEST(Dispatch, CalibrateGammaWritesBothConventions) {
  const fs::path dir = scratch_dir("gamma");
  std::ostringstream log;
  const auto inv = resolve("calibrate-gamma", {{"nq", "4"},
                                               {"steps", "5,10"},
                                               {"eps_grid", "0.002:0.008:lin:4"},
                                               {"realizations", "16"},
                                               {"out", dir.string()}});
  EXPECT_EQ(dispatch(inv, log), kExitOk);
  const auto summary = read_json(dir / "summary.json");
  EXPECT_EQ(summary["predictions"].size(), 3u);
  EXPECT_GT(summary["gamma_reference"].get<double>(), 0.0);
}
