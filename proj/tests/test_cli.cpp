// SPDX-License-Identifier: Apache-2.0
// Drives the gpj executable as a subprocess.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gpj/config.hpp"

namespace fs = std::filesystem;
using gpj::json;

namespace
{

struct Outcome
{
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path &p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test
{
protected:
  void SetUp() override
  {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("gpj_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome gpj(const std::string &args, const std::string &env = "")
  {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = env + " \"" + GPJ_EXE + "\" " + args + " >\"" + out.string() +
                            "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path write_config(const json &j, const std::string &name = "config.json")
  {
    const auto p = dir_ / name;
    std::ofstream(p) << j.dump(2);
    return p;
  }

  static json small_config()
  {
    return json::parse(R"({
      "name": "small", "domain": {"L": 4, "n_cells": 8},
      "model": {"omega": 0.0, "kappa": 10.0, "potential": "harmonic"},
      "strategy": {"tol": 1e-9, "max_iter": 300},
      "output": {"dir": "unused", "dump_fields": true}})");
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, RunWritesAllOutputs)
{
  const auto cfg = write_config(small_config());
  const auto out = dir_ / "out";
  const auto r = gpj("run -q \"" + cfg.string() + "\" --out \"" + out.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("converged"), std::string::npos);

  const auto history = slurp(out / "history.csv");
  EXPECT_EQ(history.rfind("iter,phase,residual,energy,lambda,tau,sigma,mass_tilde,ortho_defect\n", 0),
            0u);
  EXPECT_EQ(slurp(out / "field.csv").rfind("x,y,re,im,density\n", 0), 0u);
  EXPECT_EQ(slurp(out / "initial.csv").rfind("x,y,re,im,density\n", 0), 0u);
  EXPECT_EQ(slurp(out / "potential.csv").rfind("x,y,w\n", 0), 0u);

  // 81 nodes plus the header.
  std::ifstream field(out / "field.csv");
  int lines = 0;
  for (std::string line; std::getline(field, line);)
    ++lines;
  EXPECT_EQ(lines, 82);

  const auto summary = json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary.at("name"), "small");
  EXPECT_EQ(summary.at("status"), "converged");
  EXPECT_TRUE(summary.at("converged").get<bool>());
  EXPECT_LE(summary.at("residual").get<double>(), 1e-9);
  EXPECT_GT(summary.at("lambda").get<double>(), summary.at("energy").get<double>());
  for (const char *key : {"iterations", "wall_time", "energy_increases", "shift_retries"})
    EXPECT_TRUE(summary.contains(key)) << key;
}

TEST_F(Cli, RepeatedRunsAreBitIdentical)
{
  const auto cfg = write_config(small_config());
  ASSERT_EQ(gpj("run -q \"" + cfg.string() + "\" --out \"" + (dir_ / "a").string() + "\"").code, 0);
  ASSERT_EQ(gpj("run -q \"" + cfg.string() + "\" --out \"" + (dir_ / "b").string() + "\"").code, 0);
  for (const char *f : {"history.csv", "field.csv", "initial.csv", "potential.csv"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(Cli, IterationCapExitsWithTwo)
{
  auto j = small_config();
  j["strategy"]["max_iter"] = 2;
  const auto cfg = write_config(j);
  const auto r = gpj("run -q \"" + cfg.string() + "\" --out \"" + (dir_ / "out").string() + "\"");
  EXPECT_EQ(r.code, 2) << r.err;
  const auto summary = json::parse(slurp(dir_ / "out" / "summary.json"));
  EXPECT_EQ(summary.at("status"), "max_iter");
  EXPECT_FALSE(summary.at("converged").get<bool>());
}

TEST_F(Cli, InvalidConfigNamesTheKey)
{
  auto j = small_config();
  j["strategy"]["damping"] = {{"kind", "fixed"}, {"tau", 5.0}};
  const auto cfg = write_config(j);
  const auto r = gpj("run -q \"" + cfg.string() + "\"");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("gpj: error: strategy.damping.tau"), std::string::npos) << r.err;

  EXPECT_EQ(gpj("run -q \"" + (dir_ / "missing.json").string() + "\"").code, 1);
  EXPECT_EQ(gpj("run --preset nope").code, 1);
}

TEST_F(Cli, OutputDirectoryPrecedence)
{
  auto j = small_config();
  j["output"]["dir"] = (dir_ / "from_config").string();
  const auto cfg = write_config(j);

  ASSERT_EQ(gpj("run -q \"" + cfg.string() + "\"").code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_config" / "summary.json"));

  const auto env = "GPJ_OUTPUT_DIR=\"" + (dir_ / "from_env").string() + "\"";
  ASSERT_EQ(gpj("run -q \"" + cfg.string() + "\"", env).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "from_env" / "summary.json"));

  ASSERT_EQ(gpj("run -q \"" + cfg.string() + "\" --out \"" + (dir_ / "from_flag").string() + "\"",
                env)
                .code,
            0);
  EXPECT_TRUE(fs::exists(dir_ / "from_flag" / "summary.json"));
}

TEST_F(Cli, ValidatePasses)
{
  const auto r = gpj("validate --no-rate");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("all checks passed"), std::string::npos);
  EXPECT_NE(r.out.find("SKIP  convergence rate"), std::string::npos);
}

TEST_F(Cli, ValidateFlagsInjectedFault)
{
  const auto r = gpj("validate --no-rate --flip-rotation-sign");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL  energy identity"), std::string::npos) << r.out;
}

TEST_F(Cli, SpectrumIsSortedAndStartsAtTheGroundState)
{
  const auto cfg = write_config(small_config());
  const auto file = dir_ / "spectrum.json";
  const auto r = gpj("spectrum \"" + cfg.string() + "\" --k 6 --out \"" + file.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(json::parse(slurp(file)), j);
  const auto values = j.at("eigenvalues").get<std::vector<double>>();
  ASSERT_EQ(values.size(), 6u);
  for (std::size_t i = 1; i < values.size(); ++i)
    EXPECT_LE(values[i - 1], values[i]);
  EXPECT_NEAR(values[0], j.at("lambda_star").get<double>(), 1e-8);
  EXPECT_LE(j.at("max_pair_residual").get<double>(), 1e-8);
}

TEST_F(Cli, SpectrumRejectsOversizeRequests)
{
  auto j = small_config();
  j["domain"]["n_cells"] = 4;  // 9 interior nodes
  auto r = gpj("spectrum \"" + write_config(j).string() + "\" --k 10");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--k 10"), std::string::npos) << r.err;

  j["domain"]["n_cells"] = 52;
  r = gpj("spectrum \"" + write_config(j).string() + "\" --k 1");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("2N = 5202"), std::string::npos) << r.err;
}

TEST_F(Cli, PresetPrintsParsableConfig)
{
  for (const auto &name : gpj::preset_names())
  {
    const auto r = gpj("preset " + name);
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(gpj::to_json(gpj::parse_config(json::parse(r.out))), gpj::to_json(gpj::preset(name)));
    EXPECT_EQ(json::parse(r.out), json::parse(slurp(fs::path(GPJ_PRESET_DIR) / (name + ".json"))));
  }
  EXPECT_EQ(gpj("preset unknown").code, 1);
}

TEST_F(Cli, ShippedDemoConfigParses)
{
  EXPECT_NO_THROW(gpj::load_config(std::string(GPJ_PRESET_DIR) + "/demo_small.json"));
}
