// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "gpj/config.hpp"

using gpj::json;

namespace
{

json minimal()
{
  return json::parse(R"({"domain": {"L": 4, "n_cells": 8}, "model": {"kappa": 10}})");
}

/// Expects a configuration error whose message starts with `key`.
void expect_key_error(const json &j, const std::string &key)
{
  try
  {
    gpj::parse_config(j);
    ADD_FAILURE() << "accepted invalid config, expected error on " << key;
  }
  catch (const gpj::ConfigError &e)
  {
    EXPECT_EQ(std::string(e.what()).rfind(key, 0), 0u) << e.what();
  }
}

}  // namespace

TEST(Config, MinimalUsesDefaults)
{
  const auto c = gpj::parse_config(minimal());
  EXPECT_EQ(c.L, 4.0);
  EXPECT_EQ(c.n_cells, 8);
  EXPECT_EQ(c.kappa, 10.0);
  EXPECT_EQ(c.omega, 0.0);
  EXPECT_EQ(c.potential.kind, "harmonic");
  EXPECT_EQ(c.strategy.method, gpj::Method::J);
  EXPECT_TRUE(c.strategy.damping.optimal);
  EXPECT_TRUE(c.strategy.shift_damped.automatic);
  EXPECT_EQ(c.strategy.shift_accel.kind, gpj::ShiftAccel::Kind::Rayleigh);
  EXPECT_EQ(c.strategy.switch_tol, 1e-3);
  EXPECT_EQ(c.strategy.tol, 1e-8);
}

TEST(Config, FullStrategy)
{
  auto j = minimal();
  j["method"] = "A";
  j["strategy"] = json::parse(R"({
    "damping": {"kind": "fixed", "tau": 0.5},
    "shift_damped": {"kind": "fixed", "sigma": -15.0},
    "shift_accel": {"kind": "rayleigh_clamped", "lo": 15.0, "hi": 15.6},
    "switch_tol": 1e-4, "tol": 1e-9, "max_iter": 77})");
  j["output"] = {{"dir", "somewhere"}, {"dump_fields", true}};
  const auto c = gpj::parse_config(j);
  EXPECT_EQ(c.strategy.method, gpj::Method::A);
  EXPECT_FALSE(c.strategy.damping.optimal);
  EXPECT_EQ(c.strategy.damping.tau, 0.5);
  EXPECT_FALSE(c.strategy.shift_damped.automatic);
  EXPECT_EQ(c.strategy.shift_damped.sigma, -15.0);
  EXPECT_EQ(c.strategy.shift_accel.kind, gpj::ShiftAccel::Kind::RayleighClamped);
  EXPECT_EQ(c.strategy.shift_accel.lo, 15.0);
  EXPECT_EQ(c.strategy.shift_accel.hi, 15.6);
  EXPECT_EQ(c.strategy.switch_tol, 1e-4);
  EXPECT_EQ(c.strategy.max_iter, 77);
  EXPECT_EQ(c.output_dir, "somewhere");
  EXPECT_TRUE(c.dump_fields);
}

TEST(Config, ErrorsNameTheOffendingKey)
{
  auto j = minimal();
  j["colour"] = "blue";
  expect_key_error(j, "colour");

  j = minimal();
  j["domain"]["n_cells"] = 8.5;
  expect_key_error(j, "domain.n_cells");

  j = minimal();
  j["domain"].erase("L");
  expect_key_error(j, "domain.L");

  j = minimal();
  j["domain"]["L"] = -1;
  expect_key_error(j, "domain.L");

  j = minimal();
  j.erase("model");
  expect_key_error(j, "model");

  j = minimal();
  j["model"]["kappa"] = "lots";
  expect_key_error(j, "model.kappa");

  j = minimal();
  j["model"]["potential"] = {{"kind", "quartic"}};
  expect_key_error(j, "model.potential.kind");

  j = minimal();
  j["model"]["potential"] = {{"kind", "disorder"}};
  expect_key_error(j, "model.potential.params.epsilon");

  j = minimal();
  j["model"]["potential"] = {{"kind", "disorder"}, {"params", {{"epsilon", 0.25}, {"sharpness", 2}}}};
  expect_key_error(j, "model.potential.params.sharpness");

  j = minimal();
  j["method"] = "B";
  expect_key_error(j, "method");

  j = minimal();
  j["strategy"] = {{"damping", {{"kind", "fixed"}, {"tau", 3.0}}}};
  expect_key_error(j, "strategy.damping.tau");

  j = minimal();
  j["strategy"] = {{"switch_tol", 1e-10}};
  expect_key_error(j, "strategy.switch_tol");

  j = minimal();
  j["strategy"] = {{"shift_accel", {{"kind", "rayleigh_clamped"}, {"lo", 2.0}, {"hi", 1.0}}}};
  expect_key_error(j, "strategy.shift_accel");

  j = minimal();
  j["strategy"] = {{"shift_accel", "newton"}};
  expect_key_error(j, "strategy.shift_accel.kind");

  j = minimal();
  j["strategy"] = {{"max_iter", -1}};
  expect_key_error(j, "strategy.max_iter");

  j = minimal();
  j["output"] = {{"dump_fields", "yes"}};
  expect_key_error(j, "output.dump_fields");
}

TEST(Config, JsonRoundTrip)
{
  for (const auto &name : gpj::preset_names())
  {
    const auto c = gpj::preset(name);
    const auto back = gpj::parse_config(gpj::to_json(c));
    EXPECT_EQ(gpj::to_json(back), gpj::to_json(c)) << name;
  }
}

TEST(Config, PresetValues)
{
  const auto h = gpj::preset("harmonic");
  EXPECT_EQ(h.L, 8.0);
  EXPECT_EQ(h.kappa, 1000.0);
  EXPECT_EQ(h.omega, 0.0);
  EXPECT_EQ(h.potential.kind, "harmonic");

  const auto d = gpj::preset("disorder");
  EXPECT_EQ(d.L, 8.0);
  EXPECT_EQ(d.kappa, 1.0);
  EXPECT_EQ(d.omega, 0.0);
  EXPECT_EQ(d.potential.kind, "disorder");
  EXPECT_EQ(d.potential.epsilon, 1.0 / 64);

  for (const char *name : {"vortex_text", "vortex_figure"})
  {
    const auto v = gpj::preset(name);
    EXPECT_EQ(v.L, 10.0);
    EXPECT_EQ(v.kappa, 1000.0);
    EXPECT_EQ(v.strategy.switch_tol, 1e-6);
  }
  EXPECT_EQ(gpj::preset("vortex_text").omega, 0.99);
  EXPECT_EQ(gpj::preset("vortex_figure").omega, 0.85);
  EXPECT_THROW(gpj::preset("vortex"), gpj::ConfigError);
}

TEST(Config, ShippedPresetFilesMatchBuiltins)
{
  for (const auto &name : gpj::preset_names())
  {
    const auto path = std::string(GPJ_PRESET_DIR) + "/" + name + ".json";
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(gpj::to_json(gpj::load_config(path)), gpj::to_json(gpj::preset(name))) << name;
  }
}

TEST(Config, LoadErrors)
{
  EXPECT_THROW(gpj::load_config("/nonexistent/config.json"), gpj::ConfigError);
  const auto path = (std::filesystem::temp_directory_path() / "gpj_bad_config.json").string();
  {
    std::ofstream(path) << "{ not json";
  }
  EXPECT_THROW(gpj::load_config(path), gpj::ConfigError);
  std::filesystem::remove(path);
}

TEST(Config, BuildsProblemsForEveryPotentialKind)
{
  auto c = gpj::parse_config(minimal());
  for (const char *kind : {"harmonic", "zero"})
  {
    c.potential.kind = kind;
    const auto P = gpj::make_problem(c);
    EXPECT_EQ(P.n(), 49u);
  }
  c.potential.kind = "disorder";
  c.potential.epsilon = 0.25;
  c.potential.seed = 3;
  EXPECT_EQ(gpj::make_problem(c).params().W.checker_cells, 4);

  const auto path = (std::filesystem::temp_directory_path() / "gpj_cfg_pot.csv").string();
  gpj::write_potential_csv(gpj::harmonic_potential(), *gpj::build_mesh(4.0, 8), path, gpj::PotentialLayout::Nodal);
  c.potential.kind = "file";
  c.potential.path = path;
  const auto P = gpj::make_problem(c);
  EXPECT_DOUBLE_EQ(P.params().W(1.0, 2.0), 2.5);
  std::filesystem::remove(path);

  const auto u0 = gpj::initial_field(c, P);
  EXPECT_NEAR(gpj::l2_norm(u0, P.mass()), 1.0, 1e-14);
}
