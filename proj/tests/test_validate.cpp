// SPDX-License-Identifier: Apache-2.0
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gpj/validate.hpp"

namespace
{

const gpj::CheckResult &find(const std::vector<gpj::CheckResult> &rs, const std::string &name)
{
  for (const auto &r : rs)
    if (r.name == name)
      return r;
  throw std::runtime_error("no check named " + name);
}

}  // namespace

TEST(Validate, AllChecksPassOnSmallMesh)
{
  std::ostringstream progress;
  const auto rs = gpj::run_validation({}, &progress);
  EXPECT_EQ(rs.size(), 8u);
  for (const auto &r : rs)
    EXPECT_EQ(r.status, gpj::CheckResult::Status::Pass) << r.name << ": " << r.detail;
  EXPECT_TRUE(gpj::all_passed(rs));
  EXPECT_NE(progress.str().find("PASS  convergence rate"), std::string::npos);
}

TEST(Validate, FlippedRotationSignIsCaught)
{
  gpj::ValidateOptions opt;
  opt.flip_rotation_sign = true;
  opt.rate = false;
  const auto rs = gpj::run_validation(opt);
  EXPECT_EQ(find(rs, "energy identity").status, gpj::CheckResult::Status::Fail);
  EXPECT_EQ(find(rs, "fd gradient").status, gpj::CheckResult::Status::Fail);
  EXPECT_FALSE(gpj::all_passed(rs));
}

TEST(Validate, DenseChecksSkipAboveTheCap)
{
  gpj::ValidateOptions opt;
  opt.n_cells = 52;  // 2 * 51^2 = 5202 unknowns
  opt.rate = true;
  const auto rs = gpj::run_validation(opt);
  for (const char *name : {"sherman-morrison vs dense", "linear spectrum", "convergence rate"})
  {
    const auto &r = find(rs, name);
    EXPECT_EQ(r.status, gpj::CheckResult::Status::Skip) << name;
    EXPECT_NE(r.detail.find("dense cap"), std::string::npos);
  }
  EXPECT_EQ(find(rs, "energy identity").status, gpj::CheckResult::Status::Pass);
  EXPECT_TRUE(gpj::all_passed(rs));
}

TEST(Validate, TablePrintsOneLinePerCheck)
{
  const std::vector<gpj::CheckResult> rs = {
      {"alpha", gpj::CheckResult::Status::Pass, "ok"},
      {"beta", gpj::CheckResult::Status::Skip, "later"},
      {"gamma check", gpj::CheckResult::Status::Fail, "bad"}};
  std::ostringstream os;
  gpj::print_table(rs, os);
  EXPECT_EQ(os.str(), "PASS  alpha        ok\nSKIP  beta         later\nFAIL  gamma check  bad\n");
  EXPECT_FALSE(gpj::all_passed(rs));
}
