#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli/config.hpp"
#include "cli/run.hpp"
#include "lqsd/errors.hpp"

using namespace lqsd;
using namespace lqsd::cli;
namespace fs = std::filesystem;

namespace {

const char* kBm = "[model]\nfamily = bm_drift\nmu = 1\nsigma = 1\n";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lqsd_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_text(const std::string& text, const std::string& prefix, std::string* out_text = nullptr,
             RunOverrides overrides = {}) {
  std::ostringstream out, err;
  overrides.out_prefix = scratch(prefix).string();
  const int status = run(parse_config(text), overrides, out, err);
  if (out_text) *out_text = out.str() + err.str();
  return status;
}

}  // namespace

TEST(ParseDecimal, AcceptsPlainDecimals) {
  EXPECT_EQ(parse_decimal("1"), 1.0);
  EXPECT_EQ(parse_decimal("-2.5"), -2.5);
  EXPECT_EQ(parse_decimal("+.5"), 0.5);
  EXPECT_EQ(parse_decimal("1e-3"), 1e-3);
  EXPECT_EQ(parse_decimal(" 3. "), 3.0);
  EXPECT_EQ(parse_decimal("0.1"), 0.1);
}

TEST(ParseDecimal, RejectsEverythingElse) {
  for (const char* s : {"", "inf", "nan", "0x10", "1e", "1/2", "2*3", "1.0f", "e5", "--1", "1e999"}) {
    EXPECT_THROW(parse_decimal(s), ParseError) << s;
  }
}

TEST(ParseConfig, Basic) {
  const auto cfg = parse_config(std::string("# comment\ntask = qsd\nlambda = 0.25\nout = x\n") + kBm);
  EXPECT_EQ(cfg.task, Task::kQsd);
  EXPECT_EQ(cfg.out_prefix, "x");
  EXPECT_EQ(cfg.number("lambda"), 0.25);
  EXPECT_EQ(cfg.model_section.family, "bm_drift");
  EXPECT_EQ(build_model(cfg.model_section).family(), Family::kBMDrift);
}

TEST(ParseConfig, Errors) {
  EXPECT_THROW(parse_config("task = qsd\n"), ParseError);
  EXPECT_THROW(parse_config(kBm), ParseError);
  EXPECT_THROW(parse_config(std::string("task = qsd\ntask = scale\n") + kBm), ParseError);
  EXPECT_THROW(parse_config(std::string("task = fly\n") + kBm), ParseError);
  EXPECT_THROW(parse_config(std::string("task = qsd\nbogus = 1\n") + kBm), ParseError);
  EXPECT_THROW(parse_config(std::string("task = qsd\n") + kBm + kBm), ParseError);
  EXPECT_THROW(parse_config(std::string("task = qsd\n[other]\n") + kBm), ParseError);
  EXPECT_THROW(parse_config(std::string("task = qsd\nlambda\n") + kBm), ParseError);
}

TEST(BuildModel, Families) {
  ModelSection m{"meromorphic", {{"a", "-1"}, {"sigma", "0.5"}, {"atoms", "2:2, 3:3"}}};
  EXPECT_EQ(build_model(m).family(), Family::kMeromorphic);
  m.params["atoms"] = "2-2";
  EXPECT_THROW(build_model(m), ParseError);
  EXPECT_THROW(build_model({"cp_exp_drift", {{"mu", "1"}, {"c", "1"}}}), ParseError);
  EXPECT_THROW(build_model({"bm_drift", {{"mu", "1"}, {"sigma", "1"}, {"rho", "1"}}}), ParseError);
  EXPECT_THROW(build_model({"stable", {}}), ParseError);
  EXPECT_THROW(build_model({"bm_drift", {{"mu", "1"}, {"sigma", "-1"}}}), ModelError);
}

TEST(FormatReal, SeventeenDigitsRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    const std::string s = format_real(v);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), v);
    EXPECT_NE(s.find('e'), std::string::npos);
  }
  EXPECT_EQ(format_real(0.5), "5.0000000000000000e-01");
}

TEST(Run, DescribeSummary) {
  std::string out;
  ASSERT_EQ(run_text(std::string("task = describe\n") + kBm, "describe", &out), kStatusOk);
  const std::string summary = slurp(scratch("describe-summary.csv"));
  EXPECT_NE(summary.find("theta0,1.0000000000000000e+00"), std::string::npos);
  EXPECT_NE(summary.find("lambda0,5.0000000000000000e-01"), std::string::npos);
  EXPECT_EQ(summary.rfind("key,value\n", 0), 0u);
}

TEST(Run, QsdAboveCriticalRate) {
  std::string out;
  EXPECT_EQ(run_text(std::string("task = qsd\nlambda = 0.6\n") + kBm, "qsd_bad", &out),
            kStatusModel);
  EXPECT_NE(out.find("exist exactly for 0 < lambda <= lambda0"), std::string::npos);
}

TEST(Run, QsdTable) {
  ASSERT_EQ(run_text(std::string("task = qsd\nlambda = 0.5\nx_max = 40\n") + kBm, "qsd"), kStatusOk);
  const std::string table = slurp(scratch("qsd-qsd.csv"));
  EXPECT_EQ(table.rfind("x,density,cdf\n", 0), 0u);
  EXPECT_NE(table.find("1.0000000000000000e+00,3.6787944117144"), std::string::npos);
}

TEST(Run, StatusCodes) {
  EXPECT_EQ(run_text("task = describe\n[model]\nfamily = bm_drift\nmu = 1\nsigma = 0\n", "bad_model"),
            kStatusModel);
  EXPECT_EQ(run_text("task = describe\n[model]\nfamily = bm_drift\nmu = 1\n", "missing"),
            kStatusParse);
  EXPECT_EQ(run_text(std::string("task = scale\n") + kBm, "noq"), kStatusParse);
  EXPECT_EQ(run_text(std::string("task = scale\nq = 0.5\nmethod = magic\n") + kBm, "method"),
            kStatusParse);
}

TEST(Run, ScaleAndSpectralTables) {
  ASSERT_EQ(run_text(std::string("task = scale\nq = -0.5\nmethod = renewal\nx_max = 2\nh = 0.01\n") + kBm,
                     "scale"),
            kStatusOk);
  const std::string table = slurp(scratch("scale-scale.csv"));
  EXPECT_EQ(table.rfind("x,value\n", 0), 0u);
  ASSERT_EQ(run_text(std::string("task = spectral\nq_points = 5\n") + kBm, "spectral"), kStatusOk);
  const std::string spec = slurp(scratch("spectral-spectral.csv"));
  EXPECT_NE(spec.find("-5.0000000000000000e-01,-1.0000000000000000e+00,inf"), std::string::npos);
}

TEST(Run, VerifyAnalyticFailureIsStatus4) {
  // For this compound Poisson model W^(-1.05 lambda0) first turns negative
  // beyond x = 50, so the negativity check fails on the default window.
  std::string out;
  const std::string cp = "[model]\nfamily = cp_exp_drift\nmu = 2\nc = 1\nrho = 1\n";
  EXPECT_EQ(run_text("task = verify-analytic\n" + cp, "va_fail", &out), kStatusTolerance);
  EXPECT_NE(out.find(",fail"), std::string::npos);
  EXPECT_EQ(run_text("task = verify-analytic\nx_max = 80\n" + cp, "va_pass", &out), kStatusOk);
}

TEST(Run, VerifyMcIsByteDeterministic) {
  const std::string cfg = std::string(
      "task = verify-mc\nn_paths = 4000\nx_list = 1\nq_list = 1\n"
      "lambda_fractions = 1\nt_list = 1\nt_obs = 1\nseed = 5\n"
      "[model]\nfamily = cp_exp_drift\nmu = 2\nc = 1\nrho = 1\n");
  RunOverrides one, many;
  one.threads = 1;
  many.threads = 3;
  // Only determinism is under test here, not the statistical verdicts.
  const int status = run_text(cfg, "mc_a", nullptr, one);
  ASSERT_TRUE(status == kStatusOk || status == kStatusTolerance);
  ASSERT_EQ(run_text(cfg, "mc_b", nullptr, many), status);
  for (const char* f : {"verify-mc.csv", "tau.csv", "summary.csv"}) {
    const std::string a = slurp(scratch(std::string("mc_a-") + f));
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(scratch(std::string("mc_b-") + f))) << f;
  }
  RunOverrides reseeded;
  reseeded.seed = 6;
  (void)run_text(cfg, "mc_c", nullptr, reseeded);
  EXPECT_NE(slurp(scratch("mc_a-tau.csv")), slurp(scratch("mc_c-tau.csv")));
}

TEST(RunMain, Flags) {
  const fs::path cfg = scratch("main.ini");
  std::ofstream(cfg) << "task = describe\n" << kBm;
  const std::string out_prefix = scratch("main").string();
  const std::string cfg_s = cfg.string();
  const char* argv[] = {"lqsd", "--config", cfg_s.c_str(), "--out", out_prefix.c_str(),
                        "--threads", "2"};
  std::ostringstream out, err;
  EXPECT_EQ(run_main(7, argv, out, err), kStatusOk);
  EXPECT_TRUE(fs::exists(scratch("main-summary.csv")));

  const char* bad[] = {"lqsd", "--config"};
  EXPECT_EQ(run_main(2, bad, out, err), kStatusParse);
  const char* missing[] = {"lqsd", "--config", "/nonexistent/file.ini"};
  EXPECT_EQ(run_main(3, missing, out, err), kStatusParse);
  const char* bad_seed[] = {"lqsd", "--config", cfg_s.c_str(), "--seed", "-3"};
  EXPECT_EQ(run_main(5, bad_seed, out, err), kStatusParse);
}
