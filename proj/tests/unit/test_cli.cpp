#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cycle_census/planar_field.hpp"
#include "cycle_census_cli/cli.hpp"

using namespace cycle_census;
using namespace cycle_census::cli;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  args.insert(args.begin(), "cycle-census");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  std::ostringstream out, err;
  Invocation r;
  r.code = parse_and_dispatch(static_cast<int>(args.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("cycle-census-cli-" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"theorem-a", "--no-such-flag"}).code, kExitUsage);
  EXPECT_EQ(run({"theorem-a", "--degree", "three"}).code, kExitUsage);
  const Invocation big = run({"theorem-a", "--degree", "3", "--budget-N", "1.0", "--samples", "1"});
  EXPECT_EQ(big.code, kExitUsage);
  EXPECT_NE(big.err.find("budget"), std::string::npos);
  EXPECT_EQ(run({"count-cycles"}).code, kExitUsage);
}

TEST(Cli, MissingFieldFileIsAnExperimentFailure) {
  EXPECT_EQ(run({"count-cycles", "--field", "/nonexistent/field.json"}).code, kExitExperimentFailure);
}

TEST(Cli, CountCyclesPrintsJson) {
  const auto dir = scratch("count");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "field.json") << field_to_json(v0_field(3, Ellipsoid::theorem_a_budget(3)));
  const Invocation r = run({"count-cycles", "--field", (dir / "field.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("\"real_cycles\""), std::string::npos);
  EXPECT_NE(r.out.find("\"complex_zero_count\""), std::string::npos);
}

TEST(Cli, TheoremAWritesOutputsAndRerunsIdentically) {
  const auto a = scratch("thm-a");
  const auto b = scratch("thm-b");
  const std::vector<std::string> common = {"theorem-a", "--samples", "12", "--bootstrap", "10", "--seed", "5"};
  auto with_out = [&](const std::filesystem::path& dir) {
    auto args = common;
    args.push_back("--out");
    args.push_back(dir.string());
    return args;
  };
  const Invocation ra = run(with_out(a));
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  ASSERT_EQ(run(with_out(b)).code, kExitOk);
  for (const char* f : {"records.jsonl", "tail.csv", "tail-real.csv", "moments.csv", "summary.json", "plot.gp",
                        "timing.json", "effective-config.json"}) {
    EXPECT_TRUE(std::filesystem::exists(a / f)) << f;
  }
  EXPECT_EQ(slurp(a / "records.jsonl"), slurp(b / "records.jsonl"));
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
}

TEST(Cli, ExplicitFlagsOverrideConfigFile) {
  const auto dir = scratch("config");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "cfg.json") << R"({"k": 30, "samples": 3, "epsilon": 0.2})";
  const Invocation r = run({"kac", "--config", (dir / "cfg.json").string(), "--samples", "2", "--out", (dir / "run").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string eff = slurp(dir / "run" / "effective-config.json");
  EXPECT_NE(eff.find("\"k\": 30"), std::string::npos) << eff;
  EXPECT_NE(eff.find("\"samples\": 2"), std::string::npos) << eff;
  EXPECT_NE(eff.find("\"epsilon\": 0.2"), std::string::npos) << eff;
}

TEST(Cli, ConfigFileErrorsAreUsageErrors) {
  const auto dir = scratch("bad-config");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "unknown.json") << R"({"colour": 3})";
  std::ofstream(dir / "type.json") << R"({"k": "many"})";
  std::ofstream(dir / "broken.json") << "{";
  for (const char* f : {"unknown.json", "type.json", "broken.json"}) {
    EXPECT_EQ(run({"kac", "--config", (dir / f).string()}).code, kExitUsage) << f;
  }
}

TEST(Cli, VerifySingleCriterion) {
  const Invocation r = run({"verify", "--only", "1"});
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_NE(r.out.find("PASS [ 1]"), std::string::npos) << r.out;
}
