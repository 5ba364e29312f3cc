#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <zlib.h>

#include "cycle_census/ensembles.hpp"
#include "cycle_census/error.hpp"
#include "cycle_census/output.hpp"

using namespace cycle_census;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("cycle-census-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string gunzip(const std::filesystem::path& p) {
  gzFile f = gzopen(p.string().c_str(), "rb");
  std::string out;
  char buf[4096];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
  gzclose(f);
  return out;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(ParallelFor, CoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i].fetch_add(1); });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(200, 4, [](std::size_t i) {
      if (i % 50 == 17) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "17");
  }
}

TEST(TheoremA, SingleSampleIsByteIdenticalOnRerun) {
  TheoremAConfig cfg;
  cfg.samples = 1;
  cfg.bootstrap_resamples = 0;
  RunOptions a;
  a.seed = 7;
  a.out_dir = scratch("rerun-a");
  RunOptions b = a;
  b.out_dir = scratch("rerun-b");
  run_theorem_a(cfg, a);
  run_theorem_a(cfg, b);
  const std::string ra = slurp(a.out_dir / "records.jsonl");
  EXPECT_EQ(line_count(ra), 1u);
  EXPECT_EQ(ra, slurp(b.out_dir / "records.jsonl"));
  EXPECT_EQ(slurp(a.out_dir / "tail.csv"), slurp(b.out_dir / "tail.csv"));
}

TEST(TheoremA, EnforcesBudget) {
  TheoremAConfig cfg;
  cfg.degree = 3;
  cfg.norm_budget = 2.0 * Ellipsoid::theorem_a_budget(3);
  try {
    run_theorem_a(cfg, RunOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(TheoremA, ThreadCountDoesNotChangeRecords) {
  TheoremAConfig cfg;
  cfg.samples = 24;
  cfg.bootstrap_resamples = 20;
  RunOptions one;
  one.seed = 3;
  one.out_dir = scratch("threads-1");
  RunOptions four = one;
  four.threads = 4;
  four.out_dir = scratch("threads-4");
  four.gzip = false;
  const TheoremAResult r1 = run_theorem_a(cfg, one);
  const TheoremAResult r4 = run_theorem_a(cfg, four);
  for (const char* f : {"records.jsonl", "tail.csv", "tail-real.csv", "moments.csv", "summary.json"}) {
    EXPECT_EQ(slurp(one.out_dir / f), slurp(four.out_dir / f)) << f;
  }
  EXPECT_EQ(r1.complex_tail.tail_fractions, r4.complex_tail.tail_fractions);
}

TEST(TheoremA, GzipRecordsDecompressToPlainRecords) {
  TheoremAConfig cfg;
  cfg.samples = 5;
  cfg.bootstrap_resamples = 0;
  RunOptions plain;
  plain.out_dir = scratch("plain");
  RunOptions gz = plain;
  gz.gzip = true;
  gz.out_dir = scratch("gz");
  run_theorem_a(cfg, plain);
  run_theorem_a(cfg, gz);
  EXPECT_FALSE(std::filesystem::exists(gz.out_dir / "records.jsonl"));
  EXPECT_EQ(gunzip(gz.out_dir / "records.jsonl.gz"), slurp(plain.out_dir / "records.jsonl"));
}

// Doubling the sample count shrinks the standard error by about sqrt 2.
TEST(TheoremA, StandardErrorScaling) {
  TheoremAConfig cfg;
  cfg.bootstrap_resamples = 0;
  cfg.samples = 800;
  RunOptions opts;
  opts.seed = 101;
  const double se1 = run_theorem_a(cfg, opts).complex_stats.standard_error;
  cfg.samples = 1600;
  opts.seed = 202;
  const double se2 = run_theorem_a(cfg, opts).complex_stats.standard_error;
  ASSERT_GT(se2, 0.0);
  EXPECT_NEAR(se1 / se2, std::sqrt(2.0), 0.2 * std::sqrt(2.0));
}

TEST(Rigid, ThreeRootSubRunHasThreeCycles) {
  RigidConfig cfg;
  cfg.roots = 3;
  cfg.samples = 10;
  for (const RigidRecord& r : run_rigid_fields(cfg, RunOptions{})) {
    ASSERT_TRUE(r.record.real_cycles);
    EXPECT_EQ(*r.record.real_cycles, 3);
    ASSERT_EQ(r.record.cycle_radii.size(), 3u);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(r.record.cycle_radii[j], std::sqrt(r.roots[j]), 1e-8);
  }
}

TEST(Tail, BlaschkeEnsembleDecays) {
  TailConfig cfg;
  cfg.samples = 3000;
  cfg.bootstrap_resamples = 100;
  const TailResult r = run_tail(cfg, RunOptions{});
  EXPECT_EQ(r.failures, 0u);
  const auto& f = r.tail.tail_fractions;
  for (std::size_t i = 1; i < f.size(); ++i) EXPECT_LE(f[i], f[i - 1]);
  ASSERT_FALSE(r.tail.insufficient_data);
  EXPECT_GT(r.tail.fit_c2, 0.0);
}

TEST(Slln, ConstantSequenceHasConstantMean) {
  SllnConfig cfg;
  cfg.sequence = R"({"kind":"repeat","family":"monomial","params":{"k":2,"value":1.0}})";
  cfg.horizon = 50;
  const SllnResult r = run_slln(cfg, RunOptions{});
  ASSERT_EQ(r.running_means.size(), 50u);
  for (double m : r.running_means) EXPECT_EQ(m, 2.0);
  EXPECT_TRUE(r.stabilized || r.standard_error == 0.0);
}

TEST(Slln, TwoSeedsShareTheLimit) {
  SllnConfig cfg;
  cfg.horizon = 1200;
  RunOptions a;
  a.seed = 1;
  RunOptions b;
  b.seed = 2;
  const SllnResult ra = run_slln(cfg, a);
  const SllnResult rb = run_slln(cfg, b);
  const double se = std::hypot(ra.standard_error, rb.standard_error);
  EXPECT_LT(std::abs(ra.mean - rb.mean), 3.0 * se);
  EXPECT_TRUE(ra.within_envelope);
  EXPECT_GT(ra.envelope_constant, 0.0);
}

TEST(Clt, DeterministicFamilyHasDegenerateVariance) {
  CltConfig cfg;
  cfg.sequence = R"({"kind":"repeat","family":"constant"})";
  cfg.n = 5;
  cfg.repetitions = 10;
  cfg.calibration_draws = 50;
  try {
    run_clt(cfg, RunOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateVariance);
  }
}

TEST(Clt, RefusesWhenSeparationFails) {
  CltConfig cfg;
  cfg.n = 5;
  cfg.repetitions = 10;
  cfg.calibration_draws = 200;
  cfg.delta = 10.0;  // no slice exceeds 10 in modulus
  try {
    run_clt(cfg, RunOptions{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSeparationViolated);
  }
}

TEST(Clt, BernoulliSumsAreNearNormal) {
  CltConfig cfg;
  cfg.n = 100;
  cfg.repetitions = 200;
  cfg.calibration_draws = 2000;
  RunOptions opts;
  opts.out_dir = scratch("clt");
  const CltReport r = run_clt(cfg, opts);
  EXPECT_NEAR(r.B_n, std::sqrt(100 * 0.25), 0.5);
  for (double m : r.means) EXPECT_NEAR(m, 0.5, 0.05);
  EXPECT_LT(r.ks_vs_normal, 0.15);
  EXPECT_EQ(line_count(slurp(opts.out_dir / "clt.csv")), 201u);
  EXPECT_EQ(line_count(slurp(opts.out_dir / "moments.csv")), 101u);
}

TEST(Kac, RunWritesTables) {
  KacConfig cfg;
  cfg.k = 40;
  cfg.samples = 6;
  RunOptions opts;
  opts.out_dir = scratch("kac");
  const KacRunResult r = run_kac(cfg, opts);
  EXPECT_TRUE(r.conservation_ok);
  EXPECT_EQ(line_count(slurp(opts.out_dir / "kac.csv")), 7u);
  EXPECT_EQ(line_count(slurp(opts.out_dir / "angles.csv")), 241u);
  EXPECT_TRUE(std::filesystem::exists(opts.out_dir / "plot.gp"));
}

TEST(Records, JsonCarriesFlags) {
  FieldRecord r;
  r.sample_index = 4;
  r.is_center = true;
  const std::string j = field_record_json(r);
  EXPECT_NE(j.find("\"center\":true"), std::string::npos);
  EXPECT_NE(j.find("\"complex_zero_count\":null"), std::string::npos);
  EXPECT_EQ(j.find("wall_time"), std::string::npos);
}

TEST(Output, AtomicWriteAndFormatting) {
  const auto dir = scratch("atomic");
  write_file_atomic(dir / "a" / "b.txt", "hello");
  EXPECT_EQ(slurp(dir / "a" / "b.txt"), "hello");
  EXPECT_FALSE(std::filesystem::exists(dir / "a" / "b.txt.tmp"));
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  CsvTable t({"x", "y"});
  t.add_row({"1", "2"});
  EXPECT_EQ(t.str(), "x,y\n1,2\n");
  EXPECT_THROW(t.add_row({"1"}), Error);
}
