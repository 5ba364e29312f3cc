#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cycle_census/ensembles.hpp"

namespace cycle_census::cli {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  // Scratch space for the reproducibility sub-runs; a temporary directory when empty.
  std::filesystem::path scratch_dir;
  // Criterion ids to run; all eleven when empty.
  std::vector<int> only;
};

inline constexpr int kCriterionCount = 11;

// Runs the acceptance criteria in order, reporting each result as it finishes.
std::vector<CriterionResult> run_verify_suite(const VerifyOptions& options,
                                              const std::function<void(const CriterionResult&)>& on_result = {});

// "PASS  [ 3] title: detail (1.23 s)"
std::string format_result_line(const CriterionResult& r);

}  // namespace cycle_census::cli
