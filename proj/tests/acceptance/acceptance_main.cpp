// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <iostream>

#include "cycle_census/ensembles.hpp"
#include "cycle_census_cli/verify_suite.hpp"

int main() {
  cycle_census::cli::VerifyOptions opts;
  opts.threads = cycle_census::default_thread_count();
  int failed = 0;
  const auto results = cycle_census::cli::run_verify_suite(opts, [&failed](const cycle_census::cli::CriterionResult& r) {
    std::cout << cycle_census::cli::format_result_line(r) << std::endl;
    if (!r.passed) ++failed;
  });
  std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
