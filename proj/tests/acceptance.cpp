// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include "blowuplab/verification.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
  blowuplab::VerificationOptions opts;
  opts.work_dir = argc > 1 ? argv[1] : "acceptance_out";
  bool all = true;
  blowuplab::run_verification(opts, [&](const blowuplab::CriterionResult& r) {
    all = all && r.passed;
    std::cout << blowuplab::format_result(r) << std::endl;
  });
  std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
  return all ? EXIT_SUCCESS : EXIT_FAILURE;
}
