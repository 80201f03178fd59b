// One line per acceptance criterion, in order; nonzero exit if any fails.
#include <iostream>

#include "omega/suites/suites.hpp"

int main() {
  int failed = 0, k = 0;
  for (const auto& name : omega::suites::suite_names()) {
    const auto r = omega::suites::run_suite(name);
    std::cout << "criterion " << ++k << " " << r.line() << std::endl;
    failed += !r.pass;
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << (k - failed) << "/" << k << std::endl;
  return failed ? 1 : 0;
}
