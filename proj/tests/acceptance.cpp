// One line per acceptance criterion; exits nonzero if any criterion fails.
#include <cstdio>
#include <cstdlib>

#include "torsionlab/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace torsionlab::acceptance;
  Options o;
  for (int i = 1; i < argc; ++i) o.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  run(o, [&](const CriterionResult& r) {
    std::printf("[%s] criterion %2d  %-46s %s  (%.1f s)\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.summary.c_str(), r.seconds);
    std::fflush(stdout);
    if (!r.passed) ++failed;
  });
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
