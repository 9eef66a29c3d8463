// Acceptance suite runner: one pass/fail line per criterion, exit code =
// number of failed criteria. --fast skips the long 2D study; --only N runs
// a single criterion.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "erkc/verification.hpp"

int main(int argc, char** argv) {
  bool fast = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--fast") == 0) {
      fast = true;
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--fast] [--only N]\n", argv[0]);
      return 2;
    }
  }
  const auto results = erkc::verify::run_acceptance(fast, only);
  int failures = 0;
  for (const auto& r : results) {
    const char* tag = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    std::printf("%s criterion %d: %s (%s) [%.2fs]\n", tag, r.id, r.name.c_str(),
                r.detail.c_str(), r.seconds);
    if (!r.pass && !r.skipped) ++failures;
  }
  return failures;
}
