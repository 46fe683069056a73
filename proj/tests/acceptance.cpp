#include <cstdio>

#include "oprema/verify.hpp"

int main() {
  const auto results = oprema::verify::run_all();
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str(), r.seconds);
    if (!r.passed) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? 0 : 1;
}
