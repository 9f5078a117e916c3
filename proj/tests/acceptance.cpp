// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fail.

#include <chrono>
#include <cstdio>

#include "qslimit/report.hpp"

int main() {
  using clock = std::chrono::steady_clock;
  qslimit::AcceptanceContext ctx;
  using Check = qslimit::CriterionResult (*)(qslimit::AcceptanceContext&);
  const Check checks[] = {
      [](qslimit::AcceptanceContext&) { return qslimit::criterion_bound_chain(); },
      [](qslimit::AcceptanceContext&) { return qslimit::criterion_sup_bounds(); },
      [](qslimit::AcceptanceContext& c) { return qslimit::criterion_van_der_corput(c.settings()); },
      qslimit::criterion_cf_fixed_point,
      qslimit::criterion_density_fixed_point,
      qslimit::criterion_route_independence,
      qslimit::criterion_simulation,
      qslimit::criterion_excluded_claims,
  };
  int failed = 0;
  for (auto check : checks) {
    const auto t0 = clock::now();
    const auto r = check(ctx);
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("%s criterion %d (%s) [%.1fs]: %s\n", r.pass ? "PASS" : "FAIL", r.id,
                r.title.c_str(), secs, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(checks)) - failed,
              std::size(checks));
  return failed == 0 ? 0 : 1;
}
