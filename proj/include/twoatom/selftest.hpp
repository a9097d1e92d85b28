#pragma once

// Reduced-size invariant suites run by `twoatom selftest`.

#include <ostream>
#include <string>
#include <vector>

namespace twoatom {

/// Fault injection for checking that the suites can fail.
struct SelftestHooks {
  /// Replace the single-atom closed form with a wrong one.
  bool corrupt_closed_form = false;
  /// Multiplies the rejection-sampling envelope; below 1 the bound is broken.
  double envelope_scale = 1.0;
};

struct SuiteResult {
  std::string name;
  bool passed;
  std::string detail;  // failing invariant, or a short summary on success
};

std::vector<SuiteResult> run_selftest(const SelftestHooks& hooks = {});

/// One "PASS name: detail" / "FAIL name: detail" line per suite. Returns true
/// when all passed.
bool print_selftest(const std::vector<SuiteResult>& results, std::ostream& out);

}  // namespace twoatom
