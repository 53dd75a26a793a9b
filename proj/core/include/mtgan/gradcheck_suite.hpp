#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mtgan {

struct SuiteCheck {
  std::string name;
  double rel_error = 0.0;
  double tolerance = 0.0;
  bool ok() const { return rel_error < tolerance; }
};

// Finite-difference verification of every primitive, each loss, the composite
// objective, detach semantics, and the second-order meta-gradient at small
// inner-iteration counts. `inject_sign_flip` forces a sign-flipped gradient
// into the named primitive's check; used to prove the harness detects faults.
std::vector<SuiteCheck> run_gradcheck_suite(const std::string& inject_sign_flip = "");

// Prints one line per check, worst offenders last; returns true iff all pass.
bool report_gradcheck_suite(std::ostream& os, const std::string& inject_sign_flip = "");

}  // namespace mtgan
