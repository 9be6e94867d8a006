#pragma once

namespace ph1d {

// Runs the invariant suite, prints one PASS/FAIL line per check.
// Returns 0 when everything passes, 5 otherwise.
int run_selftest();

}  // namespace ph1d
