#pragma once

#include <string>
#include <vector>

namespace beltrami::verify {

/// Outcome of one acceptance check.
struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;   // measured numbers vs thresholds
    double seconds = 0.0; // wall time of the check
};

/// The individual checks. Each is self-contained (fixed seeds and sizes),
/// deterministic, and enforces its own runtime budget where one is declared.
CheckResult check_eigenvalue_algebra();     // lambda <-> (alpha, beta) round trip + gate
CheckResult check_abc_eigenfields();        // ABC flows are curl eigenfields
CheckResult check_classification();         // constructed states sit on their shells
CheckResult check_exact_two_shell();        // solver vs closed form, distinct lambdas + order probe
CheckResult check_exact_degenerate();       // solver vs closed form, equal lambdas + corrector
CheckResult check_decay_rate();             // fitted energy decay matches 2 nu lambda_min^2
CheckResult check_ideal_invariants();       // E, H_B, H_{B+omega} drift at nu = eta = 0
CheckResult check_woltjer_minimizer();      // single-helicity minimum = |h1| at |lambda| = 1
CheckResult check_double_helicity_minimizer(); // two-constraint round trip
CheckResult check_perturbation_decay();     // perturbed aligned state relaxes monotonically
CheckResult check_deviation_boundedness();  // Phi/Psi H^{1/2} stays bounded for nu != eta

/// Named groups of checks for the CLI.
std::vector<std::string> suite_names();
std::vector<CheckResult> run_suite(const std::string& name);

/// All checks in report order.
std::vector<CheckResult> run_all();

/// Thread budget for running independent checks concurrently; reads the
/// BELTRAMI_LAB_THREADS environment variable, default 1 (sequential).
int thread_budget();

} // namespace beltrami::verify
