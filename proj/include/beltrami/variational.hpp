#pragma once

#include <cstdint>
#include <vector>

#include "beltrami/field.hpp"

namespace beltrami::variational {

struct MinimizeOptions {
    int max_iters = 100000;
    double kkt_tol = 1e-7;      // stop when the stationarity residual is below this
    std::uint64_t seed = 1;
    int band_limit_k2 = 9;      // band limit of the random initial iterate
    bool keep_trace = false;    // record energy after each accepted iteration
};

struct MinimizerResult {
    SpectralVectorField B;
    SpectralVectorField u;          // the fixed or optimized velocity (empty for Woltjer)
    double energy = 0.0;
    double multiplier1 = 0.0;       // lambda (Woltjer) or lambda_1
    double multiplier2 = 0.0;       // lambda_2 where applicable
    double kkt_residual = 0.0;      // relative stationarity residual (max over equations)
    double kkt_residual2 = 0.0;     // second equation of the joint problem
    double constraint_err1 = 0.0;   // relative constraint violations at the returned iterate
    double constraint_err2 = 0.0;
    int iters = 0;
    bool converged = false;
    std::vector<double> energy_trace;
};

/// Minimize |B|^2 over mean-free solenoidal B subject to int A.B = h1.
/// Stationarity: curl B = lambda B; the minimum is |h1| on the |lambda| = 1
/// shell. h1 must be nonzero.
MinimizerResult minimize_woltjer(const GridSpec& g, double h1, MinimizeOptions opt = {});

/// Minimize |B|^2 at frozen vorticity omega = curl u subject to
/// int A.B = h1 and int (A+u).(B+omega) = h2. Stationarity:
/// curl B - lambda_1 B - lambda_2 (B + omega) = 0. Throws InfeasibleTargets
/// when the two targets are inconsistent (e.g. omega = 0 with h2 != h1, or
/// u proportional to the iterate's potential with h2 != (1+c)^2 h1).
MinimizerResult minimize_fixed_omega(const SpectralVectorField& omega, double h1, double h2,
                                     MinimizeOptions opt = {});

/// Joint descent of |u|^2 + |B|^2 over (u, B) under the same two helicity
/// constraints. Stationarity: u = lambda_2 (B + omega), u - curl B = -lambda_1 B.
/// Best-effort: monotone descent with first-order certification; a compactness
/// proof is not available for this functional.
MinimizerResult minimize_full(const GridSpec& g, double h1, double h2, MinimizeOptions opt = {});

/// Same, starting from a supplied iterate (restored onto the constraints
/// before descending). Used to certify stationarity of constructed states.
MinimizerResult minimize_full_from(const SpectralVectorField& u0, const SpectralVectorField& B0,
                                   double h1, double h2, MinimizeOptions opt = {});

/// Swap the two helical amplitude families of a mean-free solenoidal field:
/// preserves energy, flips magnetic helicity sign exactly.
void flip_helicity(SpectralVectorField& f);

} // namespace beltrami::variational
