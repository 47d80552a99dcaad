#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "beltrami/field.hpp"

namespace beltrami::fields {

/// Roots of lambda^2 - (alpha+beta) lambda + (1 + alpha beta) = 0, ordered
/// lambda1 >= lambda2. Throws ComplexRoots when (alpha-beta)^2 < 4; the
/// boundary (alpha-beta)^2 = 4 is accepted exactly and gives a double root.
struct LambdaPair {
    double lambda1;
    double lambda2;
};
LambdaPair lambda_pair(double alpha, double beta);

/// Inverse map: (alpha, beta) = ((l1+l2) +/- sqrt((l1-l2)^2 + 4)) / 2 with
/// alpha >= beta. Defined for every real pair.
struct AlphaBeta {
    double alpha;
    double beta;
};
AlphaBeta alpha_beta(double lambda1, double lambda2);

/// True if some integer vector satisfies |k|^2 = n (Legendre: false exactly
/// for n = 4^a (8b + 7)).
bool shell_admissible(int n);

/// All lattice vectors with |k|^2 = n.
std::vector<std::array<int, 3>> shell_vectors(int n);

/// A curl eigenfield together with its eigenvalue bookkeeping:
/// lambda = sign * sqrt(shell_n); shell_n = 0 with sign 0 denotes a constant
/// (mean-mode) component with lambda = 0.
struct BeltramiComponent {
    SpectralVectorField field;
    int shell_n = 0;
    int sign = 0;

    double lambda() const { return sign * std::sqrt(static_cast<double>(shell_n)); }
};

/// Arnold-Beltrami-Childress flow at wavenumber lambda0 (integer, nonzero):
///   u = (A sin l x3 + C cos l x2, B sin l x1 + A cos l x3, C sin l x2 + B cos l x1)
/// satisfies curl u = lambda0 u and |u|_{L2}^2 = (2 pi)^3 (A^2 + B^2 + C^2).
BeltramiComponent abc_flow(const GridSpec& g, double A, double B, double C, int lambda0);

/// Random eigenfield on the shell |k|^2 = n with curl u = sign sqrt(n) u.
/// Amplitudes are seeded complex Gaussians, conjugate-mirrored for reality,
/// then scaled so that the L2 norm equals norm_target (skipped if <= 0).
BeltramiComponent shell_field(const GridSpec& g, int n, int sign, std::uint64_t seed,
                              double norm_target = 1.0);

/// Same, but with explicit helical amplitudes per wavevector. Each key must
/// lie on the shell; the mirror amplitude at -k is filled in automatically.
BeltramiComponent shell_field_explicit(const GridSpec& g, int n, int sign,
                                       const std::map<std::array<int, 3>, complexd>& amplitudes);

/// Constant (harmonic) component with lambda = 0.
BeltramiComponent mean_component(const GridSpec& g, const std::array<double, 3>& value);

/// Mean-zero solenoidal field with Gaussian helical amplitudes on all modes
/// with 0 < |k|^2 <= kmax2, scaled to the given L2 norm (skipped if <= 0).
SpectralVectorField random_solenoidal(const GridSpec& g, int kmax2, std::uint64_t seed,
                                      double norm_target = 1.0);

/// An aligned pair: B + curl u = alpha u and u - curl B = -beta B.
struct DoubleBeltramiState {
    SpectralVectorField u;
    SpectralVectorField B;
    double alpha = 0.0;
    double beta = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    bool degenerate = false;
};

/// Build the aligned pair from two eigenfields (lambda1 >= lambda2 required):
/// u = u1 + u2, B = (alpha - lambda1) u1 + (alpha - lambda2) u2 with
/// (alpha, beta) = alpha_beta(lambda1, lambda2). Inputs are checked for the
/// eigenfield property to 1e-10 relative.
DoubleBeltramiState make_double_beltrami(const BeltramiComponent& c1, const BeltramiComponent& c2);

/// Relative residuals of the two alignment equations,
///   r1 = |B + curl u - alpha u| / |u|,  r2 = |u - curl B + beta B| / |B|,
/// with the 0/0 case defined as 0.
struct AlignmentResiduals {
    double r1;
    double r2;
};
AlignmentResiduals verify_double_beltrami(const SpectralVectorField& u, const SpectralVectorField& B,
                                          double alpha, double beta);

/// Shell-membership certificate for a verified aligned pair: L2 energy
/// fractions of u and B on the lambda1 and lambda2 eigenshells (matching
/// helical sign; lambda = 0 means the mean mode) and the off-shell remainder.
struct Classification {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    bool degenerate = false;
    double u_frac_shell1 = 0.0;
    double u_frac_shell2 = 0.0;
    double u_frac_offshell = 0.0;
    double B_frac_shell1 = 0.0;
    double B_frac_shell2 = 0.0;
    double B_frac_offshell = 0.0;
};
Classification classify(const SpectralVectorField& u, const SpectralVectorField& B, double alpha,
                        double beta);

} // namespace beltrami::fields
