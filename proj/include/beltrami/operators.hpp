#pragma once

#include "beltrami/field.hpp"

namespace beltrami::spectral {

/// curl in spectral space: (curl u)hat(k) = i k x uhat(k). Mean maps to zero.
SpectralVectorField curl_hat(const SpectralVectorField& u);

/// Orthogonal projection onto divergence-free fields:
/// uhat - k (k . uhat) / |k|^2, mean passed through unchanged.
SpectralVectorField leray_project(const SpectralVectorField& u);

/// Mean-zero solenoidal vector potential A with curl A = b:
/// Ahat(k) = i k x bhat(k) / |k|^2. Requires div b = 0 and mean(b) = 0.
SpectralVectorField invert_curl(const SpectralVectorField& b);

/// Zero every mode with any |k_i| > floor(n/3) (2/3 rule), in place.
void dealias(SpectralVectorField& u);
void dealias_scalar(const GridSpec& g, std::vector<complexd>& s);

/// True if all of |k_x|,|k_y|,|k_z| are <= the grid's dealias cutoff.
bool retained(const GridSpec& g, int kx, int ky, int kz);

/// L2 inner product <u, v> = (2 pi)^3 sum_k uhat(k) . conj(vhat(k)), real part.
double inner(const SpectralVectorField& u, const SpectralVectorField& v);

/// L2 norm, sqrt(inner(u, u)).
double norm(const SpectralVectorField& u);

/// Sobolev norm of order s:
///   sqrt( (2 pi)^3 [ sum_{k != 0} |k|^{2s} |uhat|^2 + (mean term if s >= 0) ] ).
/// s < 0 requires a mean-free field.
double sobolev_norm(const SpectralVectorField& u, double s);

/// Homogeneous part only, k = 0 excluded regardless of s. Squared value.
double homogeneous_sobolev_sq(const SpectralVectorField& u, double s);

/// Max |div u| coefficient magnitude, |k . uhat(k)|, over all modes.
double divergence_linf(const SpectralVectorField& u);

/// Max deviation from conjugate symmetry, |uhat(-k) - conj(uhat(k))|.
double reality_defect(const SpectralVectorField& u);

/// Symmetrize coefficients exactly: uhat(k) <- (uhat(k) + conj(uhat(-k))) / 2.
void enforce_reality(SpectralVectorField& u);

/// Largest |uhat| coefficient magnitude (used by finiteness checks).
double max_coefficient(const SpectralVectorField& u);

/// True if every coefficient is finite.
bool all_finite(const SpectralVectorField& u);

} // namespace beltrami::spectral
