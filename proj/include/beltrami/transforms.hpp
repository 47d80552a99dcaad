#pragma once

#include "beltrami/field.hpp"

namespace beltrami::spectral {

/// Physical samples -> Fourier coefficients (includes the 1/n^3 normalization
/// so that u(x) = sum_k uhat(k) e^{i k x} holds exactly for band-limited data).
SpectralVectorField forward_transform(const RealVectorField& u);

/// Fourier coefficients -> physical samples. Imaginary residue of the samples
/// is discarded; it is at roundoff for conjugate-symmetric input.
RealVectorField inverse_transform(const SpectralVectorField& u);

/// Scalar (single component) versions used by quadrature oracles.
std::vector<complexd> forward_transform_scalar(const GridSpec& g, const std::vector<double>& s);
std::vector<double> inverse_transform_scalar(const GridSpec& g, const std::vector<complexd>& s);

} // namespace beltrami::spectral
