#pragma once

#include "beltrami/field.hpp"

namespace beltrami::spectral {

/// Orthonormal curl eigenvectors at a single wavevector k != 0:
/// i k x h_pm = (+/-)|k| h_pm, <h_s, h_s'> = delta_ss', both orthogonal to k.
///
/// Construction (deterministic): e = normalize(k x a) with a = e3, or a = e1
/// when k is parallel to e3; f = khat x e; h_pm = (e +/- i f) / sqrt(2).
/// With this choice h_pm(-k) = -conj(h_pm(k)), so a real field has helical
/// amplitudes satisfying a_s(-k) = -conj(a_s(k)) for each sign s separately.
struct HelicalBasis {
    std::array<complexd, 3> plus;
    std::array<complexd, 3> minus;
};

HelicalBasis helical_basis(int kx, int ky, int kz);

/// Helical amplitudes of a solenoidal field: full cubes of a_plus, a_minus
/// (zero at k = 0) plus the mean vector kept separately.
struct HelicalCoefficients {
    GridSpec grid;
    std::vector<complexd> plus;
    std::vector<complexd> minus;
    std::array<double, 3> mean{0.0, 0.0, 0.0};

    HelicalCoefficients() = default;
    explicit HelicalCoefficients(const GridSpec& g)
        : grid(g), plus(g.size(), complexd(0, 0)), minus(g.size(), complexd(0, 0)) {}

    /// (2 pi)^3 (sum |a_+|^2 + |a_-|^2 + |mean|^2), equals the L2 energy.
    double energy() const;
};

/// Decompose a solenoidal field onto the helical basis. Throws NotSolenoidal
/// if a compressive residual remains.
HelicalCoefficients helical_decompose(const SpectralVectorField& u);

/// Rebuild the field, sum_k (a_+ h_+ + a_- h_-) e^{ikx} + mean.
SpectralVectorField helical_recompose(const HelicalCoefficients& c);

} // namespace beltrami::spectral
