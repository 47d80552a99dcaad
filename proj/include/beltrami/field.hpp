#pragma once

#include <array>
#include <complex>
#include <vector>

#include "beltrami/grid.hpp"

namespace beltrami {

using complexd = std::complex<double>;

/// Vector field in spectral representation: three full cubes of Fourier
/// coefficients (one per component) on a GridSpec. The k = 0 entry holds the
/// mean; real fields satisfy uhat(-k) = conj(uhat(k)).
struct SpectralVectorField {
    GridSpec grid;
    std::array<std::vector<complexd>, 3> comp;

    SpectralVectorField() = default;
    explicit SpectralVectorField(const GridSpec& g) : grid(g) {
        for (auto& c : comp) c.assign(g.size(), complexd(0.0, 0.0));
    }

    complexd& at(int c, std::size_t flat) { return comp[c][flat]; }
    const complexd& at(int c, std::size_t flat) const { return comp[c][flat]; }

    /// Coefficient of component c at wavevector (kx, ky, kz).
    complexd& at_wave(int c, int kx, int ky, int kz) {
        return comp[c][grid.flat_of_wave(kx, ky, kz)];
    }
    const complexd& at_wave(int c, int kx, int ky, int kz) const {
        return comp[c][grid.flat_of_wave(kx, ky, kz)];
    }

    /// Mean (k = 0) component as a real 3-vector.
    std::array<double, 3> mean() const {
        return {comp[0][0].real(), comp[1][0].real(), comp[2][0].real()};
    }

    void set_mean(const std::array<double, 3>& m) {
        for (int c = 0; c < 3; ++c) comp[c][0] = complexd(m[c], 0.0);
    }

    void scale(double s) {
        for (auto& cv : comp)
            for (auto& z : cv) z *= s;
    }

    /// this += s * other
    void axpy(double s, const SpectralVectorField& other) {
        if (grid != other.grid) throw SizeMismatch("axpy: grids differ");
        for (int c = 0; c < 3; ++c) {
            const auto& src = other.comp[c];
            auto& dst = comp[c];
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += s * src[i];
        }
    }

    void zero() {
        for (auto& cv : comp)
            for (auto& z : cv) z = complexd(0.0, 0.0);
    }
};

inline SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) {
    a.axpy(1.0, b);
    return a;
}

inline SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) {
    a.axpy(-1.0, b);
    return a;
}

inline SpectralVectorField operator*(double s, SpectralVectorField a) {
    a.scale(s);
    return a;
}

/// Vector field sampled on the physical grid, same layout as the spectral cube.
struct RealVectorField {
    GridSpec grid;
    std::array<std::vector<double>, 3> comp;

    RealVectorField() = default;
    explicit RealVectorField(const GridSpec& g) : grid(g) {
        for (auto& c : comp) c.assign(g.size(), 0.0);
    }
};

} // namespace beltrami
