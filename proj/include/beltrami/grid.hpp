#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "beltrami/errors.hpp"

namespace beltrami {

/// Uniform periodic grid on [-pi, pi]^3 with n points per axis.
///
/// Spectral coefficients use the convention u(x) = sum_k uhat(k) e^{i k x} with
/// integer wavevectors k. Storage is the usual FFT layout: along each axis the
/// index i in [0, n) carries frequency i for i <= n/2 and i - n otherwise, and
/// the flat index is row-major with x slowest: flat = (ix * n + iy) * n + iz.
struct GridSpec {
    int n = 0;

    GridSpec() = default;
    explicit GridSpec(int n_) : n(n_) {
        if (n < 4) throw ConfigError("grid size must be at least 4, got " + std::to_string(n));
    }

    std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }

    /// Largest retained |k_i| per axis under the 2/3 rule.
    int dealias_cutoff() const { return n / 3; }

    /// Frequency carried by axis index i.
    int freq(int i) const { return i <= n / 2 ? i : i - n; }

    /// Axis index carrying frequency k (k in [-n/2, n/2)).
    int index_of(int k) const { return k >= 0 ? k : k + n; }

    std::size_t flat(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * n + iy) * n + iz;
    }

    /// Flat index of wavevector (kx, ky, kz).
    std::size_t flat_of_wave(int kx, int ky, int kz) const {
        return flat(index_of(kx), index_of(ky), index_of(kz));
    }

    /// Grid coordinate of sample index i (x_i = -pi + 2 pi i / n).
    double coord(int i) const { return -M_PI + 2.0 * M_PI * i / n; }

    /// Quadrature weight of one sample, (2 pi / n)^3.
    double cell_volume() const {
        double h = 2.0 * M_PI / n;
        return h * h * h;
    }

    bool operator==(const GridSpec& o) const { return n == o.n; }
    bool operator!=(const GridSpec& o) const { return n != o.n; }
};

/// Iterate all modes, calling f(flat, kx, ky, kz).
template <typename F>
void for_each_mode(const GridSpec& g, F&& f) {
    std::size_t flat = 0;
    for (int ix = 0; ix < g.n; ++ix) {
        int kx = g.freq(ix);
        for (int iy = 0; iy < g.n; ++iy) {
            int ky = g.freq(iy);
            for (int iz = 0; iz < g.n; ++iz, ++flat) {
                f(flat, kx, ky, g.freq(iz));
            }
        }
    }
}

inline double volume_total() {
    double v = 2.0 * M_PI;
    return v * v * v; // (2 pi)^3
}

} // namespace beltrami
