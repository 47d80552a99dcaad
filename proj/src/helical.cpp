#include "beltrami/helical.hpp"

#include <cassert>
#include <cmath>

#include "beltrami/operators.hpp"

namespace beltrami::spectral {

HelicalBasis helical_basis(int kx, int ky, int kz) {
    if (kx == 0 && ky == 0 && kz == 0)
        throw Error("helical_basis: undefined at k = 0");

    double kxd = kx, kyd = ky, kzd = kz;
    double kn = std::sqrt(kxd * kxd + kyd * kyd + kzd * kzd);
    std::array<double, 3> khat = {kxd / kn, kyd / kn, kzd / kn};

    // reference axis: e3 unless k is parallel to it
    std::array<double, 3> a = (kx == 0 && ky == 0) ? std::array<double, 3>{1.0, 0.0, 0.0}
                                                   : std::array<double, 3>{0.0, 0.0, 1.0};

    std::array<double, 3> e = {kyd * a[2] - kzd * a[1], kzd * a[0] - kxd * a[2],
                               kxd * a[1] - kyd * a[0]}; // k x a
    double en = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
    for (double& v : e) v /= en;

    std::array<double, 3> f = {khat[1] * e[2] - khat[2] * e[1], khat[2] * e[0] - khat[0] * e[2],
                               khat[0] * e[1] - khat[1] * e[0]}; // khat x e

    // (e + i f)/sqrt(2) satisfies i k x h = +|k| h with this orientation.
    const double r = 1.0 / std::sqrt(2.0);
    HelicalBasis b;
    for (int c = 0; c < 3; ++c) {
        b.plus[c] = complexd(e[c] * r, f[c] * r);
        b.minus[c] = complexd(e[c] * r, -f[c] * r);
    }

#ifndef NDEBUG
    // eigen-relation check: i k x h+ = +|k| h+
    std::array<complexd, 3> ikxh = {
        complexd(0, 1) * (kyd * b.plus[2] - kzd * b.plus[1]),
        complexd(0, 1) * (kzd * b.plus[0] - kxd * b.plus[2]),
        complexd(0, 1) * (kxd * b.plus[1] - kyd * b.plus[0])};
    for (int c = 0; c < 3; ++c) assert(std::abs(ikxh[c] - kn * b.plus[c]) < 1e-12 * kn);
#endif
    return b;
}

double HelicalCoefficients::energy() const {
    double acc = mean[0] * mean[0] + mean[1] * mean[1] + mean[2] * mean[2];
    for (std::size_t i = 0; i < plus.size(); ++i) acc += std::norm(plus[i]) + std::norm(minus[i]);
    return volume_total() * acc;
}

HelicalCoefficients helical_decompose(const SpectralVectorField& u) {
    double scale = std::max(max_coefficient(u), 1e-300);
    if (divergence_linf(u) > 1e-10 * scale * u.grid.n)
        throw NotSolenoidal("helical_decompose: field has a compressive part");

    HelicalCoefficients out(u.grid);
    out.mean = u.mean();
    for_each_mode(u.grid, [&](std::size_t f, int kx, int ky, int kz) {
        if (kx == 0 && ky == 0 && kz == 0) return;
        HelicalBasis b = helical_basis(kx, ky, kz);
        complexd ap(0, 0), am(0, 0);
        for (int c = 0; c < 3; ++c) {
            ap += u.comp[c][f] * std::conj(b.plus[c]);
            am += u.comp[c][f] * std::conj(b.minus[c]);
        }
        out.plus[f] = ap;
        out.minus[f] = am;
    });
    return out;
}

SpectralVectorField helical_recompose(const HelicalCoefficients& c) {
    SpectralVectorField out(c.grid);
    out.set_mean(c.mean);
    for_each_mode(c.grid, [&](std::size_t f, int kx, int ky, int kz) {
        if (kx == 0 && ky == 0 && kz == 0) return;
        if (c.plus[f] == complexd(0, 0) && c.minus[f] == complexd(0, 0)) return;
        HelicalBasis b = helical_basis(kx, ky, kz);
        for (int cc = 0; cc < 3; ++cc)
            out.comp[cc][f] = c.plus[f] * b.plus[cc] + c.minus[f] * b.minus[cc];
    });
    return out;
}

} // namespace beltrami::spectral
