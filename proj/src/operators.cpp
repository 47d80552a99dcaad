#include "beltrami/operators.hpp"

#include <cmath>

namespace beltrami::spectral {

namespace {
constexpr double kSolenoidalTol = 1e-10; // relative to the largest coefficient
}

SpectralVectorField curl_hat(const SpectralVectorField& u) {
    SpectralVectorField out(u.grid);
    for_each_mode(u.grid, [&](std::size_t f, int kx, int ky, int kz) {
        const complexd ux = u.comp[0][f], uy = u.comp[1][f], uz = u.comp[2][f];
        const complexd i(0.0, 1.0);
        out.comp[0][f] = i * (double(ky) * uz - double(kz) * uy);
        out.comp[1][f] = i * (double(kz) * ux - double(kx) * uz);
        out.comp[2][f] = i * (double(kx) * uy - double(ky) * ux);
    });
    return out;
}

SpectralVectorField leray_project(const SpectralVectorField& u) {
    SpectralVectorField out = u;
    for_each_mode(u.grid, [&](std::size_t f, int kx, int ky, int kz) {
        double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) return; // mean passes through
        complexd kdotu = double(kx) * out.comp[0][f] + double(ky) * out.comp[1][f] +
                         double(kz) * out.comp[2][f];
        complexd s = kdotu / k2;
        out.comp[0][f] -= double(kx) * s;
        out.comp[1][f] -= double(ky) * s;
        out.comp[2][f] -= double(kz) * s;
    });
    return out;
}

SpectralVectorField invert_curl(const SpectralVectorField& b) {
    double scale = max_coefficient(b);
    double mean_mag = std::hypot(b.comp[0][0].real(), b.comp[1][0].real(), b.comp[2][0].real());
    if (mean_mag > kSolenoidalTol * std::max(scale, 1e-300))
        throw NonzeroMean("invert_curl: field has a nonzero mean, no periodic potential");
    if (divergence_linf(b) > kSolenoidalTol * std::max(scale, 1e-300) * b.grid.n)
        throw NotSolenoidal("invert_curl: field is not divergence-free");

    SpectralVectorField out(b.grid);
    for_each_mode(b.grid, [&](std::size_t f, int kx, int ky, int kz) {
        double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) return;
        const complexd bx = b.comp[0][f], by = b.comp[1][f], bz = b.comp[2][f];
        const complexd i(0.0, 1.0);
        out.comp[0][f] = i * (double(ky) * bz - double(kz) * by) / k2;
        out.comp[1][f] = i * (double(kz) * bx - double(kx) * bz) / k2;
        out.comp[2][f] = i * (double(kx) * by - double(ky) * bx) / k2;
    });
    return out;
}

bool retained(const GridSpec& g, int kx, int ky, int kz) {
    int c = g.dealias_cutoff();
    return std::abs(kx) <= c && std::abs(ky) <= c && std::abs(kz) <= c;
}

void dealias_scalar(const GridSpec& g, std::vector<complexd>& s) {
    for_each_mode(g, [&](std::size_t f, int kx, int ky, int kz) {
        if (!retained(g, kx, ky, kz)) s[f] = complexd(0.0, 0.0);
    });
}

void dealias(SpectralVectorField& u) {
    for (int c = 0; c < 3; ++c) dealias_scalar(u.grid, u.comp[c]);
}

double inner(const SpectralVectorField& u, const SpectralVectorField& v) {
    if (u.grid != v.grid) throw SizeMismatch("inner: grids differ");
    double acc = 0.0;
    for (int c = 0; c < 3; ++c) {
        const auto& a = u.comp[c];
        const auto& b = v.comp[c];
        for (std::size_t i = 0; i < a.size(); ++i)
            acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    }
    return volume_total() * acc;
}

double norm(const SpectralVectorField& u) { return std::sqrt(std::max(0.0, inner(u, u))); }

double homogeneous_sobolev_sq(const SpectralVectorField& u, double s) {
    double acc = 0.0;
    for_each_mode(u.grid, [&](std::size_t f, int kx, int ky, int kz) {
        double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) return;
        double mag2 = std::norm(u.comp[0][f]) + std::norm(u.comp[1][f]) + std::norm(u.comp[2][f]);
        acc += std::pow(k2, s) * mag2; // |k|^{2s} weight
    });
    return volume_total() * acc;
}

double sobolev_norm(const SpectralVectorField& u, double s) {
    double mean2 = 0.0;
    for (int c = 0; c < 3; ++c) mean2 += std::norm(u.comp[c][0]);
    if (s < 0.0) {
        double scale = max_coefficient(u);
        if (std::sqrt(mean2) > kSolenoidalTol * std::max(scale, 1e-300))
            throw NonzeroMean("sobolev_norm: s < 0 requires a mean-free field");
        mean2 = 0.0;
    }
    double total = homogeneous_sobolev_sq(u, s) + (s >= 0.0 ? volume_total() * mean2 : 0.0);
    return std::sqrt(std::max(0.0, total));
}

double divergence_linf(const SpectralVectorField& u) {
    double worst = 0.0;
    for_each_mode(u.grid, [&](std::size_t f, int kx, int ky, int kz) {
        complexd d = double(kx) * u.comp[0][f] + double(ky) * u.comp[1][f] +
                     double(kz) * u.comp[2][f];
        worst = std::max(worst, std::abs(d));
    });
    return worst;
}

double reality_defect(const SpectralVectorField& u) {
    double worst = 0.0;
    const GridSpec& g = u.grid;
    for_each_mode(g, [&](std::size_t f, int kx, int ky, int kz) {
        // skip modes whose mirror is themselves or not representable (Nyquist)
        if (g.n % 2 == 0 && (kx == -g.n / 2 || ky == -g.n / 2 || kz == -g.n / 2)) return;
        std::size_t fm = g.flat_of_wave(-kx, -ky, -kz);
        for (int c = 0; c < 3; ++c)
            worst = std::max(worst, std::abs(u.comp[c][fm] - std::conj(u.comp[c][f])));
    });
    return worst;
}

void enforce_reality(SpectralVectorField& u) {
    const GridSpec& g = u.grid;
    for_each_mode(g, [&](std::size_t f, int kx, int ky, int kz) {
        if (g.n % 2 == 0 && (kx == -g.n / 2 || ky == -g.n / 2 || kz == -g.n / 2)) {
            // Nyquist planes have no mirror partner; dealiasing keeps them zero,
            // and zero is conjugate-symmetric.
            return;
        }
        std::size_t fm = g.flat_of_wave(-kx, -ky, -kz);
        if (fm < f) return; // handle each pair once
        for (int c = 0; c < 3; ++c) {
            if (fm == f) {
                u.comp[c][f] = complexd(u.comp[c][f].real(), 0.0);
            } else {
                complexd avg = 0.5 * (u.comp[c][f] + std::conj(u.comp[c][fm]));
                u.comp[c][f] = avg;
                u.comp[c][fm] = std::conj(avg);
            }
        }
    });
}

double max_coefficient(const SpectralVectorField& u) {
    double worst = 0.0;
    for (const auto& cv : u.comp)
        for (const auto& z : cv) worst = std::max(worst, std::abs(z));
    return worst;
}

bool all_finite(const SpectralVectorField& u) {
    for (const auto& cv : u.comp)
        for (const auto& z : cv)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

} // namespace beltrami::spectral
