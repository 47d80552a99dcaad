#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>

#include "beltrami/errors.hpp"
#include "beltrami/fields.hpp"
#include "beltrami/helical.hpp"
#include "beltrami/operators.hpp"
#include "helpers.hpp"

using namespace beltrami;
using test_helpers::rel_err;

namespace {

std::array<complexd, 3> cross_ik(int kx, int ky, int kz, const std::array<complexd, 3>& v) {
    complexd i(0.0, 1.0);
    return {i * (double(ky) * v[2] - double(kz) * v[1]),
            i * (double(kz) * v[0] - double(kx) * v[2]),
            i * (double(kx) * v[1] - double(ky) * v[0])};
}

complexd dot_conj(const std::array<complexd, 3>& a, const std::array<complexd, 3>& b) {
    complexd s(0.0, 0.0);
    for (int c = 0; c < 3; ++c) s += a[c] * std::conj(b[c]);
    return s;
}

double dist(const std::array<complexd, 3>& a, const std::array<complexd, 3>& b) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s = std::max(s, std::abs(a[c] - b[c]));
    return s;
}

} // namespace

TEST_SUITE("helical") {

    TEST_CASE("basis vectors are orthonormal curl eigenvectors") {
        const int ks[][3] = {{1, 0, 0}, {0, 0, 1}, {0, 0, -2}, {2, -1, 3}, {-1, -1, -1}, {0, 4, 0}};
        for (const auto& k : ks) {
            CAPTURE(k[0]);
            CAPTURE(k[1]);
            CAPTURE(k[2]);
            auto hb = spectral::helical_basis(k[0], k[1], k[2]);
            double kn = std::sqrt(double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));

            CHECK(std::abs(dot_conj(hb.plus, hb.plus) - 1.0) < 1e-14);
            CHECK(std::abs(dot_conj(hb.minus, hb.minus) - 1.0) < 1e-14);
            CHECK(std::abs(dot_conj(hb.plus, hb.minus)) < 1e-14);

            // orthogonal to k
            complexd kp(0, 0), km(0, 0);
            for (int c = 0; c < 3; ++c) {
                kp += double(k[c]) * hb.plus[c];
                km += double(k[c]) * hb.minus[c];
            }
            CHECK(std::abs(kp) < 1e-14);
            CHECK(std::abs(km) < 1e-14);

            // i k x h_pm = +/- |k| h_pm
            auto cp = cross_ik(k[0], k[1], k[2], hb.plus);
            auto cm = cross_ik(k[0], k[1], k[2], hb.minus);
            std::array<complexd, 3> ep, em;
            for (int c = 0; c < 3; ++c) {
                ep[c] = kn * hb.plus[c];
                em[c] = -kn * hb.minus[c];
            }
            CHECK(dist(cp, ep) < 1e-13);
            CHECK(dist(cm, em) < 1e-13);

            // mirror convention h_pm(-k) = -conj(h_pm(k))
            auto hm = spectral::helical_basis(-k[0], -k[1], -k[2]);
            std::array<complexd, 3> mp, mm;
            for (int c = 0; c < 3; ++c) {
                mp[c] = -std::conj(hb.plus[c]);
                mm[c] = -std::conj(hb.minus[c]);
            }
            CHECK(dist(hm.plus, mp) < 1e-14);
            CHECK(dist(hm.minus, mm) < 1e-14);
        }
    }

    TEST_CASE("decompose/recompose roundtrip") {
        GridSpec g{16};
        auto u = fields::random_solenoidal(g, 9, 11, 1.4);
        u.set_mean({0.2, -0.3, 0.5});
        auto hc = spectral::helical_decompose(u);
        CHECK(hc.mean[0] == doctest::Approx(0.2));
        CHECK(hc.mean[2] == doctest::Approx(0.5));
        auto back = spectral::helical_recompose(hc);
        CHECK(rel_err(back, u) < 1e-13);
        CHECK(hc.energy() == doctest::Approx(spectral::inner(u, u)).epsilon(1e-12));
    }

    TEST_CASE("eigenfields occupy a single helicity sign") {
        GridSpec g{16};
        auto plus = fields::shell_field(g, 6, +1, 12, 1.0);
        auto hc = spectral::helical_decompose(plus.field);
        double pn = 0.0, mn = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            pn += std::norm(hc.plus[i]);
            mn += std::norm(hc.minus[i]);
        }
        CHECK(pn > 0.0);
        CHECK(mn < 1e-26 * pn);

        auto minus = fields::shell_field(g, 6, -1, 13, 1.0);
        auto hm = spectral::helical_decompose(minus.field);
        pn = mn = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            pn += std::norm(hm.plus[i]);
            mn += std::norm(hm.minus[i]);
        }
        CHECK(mn > 0.0);
        CHECK(pn < 1e-26 * mn);
    }

    TEST_CASE("reality of amplitudes: a_s(-k) = -conj(a_s(k))") {
        GridSpec g{16};
        auto u = fields::random_solenoidal(g, 9, 14, 1.0);
        auto hc = spectral::helical_decompose(u);
        double worst = 0.0;
        for_each_mode(g, [&](std::size_t f, int kx, int ky, int kz) {
            if (kx == 0 && ky == 0 && kz == 0) return;
            if (!spectral::retained(g, kx, ky, kz)) return;
            std::size_t fm = g.flat_of_wave(-kx, -ky, -kz);
            worst = std::max(worst, std::abs(hc.plus[fm] + std::conj(hc.plus[f])));
            worst = std::max(worst, std::abs(hc.minus[fm] + std::conj(hc.minus[f])));
        });
        CHECK(worst < 1e-13);
    }

    TEST_CASE("compressive input is rejected") {
        GridSpec g{8};
        SpectralVectorField f(g);
        f.at_wave(0, 1, 0, 0) = complexd(1.0, 0.0); // k . u = 1
        f.at_wave(0, -1, 0, 0) = complexd(1.0, 0.0);
        CHECK_THROWS_AS(spectral::helical_decompose(f), NotSolenoidal);
    }
}
