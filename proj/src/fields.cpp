#include "beltrami/fields.hpp"

#include <algorithm>
#include <cmath>

#include "beltrami/helical.hpp"
#include "beltrami/operators.hpp"
#include "beltrami/rng.hpp"

namespace beltrami::fields {

using spectral::helical_basis;
using spectral::helical_decompose;

LambdaPair lambda_pair(double alpha, double beta) {
    double disc = (alpha - beta) * (alpha - beta) - 4.0;
    if (disc < 0.0)
        throw ComplexRoots("lambda_pair: (alpha-beta)^2 < 4, characteristic roots are complex");
    double s = alpha + beta;
    double p = 1.0 + alpha * beta;
    double sd = std::sqrt(disc);
    // evaluate the larger-magnitude root by the non-cancelling branch,
    // recover the other from the product
    double big = (s >= 0.0) ? 0.5 * (s + sd) : 0.5 * (s - sd);
    double other = (big != 0.0) ? p / big : 0.5 * (s + (s >= 0.0 ? -sd : sd));
    double l1 = std::max(big, other);
    double l2 = std::min(big, other);
    return {l1, l2};
}

AlphaBeta alpha_beta(double lambda1, double lambda2) {
    double s = lambda1 + lambda2;
    double d = lambda1 - lambda2;
    double sd = std::sqrt(d * d + 4.0);
    double p = lambda1 * lambda2 - 1.0; // alpha * beta
    double big = (s >= 0.0) ? 0.5 * (s + sd) : 0.5 * (s - sd);
    double other = p / big; // |big| >= sqrt... never 0 since sd >= 2 > |s| - |big|
    return {std::max(big, other), std::min(big, other)};
}

bool shell_admissible(int n) {
    if (n <= 0) return false;
    while (n % 4 == 0) n /= 4;
    return n % 8 != 7;
}

std::vector<std::array<int, 3>> shell_vectors(int n) {
    std::vector<std::array<int, 3>> out;
    int r = static_cast<int>(std::sqrt(static_cast<double>(n))) + 1;
    for (int kx = -r; kx <= r; ++kx)
        for (int ky = -r; ky <= r; ++ky)
            for (int kz = -r; kz <= r; ++kz)
                if (kx * kx + ky * ky + kz * kz == n) out.push_back({kx, ky, kz});
    return out;
}

namespace {

// lexicographic positive representative of a +/-k pair
bool is_half_set_rep(const std::array<int, 3>& k) {
    if (k[0] != 0) return k[0] > 0;
    if (k[1] != 0) return k[1] > 0;
    return k[2] > 0;
}

void set_helical_pair(SpectralVectorField& f, const std::array<int, 3>& k, int sign, complexd a) {
    auto b = helical_basis(k[0], k[1], k[2]);
    auto bm = helical_basis(-k[0], -k[1], -k[2]);
    const auto& h = (sign > 0) ? b.plus : b.minus;
    const auto& hm = (sign > 0) ? bm.plus : bm.minus;
    complexd am = -std::conj(a); // reality: h(-k) = -conj(h(k))
    for (int c = 0; c < 3; ++c) {
        f.at_wave(c, k[0], k[1], k[2]) += a * h[c];
        f.at_wave(c, -k[0], -k[1], -k[2]) += am * hm[c];
    }
}

void check_shell_fits(const GridSpec& g, int n) {
    int c = g.dealias_cutoff();
    if (n > 3 * c * c)
        throw ConfigError("shell |k|^2 = " + std::to_string(n) +
                          " exceeds the retained band of an n = " + std::to_string(g.n) + " grid");
}

} // namespace

BeltramiComponent abc_flow(const GridSpec& g, double A, double B, double C, int lambda0) {
    if (lambda0 == 0) throw ConfigError("abc_flow: lambda0 must be a nonzero integer");
    if (std::abs(lambda0) > g.dealias_cutoff())
        throw ConfigError("abc_flow: |lambda0| exceeds the dealias cutoff");

    BeltramiComponent out;
    out.field = SpectralVectorField(g);
    out.shell_n = lambda0 * lambda0;
    out.sign = lambda0 > 0 ? 1 : -1;
    int l = lambda0;

    const complexd ih(0.0, 0.5); // i/2
    // u_x = A sin(l x3) + C cos(l x2)
    out.field.at_wave(0, 0, 0, l) = -ih * A;
    out.field.at_wave(0, 0, 0, -l) = ih * A;
    out.field.at_wave(0, 0, l, 0) = 0.5 * C;
    out.field.at_wave(0, 0, -l, 0) = 0.5 * C;
    // u_y = B sin(l x1) + A cos(l x3)
    out.field.at_wave(1, l, 0, 0) = -ih * B;
    out.field.at_wave(1, -l, 0, 0) = ih * B;
    out.field.at_wave(1, 0, 0, l) = 0.5 * A;
    out.field.at_wave(1, 0, 0, -l) = 0.5 * A;
    // u_z = C sin(l x2) + B cos(l x1)
    out.field.at_wave(2, 0, l, 0) = -ih * C;
    out.field.at_wave(2, 0, -l, 0) = ih * C;
    out.field.at_wave(2, l, 0, 0) = 0.5 * B;
    out.field.at_wave(2, -l, 0, 0) = 0.5 * B;
    return out;
}

BeltramiComponent shell_field(const GridSpec& g, int n, int sign, std::uint64_t seed,
                              double norm_target) {
    if (sign != 1 && sign != -1) throw ConfigError("shell_field: sign must be +1 or -1");
    if (!shell_admissible(n))
        throw EmptyShell("shell_field: no lattice vectors with |k|^2 = " + std::to_string(n));
    check_shell_fits(g, n);

    auto vecs = shell_vectors(n);
    BeltramiComponent out;
    out.field = SpectralVectorField(g);
    out.shell_n = n;
    out.sign = sign;

    GaussianRng rng(seed);
    for (const auto& k : vecs) {
        if (!is_half_set_rep(k)) continue;
        set_helical_pair(out.field, k, sign, rng.complex_normal());
    }
    if (norm_target > 0.0) {
        double cur = spectral::norm(out.field);
        if (cur > 0.0) out.field.scale(norm_target / cur);
    }
    return out;
}

BeltramiComponent shell_field_explicit(const GridSpec& g, int n, int sign,
                                       const std::map<std::array<int, 3>, complexd>& amplitudes) {
    if (sign != 1 && sign != -1) throw ConfigError("shell_field_explicit: sign must be +1 or -1");
    if (!shell_admissible(n))
        throw EmptyShell("shell_field_explicit: no lattice vectors with |k|^2 = " + std::to_string(n));
    check_shell_fits(g, n);

    BeltramiComponent out;
    out.field = SpectralVectorField(g);
    out.shell_n = n;
    out.sign = sign;
    for (const auto& [k, a] : amplitudes) {
        if (k[0] * k[0] + k[1] * k[1] + k[2] * k[2] != n)
            throw ConfigError("shell_field_explicit: wavevector off the requested shell");
        if (!is_half_set_rep(k))
            throw ConfigError("shell_field_explicit: provide the lexicographically positive "
                              "representative of each +/-k pair");
        set_helical_pair(out.field, k, sign, a);
    }
    return out;
}

BeltramiComponent mean_component(const GridSpec& g, const std::array<double, 3>& value) {
    BeltramiComponent out;
    out.field = SpectralVectorField(g);
    out.field.set_mean(value);
    out.shell_n = 0;
    out.sign = 0;
    return out;
}

SpectralVectorField random_solenoidal(const GridSpec& g, int kmax2, std::uint64_t seed,
                                      double norm_target) {
    SpectralVectorField out(g);
    GaussianRng rng(seed);
    int r = static_cast<int>(std::sqrt(static_cast<double>(kmax2)));
    for (int kx = -r; kx <= r; ++kx)
        for (int ky = -r; ky <= r; ++ky)
            for (int kz = -r; kz <= r; ++kz) {
                int k2 = kx * kx + ky * ky + kz * kz;
                if (k2 == 0 || k2 > kmax2) continue;
                std::array<int, 3> k = {kx, ky, kz};
                if (!is_half_set_rep(k)) continue;
                set_helical_pair(out, k, +1, rng.complex_normal());
                set_helical_pair(out, k, -1, rng.complex_normal());
            }
    if (norm_target > 0.0) {
        double cur = spectral::norm(out);
        if (cur > 0.0) out.scale(norm_target / cur);
    }
    return out;
}

namespace {

void check_eigenfield(const BeltramiComponent& c) {
    double nrm = spectral::norm(c.field);
    if (nrm == 0.0) return; // zero field trivially satisfies the relation
    SpectralVectorField r = spectral::curl_hat(c.field);
    r.axpy(-c.lambda(), c.field);
    double rel = spectral::norm(r) / (nrm * std::max(1.0, std::abs(c.lambda())));
    if (rel > 1e-10)
        throw Error("make_double_beltrami: input is not a curl eigenfield (residual " +
                    std::to_string(rel) + ")");
}

} // namespace

DoubleBeltramiState make_double_beltrami(const BeltramiComponent& c1, const BeltramiComponent& c2) {
    if (c1.field.grid != c2.field.grid) throw SizeMismatch("make_double_beltrami: grids differ");
    double l1 = c1.lambda();
    double l2 = c2.lambda();
    if (l1 < l2) throw Error("make_double_beltrami: requires lambda1 >= lambda2");
    check_eigenfield(c1);
    check_eigenfield(c2);

    auto [alpha, beta] = alpha_beta(l1, l2);
    DoubleBeltramiState st;
    st.alpha = alpha;
    st.beta = beta;
    st.lambda1 = l1;
    st.lambda2 = l2;
    st.degenerate = (l1 == l2);
    st.u = c1.field + c2.field;
    st.B = c1.field;
    st.B.scale(alpha - l1);
    st.B.axpy(alpha - l2, c2.field);
    return st;
}

AlignmentResiduals verify_double_beltrami(const SpectralVectorField& u, const SpectralVectorField& B,
                                          double alpha, double beta) {
    auto rel = [](double num, double den) {
        if (num == 0.0) return 0.0;
        return num / std::max(den, 1e-300);
    };
    SpectralVectorField r1 = spectral::curl_hat(u);
    r1.axpy(1.0, B);
    r1.axpy(-alpha, u);
    SpectralVectorField r2 = spectral::curl_hat(B);
    r2.scale(-1.0);
    r2.axpy(1.0, u);
    r2.axpy(beta, B);
    return {rel(spectral::norm(r1), spectral::norm(u)), rel(spectral::norm(r2), spectral::norm(B))};
}

namespace {

// Energy of the helical amplitudes belonging to eigenvalue lambda: the mean
// mode for lambda = 0, otherwise the sign-matched amplitudes on |k|^2 = n.
double eigenshell_energy(const spectral::HelicalCoefficients& h, double lambda) {
    if (lambda == 0.0) {
        double m2 = h.mean[0] * h.mean[0] + h.mean[1] * h.mean[1] + h.mean[2] * h.mean[2];
        return volume_total() * m2;
    }
    double l2 = lambda * lambda;
    int n = static_cast<int>(std::lround(l2));
    if (std::abs(l2 - n) > 1e-8 || !shell_admissible(n)) return 0.0;
    const auto& amps = (lambda > 0.0) ? h.plus : h.minus;
    double acc = 0.0;
    for_each_mode(h.grid, [&](std::size_t f, int kx, int ky, int kz) {
        if (kx * kx + ky * ky + kz * kz == n) acc += std::norm(amps[f]);
    });
    return volume_total() * acc;
}

} // namespace

Classification classify(const SpectralVectorField& u, const SpectralVectorField& B, double alpha,
                        double beta) {
    auto res = verify_double_beltrami(u, B, alpha, beta);
    if (res.r1 > 1e-8 || res.r2 > 1e-8)
        throw Error("classify: pair fails the alignment equations (residuals " +
                    std::to_string(res.r1) + ", " + std::to_string(res.r2) + ")");

    auto [l1, l2] = lambda_pair(alpha, beta);
    Classification out;
    out.lambda1 = l1;
    out.lambda2 = l2;
    out.degenerate = (l1 == l2);

    auto split = [&](const SpectralVectorField& f, double& s1, double& s2, double& off) {
        double total = spectral::inner(f, f);
        if (total == 0.0) {
            s1 = s2 = off = 0.0;
            return;
        }
        auto h = helical_decompose(f);
        double e1 = eigenshell_energy(h, l1);
        double e2 = out.degenerate ? 0.0 : eigenshell_energy(h, l2);
        s1 = e1 / total;
        s2 = e2 / total;
        off = std::max(0.0, 1.0 - s1 - s2);
    };
    split(u, out.u_frac_shell1, out.u_frac_shell2, out.u_frac_offshell);
    split(B, out.B_frac_shell1, out.B_frac_shell2, out.B_frac_offshell);
    return out;
}

} // namespace beltrami::fields
