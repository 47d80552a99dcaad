#include "beltrami/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beltrami/fields.hpp"
#include "beltrami/helical.hpp"
#include "beltrami/operators.hpp"

namespace beltrami::variational {

using spectral::curl_hat;
using spectral::inner;
using spectral::invert_curl;

void flip_helicity(SpectralVectorField& f) {
    auto h = spectral::helical_decompose(f);
    std::swap(h.plus, h.minus);
    f = spectral::helical_recompose(h);
}

namespace {

// joint variable for the two-field problem; u may be frozen (fixed-omega) or
// absent (Woltjer, where it is identically zero)
struct Iterate {
    SpectralVectorField u;
    SpectralVectorField B;
};

// direction in the active subspace
struct Direction {
    SpectralVectorField du; // ignored unless u is active
    SpectralVectorField dB;
};

struct ProblemSpec {
    bool u_active = false;     // u is a variable (joint problem)
    bool two_constraints = false;
    double h1 = 0.0;
    double h2 = 0.0;
};

double pinner(const ProblemSpec& p, const Direction& a, const Direction& b) {
    double acc = inner(a.dB, b.dB);
    if (p.u_active) acc += inner(a.du, b.du);
    return acc;
}

void paxpy(const ProblemSpec& p, Iterate& x, double s, const Direction& d) {
    x.B.axpy(s, d.dB);
    if (p.u_active) x.u.axpy(s, d.du);
}

double h1_value(const Iterate& x) { return inner(invert_curl(x.B), x.B); }

double h2_value(const Iterate& x) {
    // H_B + 2 int u.B + int u.omega
    return h1_value(x) + 2.0 * inner(x.u, x.B) + inner(x.u, curl_hat(x.u));
}

double energy_value(const ProblemSpec& p, const Iterate& x) {
    double e = inner(x.B, x.B);
    if (p.u_active) e += inner(x.u, x.u);
    return e;
}

Direction energy_gradient(const ProblemSpec& p, const Iterate& x) {
    Direction g;
    g.dB = 2.0 * x.B;
    if (p.u_active) g.du = 2.0 * x.u;
    return g;
}

Direction h1_gradient(const ProblemSpec& p, const Iterate& x) {
    Direction g;
    g.dB = 2.0 * invert_curl(x.B);
    if (p.u_active) g.du = SpectralVectorField(x.u.grid);
    return g;
}

Direction h2_gradient(const ProblemSpec& p, const Iterate& x) {
    Direction g;
    g.dB = 2.0 * (invert_curl(x.B) + x.u); // 2 (A + u)
    if (p.u_active) {
        g.du = 2.0 * (x.B + curl_hat(x.u)); // 2 (B + omega)
    }
    return g;
}

struct ConstraintState {
    double g1 = 0.0;
    double g2 = 0.0;
    double scale1 = 1.0;
    double scale2 = 1.0;
};

ConstraintState constraint_values(const ProblemSpec& p, const Iterate& x) {
    ConstraintState c;
    double e = energy_value(p, x);
    c.g1 = h1_value(x) - p.h1;
    c.scale1 = std::max({std::abs(p.h1), e, 1e-6});
    if (p.two_constraints) {
        c.g2 = h2_value(x) - p.h2;
        c.scale2 = std::max({std::abs(p.h2), e, 1e-6});
    }
    return c;
}

// Entry violations below kNoopTol are accepted without taking a step, so
// targets measured externally from the same fields (identical sums, possibly
// associated in a different order) leave the supplied iterate bitwise
// untouched.
constexpr double kNoopTol = 1e-13;

double scaled_violation(const ProblemSpec& p, const ConstraintState& c) {
    double v = std::abs(c.g1) / c.scale1;
    if (p.two_constraints) v = std::max(v, std::abs(c.g2) / c.scale2);
    return v;
}

// Newton restoration along the current constraint-gradient directions. The
// constraints are quadratic, so refreshed linearizations converge fast; the
// loop runs to the machine floor rather than a fixed tolerance because any
// restoration error left in a line-search candidate pollutes its energy and
// caps how far the outer descent can certify stationarity.
bool restore(const ProblemSpec& p, Iterate& x) {
    double viol = scaled_violation(p, constraint_values(p, x));
    if (viol <= kNoopTol) return true;
    for (int it = 0; it < 60; ++it) {
        ConstraintState c = constraint_values(p, x);
        Direction d1 = h1_gradient(p, x);
        if (!p.two_constraints) {
            double j = pinner(p, d1, d1);
            if (j <= 1e-300) return false;
            paxpy(p, x, -c.g1 / j, d1);
        } else {
            Direction d2 = h2_gradient(p, x);
            double j11 = pinner(p, d1, d1);
            double j12 = pinner(p, d1, d2);
            double j22 = pinner(p, d2, d2);
            double det = j11 * j22 - j12 * j12;
            if (std::abs(det) <= 1e-13 * std::max(j11 * j22, 1e-300)) return false;
            double t1 = (-c.g1 * j22 + c.g2 * j12) / det;
            double t2 = (-c.g2 * j11 + c.g1 * j12) / det;
            paxpy(p, x, t1, d1);
            paxpy(p, x, t2, d2);
        }
        double nv = scaled_violation(p, constraint_values(p, x));
        if (nv <= 1e-15) return true;
        if (nv >= viol) return nv <= 1e-9; // stalled at the floor, or diverging
        viol = nv;
    }
    return viol <= 1e-9;
}

struct KktFit {
    double l1 = 0.0;
    double l2 = 0.0;
    double residual = 0.0;  // primary equation, relative
    double residual2 = 0.0; // second equation (joint problem)
};

// least-squares multipliers and relative stationarity residuals
KktFit kkt_fit(const ProblemSpec& p, const Iterate& x) {
    KktFit f;
    SpectralVectorField J = curl_hat(x.B);
    double jn = spectral::norm(J);
    if (!p.two_constraints) {
        // curl B = lambda B
        double bb = inner(x.B, x.B);
        f.l1 = bb > 0.0 ? inner(J, x.B) / bb : 0.0;
        SpectralVectorField r = J - f.l1 * x.B;
        f.residual = jn > 0.0 ? spectral::norm(r) / jn : 0.0;
        return f;
    }
    if (!p.u_active) {
        // curl B - l1 B - l2 (B + omega) = 0, 2x2 normal equations
        SpectralVectorField bw = x.B + curl_hat(x.u);
        double g11 = inner(x.B, x.B);
        double g12 = inner(x.B, bw);
        double g22 = inner(bw, bw);
        double r1 = inner(J, x.B);
        double r2 = inner(J, bw);
        double det = g11 * g22 - g12 * g12;
        if (std::abs(det) > 1e-13 * std::max(g11 * g22, 1e-300)) {
            f.l1 = (r1 * g22 - r2 * g12) / det;
            f.l2 = (r2 * g11 - r1 * g12) / det;
        } else if (g11 > 0.0) { // omega (or the independent part) degenerate
            f.l1 = r1 / g11;
            f.l2 = 0.0;
        }
        SpectralVectorField r = J - f.l1 * x.B - f.l2 * bw;
        f.residual = jn > 0.0 ? spectral::norm(r) / jn : 0.0;
        return f;
    }
    // joint problem: u = l2 (B + omega) and u - J + l1 B = 0
    SpectralVectorField bw = x.B + curl_hat(x.u);
    double bwn2 = inner(bw, bw);
    f.l2 = bwn2 > 0.0 ? inner(x.u, bw) / bwn2 : 0.0;
    SpectralVectorField ra = x.u - f.l2 * bw;
    double un = spectral::norm(x.u);
    f.residual = spectral::norm(ra) / std::max({un, spectral::norm(bw), 1e-300});

    double bb = inner(x.B, x.B);
    SpectralVectorField umj = x.u - J;
    f.l1 = bb > 0.0 ? -inner(umj, x.B) / bb : 0.0;
    SpectralVectorField rb = umj + f.l1 * x.B;
    f.residual2 = spectral::norm(rb) / std::max({jn, un, 1e-300});
    return f;
}

// detects the dependent-constraint situation u = c A(B) and decides
// feasibility via h2 = (1+c)^2 h1
void check_parallel_degeneracy(const ProblemSpec& p, const Iterate& x) {
    double un = spectral::norm(x.u);
    SpectralVectorField A = invert_curl(x.B);
    double an2 = inner(A, A);
    if (un == 0.0 || an2 == 0.0) {
        // omega = 0: the second helicity degenerates to the first
        if (std::abs(p.h2 - p.h1) > 1e-8 * std::max({std::abs(p.h1), std::abs(p.h2), 1e-6}))
            throw InfeasibleTargets("fixed-omega targets infeasible: omega = 0 forces h2 = h1");
        return;
    }
    double c = inner(x.u, A) / an2;
    SpectralVectorField r = x.u - c * A;
    if (spectral::norm(r) <= 1e-8 * un) {
        double expect = (1.0 + c) * (1.0 + c) * p.h1;
        if (std::abs(p.h2 - expect) >
            1e-8 * std::max({std::abs(p.h2), std::abs(expect), 1e-6}))
            throw InfeasibleTargets(
                "fixed-omega targets infeasible: u is proportional to the potential, "
                "which forces h2 = (1+c)^2 h1");
    }
}

MinimizerResult drive(const ProblemSpec& p, Iterate x, const MinimizeOptions& opt) {
    MinimizerResult res;
    if (!restore(p, x)) {
        if (p.two_constraints) check_parallel_degeneracy(p, x);
        throw InfeasibleTargets("constraint restoration failed from the initial iterate");
    }

    double energy = energy_value(p, x);
    double step = 0.1;
    int it = 0;
    bool converged = false;
    if (opt.keep_trace) res.energy_trace.push_back(energy);

    // best stationarity seen so far; adopted at exit when the final iterate is
    // worse (the floor phase can wander)
    Iterate best;
    double best_kkt = std::numeric_limits<double>::infinity();
    int last_improve = 0;
    constexpr int kStallWindow = 300;

    for (; it < opt.max_iters; ++it) {
        KktFit kf = kkt_fit(p, x);
        double kkt = std::max(kf.residual, kf.residual2);
        if (kkt <= opt.kkt_tol) {
            converged = true;
            break;
        }
        if (kkt < best_kkt) {
            if (kkt < 0.99 * best_kkt) last_improve = it;
            best_kkt = kkt;
            best = x;
        }
        if (it - last_improve >= kStallWindow) {
            converged = best_kkt <= 10 * opt.kkt_tol;
            break;
        }

        // tangent-projected steepest descent direction
        Direction gE = energy_gradient(p, x);
        Direction d1 = h1_gradient(p, x);
        Direction d = gE;
        if (!p.two_constraints) {
            double g11 = pinner(p, d1, d1);
            double mu = g11 > 0.0 ? pinner(p, gE, d1) / g11 : 0.0;
            d.dB.scale(-1.0);
            d.dB.axpy(mu, d1.dB);
            if (p.u_active) {
                d.du.scale(-1.0);
                d.du.axpy(mu, d1.du);
            }
        } else {
            Direction d2 = h2_gradient(p, x);
            double g11 = pinner(p, d1, d1);
            double g12 = pinner(p, d1, d2);
            double g22 = pinner(p, d2, d2);
            double b1 = pinner(p, gE, d1);
            double b2 = pinner(p, gE, d2);
            double det = g11 * g22 - g12 * g12;
            double mu1, mu2;
            if (std::abs(det) <= 1e-13 * std::max(g11 * g22, 1e-300)) {
                check_parallel_degeneracy(p, x); // throws when inconsistent
                mu1 = g11 > 0.0 ? b1 / g11 : 0.0;
                mu2 = 0.0;
            } else {
                mu1 = (b1 * g22 - b2 * g12) / det;
                mu2 = (b2 * g11 - b1 * g12) / det;
            }
            d.dB.scale(-1.0);
            d.dB.axpy(mu1, d1.dB);
            d.dB.axpy(mu2, d2.dB);
            if (p.u_active) {
                d.du.scale(-1.0);
                d.du.axpy(mu1, d1.du);
                d.du.axpy(mu2, d2.du);
            }
        }

        double dn2 = pinner(p, d, d);
        double gn2 = pinner(p, gE, gE);
        if (dn2 <= 1e-24 * std::max(gn2, 1e-300)) {
            // projected gradient vanished: first-order point that misses the
            // kkt tolerance only by conditioning
            converged = kkt <= 10 * opt.kkt_tol;
            break;
        }

        // backtracking line search with post-restoration Armijo test; demands
        // below the energy's roundoff degrade to "no increase beyond noise",
        // since near the constrained minimum a step along the projected
        // gradient still sharpens stationarity without a certifiable decrease
        bool accepted = false;
        double s = step;
        for (int ls = 0; ls < 60 && s > 1e-16; ++ls, s *= 0.5) {
            Iterate cand = x;
            paxpy(p, cand, s, d);
            if (!restore(p, cand)) continue;
            double ec = energy_value(p, cand);
            double demand = 1e-4 * s * dn2;
            double slack = 1e-15 * std::max(std::abs(energy), 1.0);
            if (demand > slack ? ec <= energy - demand : ec <= energy + slack) {
                x = std::move(cand);
                energy = ec;
                accepted = true;
                step = std::min(s * 1.5, 1e3);
                break;
            }
        }
        if (!accepted) {
            converged = kkt <= 10 * opt.kkt_tol;
            break;
        }
        if (opt.keep_trace) res.energy_trace.push_back(energy);
    }

    KktFit kf = kkt_fit(p, x);
    if (best_kkt < std::max(kf.residual, kf.residual2)) {
        x = std::move(best);
        kf = kkt_fit(p, x);
        energy = energy_value(p, x);
    }
    ConstraintState c = constraint_values(p, x);
    res.B = std::move(x.B);
    res.u = std::move(x.u);
    res.energy = energy;
    res.multiplier1 = kf.l1;
    res.multiplier2 = kf.l2;
    res.kkt_residual = std::max(kf.residual, kf.residual2);
    res.kkt_residual2 = kf.residual2;
    res.constraint_err1 = std::abs(c.g1) / c.scale1;
    res.constraint_err2 = p.two_constraints ? std::abs(c.g2) / c.scale2 : 0.0;
    res.iters = it;
    res.converged = converged || res.kkt_residual <= opt.kkt_tol;
    return res;
}

SpectralVectorField seeded_iterate(const GridSpec& g, double h_target, int band_k2,
                                   std::uint64_t seed) {
    double amp = std::sqrt(std::max(std::abs(h_target), 1e-3));
    SpectralVectorField B = fields::random_solenoidal(g, band_k2, seed, amp);
    double h = inner(invert_curl(B), B);
    if (h * h_target < 0.0) {
        flip_helicity(B);
        h = -h;
    }
    if (std::abs(h) < 1e-10 * inner(B, B)) {
        // nearly reflectional-symmetric draw: bias with a shell-1 eigenfield
        int sign = h_target >= 0.0 ? 1 : -1;
        B.axpy(1.0, fields::shell_field(g, 1, sign, seed + 17, 0.5 * amp).field);
    }
    return B;
}

} // namespace

MinimizerResult minimize_woltjer(const GridSpec& g, double h1, MinimizeOptions opt) {
    if (h1 == 0.0) throw ConfigError("minimize_woltjer: h1 must be nonzero");
    ProblemSpec p;
    p.u_active = false;
    p.two_constraints = false;
    p.h1 = h1;

    for (int attempt = 0;; ++attempt) {
        Iterate x;
        x.u = SpectralVectorField(g); // identically zero
        x.B = seeded_iterate(g, h1, opt.band_limit_k2, opt.seed + 1000003ULL * attempt);
        try {
            return drive(p, std::move(x), opt);
        } catch (const InfeasibleTargets&) {
            if (attempt >= 4) throw;
        }
    }
}

MinimizerResult minimize_fixed_omega(const SpectralVectorField& omega, double h1, double h2,
                                     MinimizeOptions opt) {
    if (h1 == 0.0) throw ConfigError("minimize_fixed_omega: h1 must be nonzero");
    const GridSpec& g = omega.grid;
    SpectralVectorField u = omega;
    if (spectral::norm(omega) > 0.0) u = invert_curl(omega); // rejects invalid omega
    else u = SpectralVectorField(g);

    ProblemSpec p;
    p.u_active = false;
    p.two_constraints = true;
    p.h1 = h1;
    p.h2 = h2;

    if (spectral::norm(u) == 0.0) {
        // omega = 0 degenerates the second constraint to the first
        if (std::abs(h2 - h1) > 1e-8 * std::max({std::abs(h1), std::abs(h2), 1e-6}))
            throw InfeasibleTargets("fixed-omega targets infeasible: omega = 0 forces h2 = h1");
        MinimizerResult res = minimize_woltjer(g, h1, opt);
        res.u = SpectralVectorField(g);
        return res;
    }

    for (int attempt = 0;; ++attempt) {
        Iterate x;
        x.u = u;
        x.B = seeded_iterate(g, h1, opt.band_limit_k2, opt.seed + 1000003ULL * attempt);
        try {
            return drive(p, std::move(x), opt);
        } catch (const InfeasibleTargets&) {
            if (attempt >= 4) throw;
        }
    }
}

namespace {

// scale a random velocity so that the second helicity hits its target
// analytically: h2 = h1 + 2 c <u0,B> + c^2 <u0,omega0>
SpectralVectorField scaled_velocity_for_h2(const SpectralVectorField& u0,
                                           const SpectralVectorField& B, double h1, double h2) {
    SpectralVectorField u = u0;
    for (int flip = 0; flip < 2; ++flip) {
        double q = inner(u, curl_hat(u));
        double pterm = inner(u, B);
        double c0 = h1 - h2;
        // q c^2 + 2 p c + c0 = 0
        double disc = pterm * pterm - q * c0;
        if (disc >= 0.0 && (q != 0.0 || pterm != 0.0)) {
            double c;
            if (q == 0.0) {
                c = -c0 / (2.0 * pterm);
            } else {
                double root = std::sqrt(disc);
                double big = (pterm >= 0.0) ? -pterm - root : -pterm + root;
                double ca = big / q;
                double cb = (big != 0.0) ? c0 / big : 0.0;
                c = std::abs(ca) < std::abs(cb) ? ca : cb;
                if (ca == 0.0 && cb == 0.0) c = 0.0;
            }
            u.scale(c);
            return u;
        }
        flip_helicity(u); // flips <u, curl u>, making the quadratic solvable
    }
    throw InfeasibleTargets("minimize_full: could not scale the seed velocity to h2");
}

} // namespace

MinimizerResult minimize_full(const GridSpec& g, double h1, double h2, MinimizeOptions opt) {
    if (h1 == 0.0 || h2 == 0.0)
        throw ConfigError("minimize_full: h1 and h2 must both be nonzero");

    ProblemSpec p;
    p.u_active = true;
    p.two_constraints = true;
    p.h1 = h1;
    p.h2 = h2;

    for (int attempt = 0;; ++attempt) {
        std::uint64_t s = opt.seed + 1000003ULL * attempt;
        Iterate x;
        x.B = seeded_iterate(g, h1, opt.band_limit_k2, s);
        // put the first constraint exactly on target before solving for u
        ProblemSpec p1;
        p1.h1 = h1;
        Iterate xb{SpectralVectorField(g), x.B};
        if (!restore(p1, xb)) continue;
        x.B = std::move(xb.B);
        SpectralVectorField u0 =
            fields::random_solenoidal(g, opt.band_limit_k2, s ^ 0x9e3779b97f4a7c15ULL, 1.0);
        try {
            x.u = scaled_velocity_for_h2(u0, x.B, h1, h2);
            return drive(p, std::move(x), opt);
        } catch (const InfeasibleTargets&) {
            if (attempt >= 4) throw;
        }
    }
}

MinimizerResult minimize_full_from(const SpectralVectorField& u0, const SpectralVectorField& B0,
                                   double h1, double h2, MinimizeOptions opt) {
    if (h1 == 0.0 || h2 == 0.0)
        throw ConfigError("minimize_full: h1 and h2 must both be nonzero");
    if (u0.grid != B0.grid) throw SizeMismatch("minimize_full_from: grids differ");
    ProblemSpec p;
    p.u_active = true;
    p.two_constraints = true;
    p.h1 = h1;
    p.h2 = h2;
    Iterate x{u0, B0};
    return drive(p, std::move(x), opt);
}

} // namespace beltrami::variational
