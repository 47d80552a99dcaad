#include "beltrami/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "beltrami/operators.hpp"
#include "beltrami/transforms.hpp"

namespace beltrami::dynamics {

using spectral::curl_hat;
using spectral::dealias_scalar;
using spectral::forward_transform_scalar;
using spectral::inverse_transform_scalar;
using spectral::leray_project;

namespace {

using Samples = std::array<std::vector<double>, 3>;

Samples to_physical(const SpectralVectorField& f) {
    Samples out;
    for (int c = 0; c < 3; ++c) out[c] = inverse_transform_scalar(f.grid, f.comp[c]);
    return out;
}

// pointwise a x b on the grid
Samples cross(const Samples& a, const Samples& b, std::size_t size) {
    Samples out;
    for (auto& c : out) c.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
        out[0][i] = a[1][i] * b[2][i] - a[2][i] * b[1][i];
        out[1][i] = a[2][i] * b[0][i] - a[0][i] * b[2][i];
        out[2][i] = a[0][i] * b[1][i] - a[1][i] * b[0][i];
    }
    return out;
}

SpectralVectorField to_spectral_dealiased(const GridSpec& g, const Samples& s) {
    SpectralVectorField out(g);
    for (int c = 0; c < 3; ++c) {
        out.comp[c] = forward_transform_scalar(g, s[c]);
        dealias_scalar(g, out.comp[c]);
    }
    return out;
}

void add_diffusion(const SimState& s, Tendencies& rhs) {
    const GridSpec& g = s.grid();
    for_each_mode(g, [&](std::size_t f, int kx, int ky, int kz) {
        double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
        if (k2 == 0.0) return;
        for (int c = 0; c < 3; ++c) {
            rhs.du.comp[c][f] -= s.params.nu * k2 * s.u.comp[c][f];
            rhs.dB.comp[c][f] -= s.params.eta * k2 * s.B.comp[c][f];
        }
    });
}

} // namespace

Tendencies hall_rhs(const SimState& s, bool nonlinear) {
    const GridSpec& g = s.grid();
    Tendencies rhs{SpectralVectorField(g), SpectralVectorField(g)};
    if (nonlinear) {
        SpectralVectorField omega_hat = curl_hat(s.u);
        SpectralVectorField j_hat = curl_hat(s.B);

        Samples u = to_physical(s.u);
        Samples om = to_physical(omega_hat);
        Samples B = to_physical(s.B);
        Samples J = to_physical(j_hat);

        std::size_t sz = g.size();
        SpectralVectorField w_omu = to_spectral_dealiased(g, cross(om, u, sz)); // omega x u
        SpectralVectorField w_jb = to_spectral_dealiased(g, cross(J, B, sz));   // J x B
        SpectralVectorField w_bu = to_spectral_dealiased(g, cross(B, u, sz));   // B x u

        // momentum: P[J x B - omega x u]
        w_jb.axpy(-1.0, w_omu);
        rhs.du = leray_project(w_jb);
        for (int c = 0; c < 3; ++c) rhs.du.comp[c][0] = complexd(0.0, 0.0); // mean-free

        // induction: -curl(B x u) - h curl(J x B); recover J x B from the sum
        w_jb.axpy(1.0, w_omu); // back to F[J x B]
        w_bu.axpy(s.params.hall, w_jb);
        rhs.dB = curl_hat(w_bu);
        rhs.dB.scale(-1.0);
    }
    add_diffusion(s, rhs);
    return rhs;
}

namespace {

// cached per-mode exponential factors e^{-c k^2 dt} for the current (n, nu, eta, dt)
struct IfFactors {
    int n = -1;
    double nu = 0.0, eta = 0.0, dt = 0.0;
    std::vector<double> u_half, u_full, b_half, b_full;

    void ensure(const GridSpec& g, double nu_, double eta_, double dt_) {
        if (n == g.n && nu == nu_ && eta == eta_ && dt == dt_) return;
        n = g.n;
        nu = nu_;
        eta = eta_;
        dt = dt_;
        u_half.resize(g.size());
        u_full.resize(g.size());
        b_half.resize(g.size());
        b_full.resize(g.size());
        for_each_mode(g, [&](std::size_t f, int kx, int ky, int kz) {
            double k2 = double(kx) * kx + double(ky) * ky + double(kz) * kz;
            u_half[f] = std::exp(-nu_ * k2 * 0.5 * dt_);
            u_full[f] = std::exp(-nu_ * k2 * dt_);
            b_half[f] = std::exp(-eta_ * k2 * 0.5 * dt_);
            b_full[f] = std::exp(-eta_ * k2 * dt_);
        });
    }
};

thread_local IfFactors g_factors;

void apply_factors(SpectralVectorField& u, const std::vector<double>& fu, SpectralVectorField& B,
                   const std::vector<double>& fb) {
    for (int c = 0; c < 3; ++c) {
        for (std::size_t i = 0; i < fu.size(); ++i) {
            u.comp[c][i] *= fu[i];
            B.comp[c][i] *= fb[i];
        }
    }
}

// pair (u, B) as one RK4 variable
struct UB {
    SpectralVectorField u, B;
};

UB scaled_sum(const UB& y, double a, const Tendencies& k) {
    UB out = y;
    out.u.axpy(a, k.du);
    out.B.axpy(a, k.dB);
    return out;
}

} // namespace

void step(SimState& s, double dt, bool nonlinear) {
    const GridSpec& g = s.grid();
    g_factors.ensure(g, s.params.nu, s.params.eta, dt);
    const auto& F = g_factors;

    // non-diffusive part of the tendencies; diffusion is handled by the factors
    auto N = [&](const SpectralVectorField& u, const SpectralVectorField& B) {
        SimState tmp;
        tmp.t = s.t;
        tmp.params = s.params;
        tmp.params.nu = 0.0;
        tmp.params.eta = 0.0;
        tmp.u = u;
        tmp.B = B;
        return hall_rhs(tmp, nonlinear);
    };

    UB y{s.u, s.B};

    Tendencies k1 = N(y.u, y.B);

    UB s2 = scaled_sum(y, 0.5 * dt, k1);
    apply_factors(s2.u, F.u_half, s2.B, F.b_half);
    Tendencies k2 = N(s2.u, s2.B);

    UB s3 = y;
    apply_factors(s3.u, F.u_half, s3.B, F.b_half);
    s3.u.axpy(0.5 * dt, k2.du);
    s3.B.axpy(0.5 * dt, k2.dB);
    Tendencies k3 = N(s3.u, s3.B);

    UB s4 = y;
    apply_factors(s4.u, F.u_full, s4.B, F.b_full);
    {
        Tendencies k3h = k3;
        apply_factors(k3h.du, F.u_half, k3h.dB, F.b_half);
        s4.u.axpy(dt, k3h.du);
        s4.B.axpy(dt, k3h.dB);
    }
    Tendencies k4 = N(s4.u, s4.B);

    // y_{n+1} = E1 y + dt/6 (E1 k1 + 2 E1/2 k2 + 2 E1/2 k3 + k4)
    apply_factors(y.u, F.u_full, y.B, F.b_full);
    apply_factors(k1.du, F.u_full, k1.dB, F.b_full);
    apply_factors(k2.du, F.u_half, k2.dB, F.b_half);
    apply_factors(k3.du, F.u_half, k3.dB, F.b_half);
    y.u.axpy(dt / 6.0, k1.du);
    y.B.axpy(dt / 6.0, k1.dB);
    y.u.axpy(dt / 3.0, k2.du);
    y.B.axpy(dt / 3.0, k2.dB);
    y.u.axpy(dt / 3.0, k3.du);
    y.B.axpy(dt / 3.0, k3.dB);
    y.u.axpy(dt / 6.0, k4.du);
    y.B.axpy(dt / 6.0, k4.dB);

    spectral::enforce_reality(y.u);
    spectral::enforce_reality(y.B);
    s.u = std::move(y.u);
    s.B = std::move(y.B);
    s.t += dt;
}

namespace {

double max_pointwise_magnitude(const SpectralVectorField& f) {
    Samples s = to_physical(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < s[0].size(); ++i) {
        double m2 = s[0][i] * s[0][i] + s[1][i] * s[1][i] + s[2][i] * s[2][i];
        worst = std::max(worst, m2);
    }
    return std::sqrt(worst);
}

} // namespace

double stable_dt(const SimState& s) {
    constexpr double c_adv = 0.5;
    constexpr double c_whistler = 0.25;
    double kmax = std::sqrt(3.0) * s.grid().dealias_cutoff();
    double umax = max_pointwise_magnitude(s.u);
    double bmax = max_pointwise_magnitude(s.B);

    double bound = std::numeric_limits<double>::infinity();
    if (umax > 0.0) bound = std::min(bound, c_adv / (kmax * umax));
    double whistler_denom =
        s.params.hall * kmax * kmax * bmax + (s.params.nu + s.params.eta) * kmax * kmax;
    if (whistler_denom > 0.0) bound = std::min(bound, c_whistler / whistler_denom);
    return bound;
}

ExactSolution ExactSolution::from_components(const fields::BeltramiComponent& c1,
                                             const fields::BeltramiComponent& c2,
                                             PhysicalParams p) {
    if (p.nu != p.eta)
        throw ConfigError("exact solution of the two-eigenfield kind requires nu = eta");
    if (c1.field.grid != c2.field.grid) throw SizeMismatch("exact solution: grids differ");
    fields::DoubleBeltramiState st = fields::make_double_beltrami(c1, c2);

    ExactSolution ex;
    ex.params_ = p;
    ex.grid_ = c1.field.grid;
    ex.lambda1_ = st.lambda1;
    ex.lambda2_ = st.lambda2;
    ex.alpha_ = st.alpha;
    ex.beta_ = st.beta;
    if (st.degenerate) {
        // both components share lambda: same shape as the degenerate formula
        // with an identically-zero corrector
        ex.kind_ = Kind::Degenerate;
        ex.f1_ = st.u;
        ex.f2_ = st.B;
        ex.w1_ = curl_hat(st.u);
        ex.w1_.axpy(-st.lambda1, st.u);
        ex.w2_ = curl_hat(st.B);
        ex.w2_.axpy(-st.lambda1, st.B);
    } else {
        ex.kind_ = Kind::Distinct;
        ex.f1_ = c1.field;
        ex.f2_ = c2.field;
    }
    return ex;
}

ExactSolution ExactSolution::degenerate(const SpectralVectorField& u0,
                                        const SpectralVectorField& B0, double lambda,
                                        PhysicalParams p) {
    if (p.nu != p.eta)
        throw ConfigError("exact solution of the degenerate kind requires nu = eta");
    if (u0.grid != B0.grid) throw SizeMismatch("exact solution: grids differ");
    ExactSolution ex;
    ex.kind_ = Kind::Degenerate;
    ex.params_ = p;
    ex.grid_ = u0.grid;
    ex.lambda1_ = ex.lambda2_ = lambda;
    ex.alpha_ = lambda + 1.0;
    ex.beta_ = lambda - 1.0;
    ex.f1_ = u0;
    ex.f2_ = B0;
    ex.w1_ = curl_hat(u0);
    ex.w1_.axpy(-lambda, u0);
    ex.w2_ = curl_hat(B0);
    ex.w2_.axpy(-lambda, B0);
    return ex;
}

ExactSolution ExactSolution::trkalian(const fields::BeltramiComponent& u0, PhysicalParams p) {
    ExactSolution ex;
    ex.kind_ = Kind::Trkalian;
    ex.params_ = p;
    ex.grid_ = u0.field.grid;
    ex.lambda1_ = u0.lambda();
    ex.f1_ = u0.field;
    ex.f2_ = SpectralVectorField(ex.grid_);
    return ex;
}

ExactSolution ExactSolution::force_free(const fields::BeltramiComponent& B0, PhysicalParams p) {
    ExactSolution ex;
    ex.kind_ = Kind::ForceFree;
    ex.params_ = p;
    ex.grid_ = B0.field.grid;
    ex.lambda1_ = B0.lambda();
    ex.f1_ = SpectralVectorField(ex.grid_);
    ex.f2_ = B0.field;
    return ex;
}

std::pair<SpectralVectorField, SpectralVectorField> ExactSolution::at(double t) const {
    const double nu = params_.nu;
    const double eta = params_.eta;
    switch (kind_) {
        case Kind::Distinct: {
            double d1 = std::exp(-nu * lambda1_ * lambda1_ * t);
            double d2 = std::exp(-nu * lambda2_ * lambda2_ * t);
            SpectralVectorField u = d1 * f1_;
            u.axpy(d2, f2_);
            SpectralVectorField B = (alpha_ - lambda1_) * d1 * f1_;
            B.axpy((alpha_ - lambda2_) * d2, f2_);
            return {std::move(u), std::move(B)};
        }
        case Kind::Degenerate: {
            double l = lambda1_;
            double d = std::exp(-nu * l * l * t);
            double c = -2.0 * nu * l * t;
            SpectralVectorField u = d * f1_;
            u.axpy(d * c, w1_);
            SpectralVectorField B = d * f2_;
            B.axpy(d * c, w2_);
            return {std::move(u), std::move(B)};
        }
        case Kind::Trkalian: {
            double d = std::exp(-nu * lambda1_ * lambda1_ * t);
            return {d * f1_, SpectralVectorField(grid_)};
        }
        case Kind::ForceFree: {
            double d = std::exp(-eta * lambda1_ * lambda1_ * t);
            return {SpectralVectorField(grid_), d * f2_};
        }
    }
    throw Error("exact solution: unknown kind");
}

double ExactSolution::lambda_min_sq() const {
    double l1 = lambda1_ * lambda1_;
    double l2 = lambda2_ * lambda2_;
    if (kind_ == Kind::Trkalian || kind_ == Kind::ForceFree) return l1;
    if (l1 == 0.0) return l2;
    if (l2 == 0.0) return l1;
    return std::min(l1, l2);
}

SimState ExactSolution::initial_state() const {
    SimState s;
    s.t = 0.0;
    s.params = params_;
    auto [u, B] = at(0.0);
    s.u = std::move(u);
    s.B = std::move(B);
    return s;
}

ExactErrors compare_to_exact(const SimState& s, const ExactSolution& ref) {
    auto [ue, be] = ref.at(s.t);
    double nu_ref = spectral::norm(ue);
    double nb_ref = spectral::norm(be);
    SpectralVectorField du = s.u - ue;
    SpectralVectorField db = s.B - be;
    double eu = spectral::norm(du);
    double eb = spectral::norm(db);
    return {nu_ref > 0.0 ? eu / nu_ref : eu, nb_ref > 0.0 ? eb / nb_ref : eb};
}

RunResult run(SimState s, const RunOptions& opt) {
    if (opt.t_end < s.t) throw ConfigError("run: t_end is before the state's current time");
    if (opt.record_every < 1) throw ConfigError("run: record_every must be >= 1");

    double dt = opt.dt;
    if (dt <= 0.0) {
        dt = stable_dt(s);
        if (!std::isfinite(dt)) dt = opt.t_end > s.t ? (opt.t_end - s.t) : 1.0;
    }

    RunResult out;
    out.dt_used = dt;

    auto record = [&](const SimState& st) {
        diag::DiagnosticsRecord r = diag::measure(st.u, st.B, st.t, opt.alpha, opt.beta);
        if (opt.reference) {
            ExactErrors e = compare_to_exact(st, *opt.reference);
            r.err_u = e.err_u;
            r.err_B = e.err_B;
        }
        out.records.push_back(std::move(r));
    };

    record(s);
    long step_index = 0;
    while (s.t < opt.t_end - 1e-12 * std::max(1.0, opt.t_end)) {
        double this_dt = std::min(dt, opt.t_end - s.t);
        step(s, this_dt, opt.nonlinear);
        ++step_index;

        if (!spectral::all_finite(s.u) || !spectral::all_finite(s.B)) throw BlowupDetected(s.t);
        if (step_index % 100 == 0 && dt > stable_dt(s) * (1.0 + 1e-9))
            throw StabilityViolated("run: dt " + std::to_string(dt) +
                                    " exceeds the stability bound at t = " + std::to_string(s.t));

        if (opt.on_step) opt.on_step(s, step_index);
        bool at_end = s.t >= opt.t_end - 1e-12 * std::max(1.0, opt.t_end);
        if (step_index % opt.record_every == 0 || at_end) record(s);
    }
    out.steps = step_index;
    out.state = std::move(s);
    return out;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y, double t0,
                        double t1, bool power_law) {
    if (t.size() != y.size()) throw SizeMismatch("fit_decay_rate: length mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        if (!(y[i] > 0.0))
            throw Error("fit_decay_rate: non-positive sample inside the fit window");
        xs.push_back(power_law ? std::log(1.0 + t[i]) : t[i]);
        ys.push_back(std::log(y[i]));
    }
    if (xs.size() < 10)
        throw Error("fit_decay_rate: need at least 10 samples in the window, have " +
                    std::to_string(xs.size()));

    double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw Error("fit_decay_rate: degenerate abscissa");
    DecayFit fit;
    fit.rate = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.rate * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double r = ys[i] - (fit.intercept + fit.rate * xs[i]);
        ss_res += r * r;
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.n_used = static_cast<int>(xs.size());
    return fit;
}

} // namespace beltrami::dynamics
