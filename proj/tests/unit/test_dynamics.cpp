#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "beltrami/dynamics.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/fields.hpp"
#include "beltrami/operators.hpp"
#include "helpers.hpp"

using namespace beltrami;
using test_helpers::identical;
using test_helpers::rel_err;

namespace {

dynamics::SimState aligned_state(const GridSpec& g, double n1, double n2, double nu, double eta,
                                 double hall, std::uint64_t seed) {
    auto st = fields::make_double_beltrami(fields::shell_field(g, 1, +1, seed, n1),
                                           fields::shell_field(g, 4, -1, seed + 1, n2));
    dynamics::SimState s;
    s.params = {nu, eta, hall};
    s.u = st.u;
    s.B = st.B;
    return s;
}

} // namespace

TEST_SUITE("dynamics") {

    TEST_CASE("tendencies are solenoidal, mean-free and dealiased") {
        GridSpec g{16};
        dynamics::SimState s;
        s.params = {0.01, 0.02, 1.0};
        s.u = fields::random_solenoidal(g, 9, 401, 0.5);
        s.B = fields::random_solenoidal(g, 9, 402, 0.5);
        auto rhs = dynamics::hall_rhs(s);

        CHECK(spectral::divergence_linf(rhs.du) < 1e-12);
        CHECK(spectral::divergence_linf(rhs.dB) < 1e-12);
        for (int c = 0; c < 3; ++c) {
            CHECK(std::abs(rhs.du.comp[c][0]) == 0.0);
            CHECK(std::abs(rhs.dB.comp[c][0]) == 0.0);
        }
        double outside = 0.0;
        for_each_mode(g, [&](std::size_t f, int kx, int ky, int kz) {
            if (!spectral::retained(g, kx, ky, kz))
                for (int c = 0; c < 3; ++c)
                    outside = std::max(
                        {outside, std::abs(rhs.du.comp[c][f]), std::abs(rhs.dB.comp[c][f])});
        });
        CHECK(outside == 0.0);
    }

    TEST_CASE("diffusion-only tendencies are -nu k^2 u and -eta k^2 B") {
        GridSpec g{8};
        dynamics::SimState s;
        s.params = {0.3, 0.07, 1.0};
        s.u = fields::shell_field(g, 4, +1, 403, 1.0).field;
        s.B = fields::shell_field(g, 1, -1, 404, 2.0).field;
        auto rhs = dynamics::hall_rhs(s, false);
        CHECK(rel_err(rhs.du, -0.3 * 4.0 * s.u) < 1e-15);
        CHECK(rel_err(rhs.dB, -0.07 * 1.0 * s.B) < 1e-15);
    }

    TEST_CASE("aligned pairs are ideal equilibria: the nonlinearity cancels pointwise") {
        GridSpec g{16};
        auto s = aligned_state(g, 1.3, 0.7, 0.0, 0.0, 1.0, 405);
        auto rhs = dynamics::hall_rhs(s);
        double scale = spectral::norm(s.u) * spectral::norm(s.B);
        CHECK(spectral::norm(rhs.du) < 1e-12 * scale);
        CHECK(spectral::norm(rhs.dB) < 1e-12 * scale);
    }

    TEST_CASE("integrating factor handles diffusion exactly") {
        GridSpec g{8};
        dynamics::SimState s;
        s.params = {0.2, 0.05, 1.0};
        s.u = fields::random_solenoidal(g, 4, 406, 1.0);
        s.B = fields::random_solenoidal(g, 4, 407, 0.8);
        auto u0 = s.u;
        auto B0 = s.B;
        double dt = 0.25;
        dynamics::step(s, dt, false);
        CHECK(s.t == dt);
        double worst = 0.0;
        for_each_mode(g, [&](std::size_t f, int kx, int ky, int kz) {
            double k2 = double(kx * kx + ky * ky + kz * kz);
            double fu = std::exp(-0.2 * k2 * dt);
            double fb = std::exp(-0.05 * k2 * dt);
            for (int c = 0; c < 3; ++c) {
                worst = std::max(worst, std::abs(s.u.comp[c][f] - fu * u0.comp[c][f]));
                worst = std::max(worst, std::abs(s.B.comp[c][f] - fb * B0.comp[c][f]));
            }
        });
        CHECK(worst < 1e-15);
    }

    TEST_CASE("closed forms: two distinct eigenvalues") {
        GridSpec g{16};
        dynamics::PhysicalParams p{0.05, 0.05, 1.0};
        auto c1 = fields::shell_field(g, 1, +1, 408, 1.3);
        auto c2 = fields::shell_field(g, 4, -1, 409, 0.7);
        auto ex = dynamics::ExactSolution::from_components(c1, c2, p);
        CHECK(ex.kind() == dynamics::ExactSolution::Kind::Distinct);
        CHECK(ex.lambda1() == doctest::Approx(1.0));
        CHECK(ex.lambda2() == doctest::Approx(-2.0));
        CHECK(ex.lambda_min_sq() == doctest::Approx(1.0));

        double t = 0.9;
        double d1 = std::exp(-p.nu * t);
        double d2 = std::exp(-4.0 * p.nu * t);
        auto [u, B] = ex.at(t);
        auto u_pred = d1 * c1.field;
        u_pred.axpy(d2, c2.field);
        CHECK(rel_err(u, u_pred) < 1e-14);
        auto B_pred = (ex.alpha() - 1.0) * d1 * c1.field;
        B_pred.axpy((ex.alpha() + 2.0) * d2, c2.field);
        CHECK(rel_err(B, B_pred) < 1e-14);

        // initial state carries the parameters and the t = 0 fields
        auto s0 = ex.initial_state();
        CHECK(s0.t == 0.0);
        CHECK(s0.params.nu == p.nu);
        auto [u0, B0] = ex.at(0.0);
        CHECK(identical(s0.u, u0));
        CHECK(identical(s0.B, B0));

        dynamics::PhysicalParams bad{0.05, 0.06, 1.0};
        CHECK_THROWS_AS(dynamics::ExactSolution::from_components(c1, c2, bad), ConfigError);
    }

    TEST_CASE("closed forms: degenerate corrector formula") {
        GridSpec g{16};
        dynamics::PhysicalParams p{0.1, 0.1, 1.0};
        auto cp = fields::shell_field(g, 4, +1, 410, 1.0);
        auto cm = fields::shell_field(g, 4, -1, 411, 0.8);
        auto u0 = cp.field + cm.field;
        auto B0 = 3.0 * u0 - spectral::curl_hat(u0); // = cp + 5 cm
        auto ex = dynamics::ExactSolution::degenerate(u0, B0, 2.0, p);
        CHECK(ex.kind() == dynamics::ExactSolution::Kind::Degenerate);

        double t = 0.7;
        double d = std::exp(-4.0 * p.nu * t);
        auto [u, B] = ex.at(t);
        // curl u0 - 2 u0 = -4 cm, so u(t) = d (cp + (1 + 16 nu t) cm)
        auto u_pred = d * cp.field;
        u_pred.axpy(d * (1.0 + 16.0 * p.nu * t), cm.field);
        CHECK(rel_err(u, u_pred) < 1e-13);
        // B0 = cp + 5 cm and curl B0 - 2 B0 = -20 cm: B(t) = d (cp + (5 + 80 nu t) cm)
        auto B_pred = d * cp.field;
        B_pred.axpy(d * (5.0 + 80.0 * p.nu * t), cm.field);
        CHECK(rel_err(B, B_pred) < 1e-13);

        // two same-lambda components route to the degenerate kind automatically
        auto both = dynamics::ExactSolution::from_components(
            fields::shell_field(g, 4, +1, 412, 1.0), fields::shell_field(g, 4, +1, 413, 0.5), p);
        CHECK(both.kind() == dynamics::ExactSolution::Kind::Degenerate);
        CHECK(both.lambda_min_sq() == doctest::Approx(4.0));
    }

    TEST_CASE("closed forms: one-field kinds allow nu != eta") {
        GridSpec g{16};
        dynamics::PhysicalParams p{0.3, 0.05, 1.0};
        auto c = fields::shell_field(g, 4, -1, 414, 1.1);

        auto tr = dynamics::ExactSolution::trkalian(c, p);
        auto [ut, Bt] = tr.at(0.5);
        CHECK(rel_err(ut, std::exp(-0.3 * 4.0 * 0.5) * c.field) < 1e-14);
        CHECK(spectral::norm(Bt) == 0.0);

        auto ff = dynamics::ExactSolution::force_free(c, p);
        auto [uf, Bf] = ff.at(0.5);
        CHECK(spectral::norm(uf) == 0.0);
        CHECK(rel_err(Bf, std::exp(-0.05 * 4.0 * 0.5) * c.field) < 1e-14);
        CHECK(ff.lambda_min_sq() == doctest::Approx(4.0));
    }

    TEST_CASE("solver reproduces a closed form to roundoff") {
        GridSpec g{16};
        dynamics::PhysicalParams p{0.05, 0.05, 1.0};
        auto ex = dynamics::ExactSolution::from_components(fields::shell_field(g, 1, +1, 415, 1.0),
                                                           fields::shell_field(g, 4, -1, 416, 0.5),
                                                           p);
        dynamics::RunOptions opt;
        opt.dt = 1e-3;
        opt.t_end = 0.02;
        opt.record_every = 10;
        opt.alpha = ex.alpha();
        opt.beta = ex.beta();
        opt.reference = &ex;
        auto res = dynamics::run(ex.initial_state(), opt);
        CHECK(res.steps == 20);
        REQUIRE(!res.records.empty());
        const auto& last = res.records.back();
        REQUIRE(last.err_u.has_value());
        CHECK(*last.err_u < 1e-11);
        CHECK(*last.err_B < 1e-11);
        // the aligned state keeps its deviation norms at roundoff while decaying
        CHECK(last.phi_l2 < 1e-10);
        CHECK(last.psi_l2 < 1e-10);
    }

    TEST_CASE("run bookkeeping: records, steps, partial final step") {
        GridSpec g{8};
        dynamics::SimState s;
        s.params = {0.1, 0.1, 1.0};
        s.u = fields::random_solenoidal(g, 4, 417, 0.3);
        s.B = fields::random_solenoidal(g, 4, 418, 0.3);

        dynamics::RunOptions opt;
        opt.dt = 0.1;
        opt.t_end = 0.55;
        opt.record_every = 2;
        opt.nonlinear = false;
        long calls = 0;
        opt.on_step = [&](const dynamics::SimState&, long) { ++calls; };
        auto res = dynamics::run(s, opt);

        CHECK(res.steps == 6); // five full steps plus the 0.05 remainder
        CHECK(calls == 6);
        REQUIRE(res.records.size() == 4); // t = 0, 0.2, 0.4, 0.55
        CHECK(res.records[0].t == 0.0);
        CHECK(res.records[1].t == doctest::Approx(0.2));
        CHECK(res.records[2].t == doctest::Approx(0.4));
        CHECK(res.records[3].t == doctest::Approx(0.55));
        CHECK(res.state.t == doctest::Approx(0.55));
        CHECK(res.dt_used == 0.1);

        // t_end at the current time: no steps, one record
        dynamics::RunOptions still;
        still.dt = 0.1;
        still.t_end = 0.0;
        auto res0 = dynamics::run(s, still);
        CHECK(res0.steps == 0);
        CHECK(res0.records.size() == 1);

        dynamics::RunOptions back;
        back.t_end = -1.0;
        CHECK_THROWS_AS(dynamics::run(s, back), ConfigError);
        dynamics::RunOptions everyzero;
        everyzero.t_end = 1.0;
        everyzero.record_every = 0;
        CHECK_THROWS_AS(dynamics::run(s, everyzero), ConfigError);
    }

    TEST_CASE("automatic dt picks the stability bound") {
        GridSpec g{16};
        auto s = aligned_state(g, 0.2, 0.1, 0.01, 0.01, 1.0, 419);
        double bound = dynamics::stable_dt(s);
        CHECK(bound > 0.0);
        CHECK(std::isfinite(bound));

        dynamics::RunOptions opt;
        opt.dt = 0.0;
        opt.t_end = 3.0 * bound;
        auto res = dynamics::run(s, opt);
        CHECK(res.dt_used == bound);

        // zero state: infinite bound falls back to one step to t_end
        dynamics::SimState quiet;
        quiet.u = SpectralVectorField(g);
        quiet.B = SpectralVectorField(g);
        CHECK(dynamics::stable_dt(quiet) == std::numeric_limits<double>::infinity());
        dynamics::RunOptions qo;
        qo.dt = 0.0;
        qo.t_end = 0.7;
        auto qres = dynamics::run(quiet, qo);
        CHECK(qres.steps == 1);
        CHECK(qres.dt_used == doctest::Approx(0.7));
    }

    TEST_CASE("stable_dt matches the advective and whistler bounds") {
        GridSpec g{16};
        double kmax = std::sqrt(3.0) * 5.0;

        dynamics::SimState adv;
        adv.params = {0.0, 0.0, 1.0};
        adv.u = SpectralVectorField(g);
        adv.u.set_mean({0.6, 0.0, 0.0});
        adv.B = SpectralVectorField(g);
        CHECK(dynamics::stable_dt(adv) == doctest::Approx(0.5 / (kmax * 0.6)).epsilon(1e-12));

        dynamics::SimState whis;
        whis.params = {0.0, 0.0, 2.0};
        whis.u = SpectralVectorField(g);
        whis.B = SpectralVectorField(g);
        whis.B.set_mean({0.0, 0.0, 0.5});
        CHECK(dynamics::stable_dt(whis) ==
              doctest::Approx(0.25 / (2.0 * kmax * kmax * 0.5)).epsilon(1e-12));

        whis.params = {0.01, 0.02, 0.0};
        whis.B.zero();
        CHECK(dynamics::stable_dt(whis) ==
              doctest::Approx(0.25 / (0.03 * kmax * kmax)).epsilon(1e-12));
    }

    TEST_CASE("blowup and stability violations are reported") {
        GridSpec g{8};
        dynamics::SimState s;
        s.u = fields::random_solenoidal(g, 4, 420, 0.1);
        s.B = fields::random_solenoidal(g, 4, 421, 0.1);
        s.u.comp[0][g.flat_of_wave(1, 0, 0)] = complexd(std::nan(""), 0.0);
        dynamics::RunOptions opt;
        opt.dt = 1e-3;
        opt.t_end = 1e-2;
        CHECK_THROWS_AS(dynamics::run(s, opt), BlowupDetected);

        // an ideal Beltrami flow is steady, so the state survives an over-long
        // dt numerically; the periodic re-check still reports the violation at
        // step 100.
        dynamics::SimState steady;
        steady.params = {0.0, 0.0, 1.0};
        steady.u = fields::abc_flow(g, 0.4, 0.3, 0.2, 1).field;
        steady.B = SpectralVectorField(g);
        double bound = dynamics::stable_dt(steady);
        dynamics::RunOptions viol;
        viol.dt = 1.5 * bound;
        viol.t_end = 200.0 * viol.dt;
        viol.record_every = 1000;
        CHECK_THROWS_AS(dynamics::run(steady, viol), StabilityViolated);
    }

    TEST_CASE("runs are deterministic and restartable bitwise") {
        GridSpec g{16};
        dynamics::PhysicalParams p{0.05, 0.05, 1.0};
        auto ex = dynamics::ExactSolution::from_components(fields::shell_field(g, 1, +1, 422, 0.13),
                                                           fields::shell_field(g, 4, -1, 423, 0.07),
                                                           p);
        const double dt = 0.015625; // dyadic: restart sees the identical step grid
        dynamics::RunOptions whole;
        whole.dt = dt;
        whole.t_end = 8 * dt;
        auto full = dynamics::run(ex.initial_state(), whole);
        CHECK(full.steps == 8);

        dynamics::RunOptions first;
        first.dt = dt;
        first.t_end = 4 * dt;
        auto half = dynamics::run(ex.initial_state(), first);
        dynamics::RunOptions second;
        second.dt = dt;
        second.t_end = 8 * dt;
        auto rest = dynamics::run(half.state, second);

        CHECK(rest.state.t == full.state.t);
        CHECK(identical(rest.state.u, full.state.u));
        CHECK(identical(rest.state.B, full.state.B));

        auto again = dynamics::run(ex.initial_state(), whole);
        CHECK(identical(again.state.u, full.state.u));
        CHECK(identical(again.state.B, full.state.B));
    }

    TEST_CASE("decay-rate fitting") {
        std::vector<double> t, ye, yp;
        for (int i = 0; i <= 100; ++i) {
            double ti = 0.1 * i;
            t.push_back(ti);
            ye.push_back(3.0 * std::exp(-0.7 * ti));
            yp.push_back(2.0 * std::pow(1.0 + ti, -1.5));
        }
        auto fe = dynamics::fit_decay_rate(t, ye, 1.0, 9.0);
        CHECK(fe.rate == doctest::Approx(-0.7).epsilon(1e-10));
        CHECK(fe.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
        CHECK(fe.r2 == doctest::Approx(1.0));
        CHECK(fe.n_used == 81);

        auto fp = dynamics::fit_decay_rate(t, yp, 0.0, 10.0, true);
        CHECK(fp.rate == doctest::Approx(-1.5).epsilon(1e-10));
        CHECK(fp.r2 == doctest::Approx(1.0));

        CHECK_THROWS_AS(dynamics::fit_decay_rate(t, ye, 9.95, 10.0), Error); // 1 sample
        auto bad = ye;
        bad[50] = 0.0;
        CHECK_THROWS_AS(dynamics::fit_decay_rate(t, bad, 1.0, 9.0), Error);
        std::vector<double> shorter(t.begin(), t.end() - 1);
        CHECK_THROWS_AS(dynamics::fit_decay_rate(shorter, ye, 1.0, 9.0), SizeMismatch);
    }
}
