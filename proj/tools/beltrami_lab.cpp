// Command-line front end: build initial states, run simulations, fit decay
// rates, run constrained minimizations, and execute the verification checks.
//
// Exit codes: 0 success, 1 unexpected error, 2 usage/configuration error,
// 3 numerical failure (blowup, stability violation, failed checks,
// non-converged minimization), 4 infeasible constraint targets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beltrami/checkpoint.hpp"
#include "beltrami/config.hpp"
#include "beltrami/diagnostics.hpp"
#include "beltrami/dynamics.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/operators.hpp"
#include "beltrami/variational.hpp"
#include "beltrami/verify.hpp"

namespace {

using namespace beltrami;

struct CommonConfigArgs {
    std::string config_path;
    std::vector<std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "run configuration file (key = value lines)")
            ->check(CLI::ExistingFile);
        cmd->add_option("-s,--set", overrides,
                        "override a config entry, e.g. --set grid.n=32 (repeatable)");
    }

    io::ConfigMap load() const {
        io::ConfigMap cfg = config_path.empty() ? io::ConfigMap::from_string("", "<cli>")
                                                : io::ConfigMap::from_file(config_path);
        for (const auto& kv : overrides) {
            auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--set expects key=value, got '" + kv + "'");
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        return cfg;
    }
};

std::vector<std::string> provenance_comments(const io::ConfigMap& cfg, double dt_used) {
    std::vector<std::string> comments = {"resolved configuration:"};
    for (const auto& line : cfg.echo_lines()) comments.push_back("  " + line);
    if (dt_used > 0.0) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "dt_used = %.17g", dt_used);
        comments.push_back(buf);
    }
    return comments;
}

void print_record_summary(std::ostream& os, const diag::DiagnosticsRecord& rec) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "t = %.6g  E = %.9g  H_B = %.9g  H_{B+w} = %.9g", rec.t, rec.E,
                  rec.H_B, rec.H_Bw);
    os << buf << '\n';
}

int cmd_init(const CommonConfigArgs& args, const std::string& out_path) {
    auto cfg = args.load();
    auto rs = io::build_run_setup(cfg);
    cfg.finish();
    io::write_checkpoint(out_path, rs.state);
    for (const auto& line : cfg.echo_lines()) std::cout << line << '\n';
    auto rec = diag::measure(rs.state.u, rs.state.B, rs.state.t, rs.alpha, rs.beta);
    print_record_summary(std::cout, rec);
    std::cout << "wrote " << out_path << '\n';
    return 0;
}

int cmd_simulate(const CommonConfigArgs& args, std::string csv_path, std::string checkpoint_path) {
    auto cfg = args.load();
    auto rs = io::build_run_setup(cfg);
    cfg.finish();
    if (csv_path == "-") rs.csv_path.clear();                  // force stdout
    else if (!csv_path.empty()) rs.csv_path = csv_path;        // command line wins
    if (!checkpoint_path.empty()) rs.checkpoint_path = checkpoint_path;

    dynamics::RunOptions opt;
    opt.dt = rs.dt;
    opt.t_end = rs.t_end;
    opt.record_every = rs.record_every;
    opt.alpha = rs.alpha;
    opt.beta = rs.beta;
    if (rs.exact) opt.reference = &*rs.exact;
    auto rr = dynamics::run(std::move(rs.state), opt);

    auto comments = provenance_comments(cfg, rr.dt_used);
    if (rs.csv_path.empty()) {
        diag::emit_csv(std::cout, rr.records, comments);
    } else {
        diag::emit_csv_file(rs.csv_path, rr.records, comments);
        std::cout << "wrote " << rr.records.size() << " records to " << rs.csv_path << '\n';
    }
    if (!rs.checkpoint_path.empty()) {
        io::write_checkpoint(rs.checkpoint_path, rr.state);
        std::cout << "wrote checkpoint " << rs.checkpoint_path << '\n';
    }
    std::ostream& info = rs.csv_path.empty() ? std::cerr : std::cout;
    info << "steps = " << rr.steps << ", dt = " << rr.dt_used << '\n';
    print_record_summary(info, rr.records.back());
    return 0;
}

int cmd_verify(const std::string& suite, bool list_only) {
    if (list_only) {
        for (const auto& name : verify::suite_names()) std::cout << name << '\n';
        return 0;
    }
    auto results = verify::run_suite(suite);
    int failed = 0;
    for (const auto& res : results) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", res.seconds);
        std::cout << (res.pass ? "[PASS] " : "[FAIL] ") << res.name << ": " << res.detail << " ("
                  << buf << " s)\n";
        if (!res.pass) ++failed;
    }
    std::cout << (results.size() - failed) << "/" << results.size() << " checks passed\n";
    return failed == 0 ? 0 : 3;
}

struct MinimizeArgs {
    std::string mode;
    double h1 = 0.0, h2 = 0.0;
    bool has_h2 = false;
    int n = 16;
    std::uint64_t seed = 1;
    double kkt_tol = 1e-7;
    int max_iters = 100000;
    int band_k2 = 9;
    std::string omega_checkpoint;
    std::string start_checkpoint;
    std::string out_path;
};

int cmd_minimize(const MinimizeArgs& a) {
    variational::MinimizeOptions opt;
    opt.seed = a.seed;
    opt.kkt_tol = a.kkt_tol;
    opt.max_iters = a.max_iters;
    opt.band_limit_k2 = a.band_k2;
    GridSpec g{a.n};

    variational::MinimizerResult res;
    if (a.mode == "woltjer") {
        res = variational::minimize_woltjer(g, a.h1, opt);
    } else if (a.mode == "fixed-omega") {
        if (!a.has_h2) throw ConfigError("--h2 is required for mode fixed-omega");
        if (a.omega_checkpoint.empty())
            throw ConfigError("--omega-checkpoint is required for mode fixed-omega "
                              "(omega = curl u of the stored state)");
        auto s = io::read_state(a.omega_checkpoint);
        auto omega = spectral::curl_hat(s.u);
        res = variational::minimize_fixed_omega(omega, a.h1, a.h2, opt);
    } else if (a.mode == "full") {
        if (!a.has_h2) throw ConfigError("--h2 is required for mode full");
        if (!a.start_checkpoint.empty()) {
            auto s = io::read_state(a.start_checkpoint);
            res = variational::minimize_full_from(s.u, s.B, a.h1, a.h2, opt);
        } else {
            res = variational::minimize_full(g, a.h1, a.h2, opt);
        }
    } else {
        throw ConfigError("--mode must be woltjer, fixed-omega, or full");
    }

    std::printf("mode        = %s\n", a.mode.c_str());
    std::printf("converged   = %s (%d iterations)\n", res.converged ? "yes" : "no", res.iters);
    std::printf("energy      = %.12g\n", res.energy);
    std::printf("multiplier1 = %.12g\n", res.multiplier1);
    if (a.mode != "woltjer") std::printf("multiplier2 = %.12g\n", res.multiplier2);
    std::printf("kkt         = %.3e", res.kkt_residual);
    if (a.mode == "full") std::printf("  %.3e", res.kkt_residual2);
    std::printf("\nconstraints = %.3e", res.constraint_err1);
    if (a.mode != "woltjer") std::printf("  %.3e", res.constraint_err2);
    std::printf("\n");

    if (!a.out_path.empty()) {
        if (a.mode == "woltjer") {
            io::write_checkpoint_b_only(a.out_path, res.B);
        } else {
            dynamics::SimState s;
            s.u = res.u;
            s.B = res.B;
            io::write_checkpoint(a.out_path, s);
        }
        std::printf("wrote %s\n", a.out_path.c_str());
    }
    return res.converged ? 0 : 3;
}

struct DecayFitArgs {
    std::string csv_path;
    std::string column = "E_u";
    double t0 = 0.0, t1 = 0.0;
    bool power_law = false;
    double expect = 0.0;
    bool has_expect = false;
};

int cmd_decay_fit(const DecayFitArgs& a) {
    auto table = diag::parse_csv_file(a.csv_path);
    auto tc = table.column_index("t");
    auto yc = table.column_index(a.column);
    std::vector<double> ts, ys;
    for (const auto& row : table.rows) {
        if (!row[tc] || !row[yc]) continue;
        ts.push_back(*row[tc]);
        ys.push_back(*row[yc]);
    }
    auto fit = dynamics::fit_decay_rate(ts, ys, a.t0, a.t1, a.power_law);
    std::printf("model     = %s\n", a.power_law ? "y ~ exp(a) (1+t)^rate" : "y ~ exp(a + rate t)");
    std::printf("rate      = %.12g\n", fit.rate);
    std::printf("intercept = %.12g\n", fit.intercept);
    std::printf("r2        = %.12g\n", fit.r2);
    std::printf("samples   = %d\n", fit.n_used);
    if (a.has_expect) {
        double dev = std::abs(fit.rate - a.expect) / std::max(1e-300, std::abs(a.expect));
        std::printf("expected  = %.12g (relative deviation %.3e)\n", a.expect, dev);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral Hall-MHD laboratory: aligned Beltrami states, closed-form regression, "
                 "helicity-constrained minimization"};
    app.require_subcommand(1);

    // init
    auto* init = app.add_subcommand("init", "build an initial state and write it as a checkpoint");
    CommonConfigArgs init_cfg;
    init_cfg.attach(init);
    std::string init_out;
    init->add_option("-o,--out", init_out, "checkpoint file to write")->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "advance a state and emit diagnostics as CSV");
    CommonConfigArgs sim_cfg;
    sim_cfg.attach(sim);
    std::string sim_csv, sim_checkpoint;
    sim->add_option("--csv", sim_csv, "diagnostics CSV path (overrides output.csv; '-' stdout)");
    sim->add_option("--checkpoint", sim_checkpoint,
                    "final-state checkpoint path (overrides output.checkpoint)");

    // verify
    auto* ver = app.add_subcommand(
        "verify", "run the built-in verification checks (set BELTRAMI_LAB_THREADS to parallelize)");
    std::string suite = "all";
    bool list_only = false;
    ver->add_option("--suite", suite, "which suite to run (see --list)");
    ver->add_flag("--list", list_only, "list suite names and exit");

    // minimize
    auto* min = app.add_subcommand("minimize", "helicity-constrained energy minimization");
    MinimizeArgs ma;
    min->add_option("--mode", ma.mode, "woltjer | fixed-omega | full")->required();
    min->add_option("--h1", ma.h1, "magnetic helicity target")->required();
    auto* h2opt = min->add_option("--h2", ma.h2, "magneto-vorticity helicity target");
    min->add_option("-n,--grid", ma.n, "grid size (default 16)");
    min->add_option("--seed", ma.seed, "seed for the starting iterate");
    min->add_option("--kkt-tol", ma.kkt_tol, "stationarity stopping tolerance");
    min->add_option("--max-iters", ma.max_iters, "iteration cap");
    min->add_option("--band-k2", ma.band_k2, "restrict the iterate to modes with |k|^2 <= this");
    min->add_option("--omega-checkpoint", ma.omega_checkpoint,
                    "state checkpoint whose curl u fixes omega (fixed-omega mode)");
    min->add_option("--start-checkpoint", ma.start_checkpoint,
                    "state checkpoint to start the full-mode descent from");
    min->add_option("-o,--out", ma.out_path, "write the minimizer as a checkpoint");

    // decay-fit
    auto* fit = app.add_subcommand("decay-fit", "log-linear decay-rate fit of a CSV column");
    DecayFitArgs fa;
    fit->add_option("--csv", fa.csv_path, "diagnostics CSV file")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--column", fa.column, "column to fit (default E_u)");
    fit->add_option("--t0", fa.t0, "window start")->required();
    fit->add_option("--t1", fa.t1, "window end")->required();
    fit->add_flag("--power-law", fa.power_law, "fit y ~ (1+t)^rate instead of exponential");
    auto* expect_opt = fit->add_option("--expect", fa.expect, "report deviation from this rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*init) return cmd_init(init_cfg, init_out);
        if (*sim) return cmd_simulate(sim_cfg, sim_csv, sim_checkpoint);
        if (*ver) return cmd_verify(suite, list_only);
        if (*min) {
            ma.has_h2 = h2opt->count() > 0;
            return cmd_minimize(ma);
        }
        if (*fit) {
            fa.has_expect = expect_opt->count() > 0;
            return cmd_decay_fit(fa);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const CheckpointError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const InfeasibleTargets& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
