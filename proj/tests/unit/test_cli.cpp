#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "beltrami/checkpoint.hpp"
#include "beltrami/diagnostics.hpp"
#include "beltrami/operators.hpp"
#include "helpers.hpp"

using namespace beltrami;
using test_helpers::temp_path;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

std::string binary() {
    const char* b = std::getenv("BELTRAMI_LAB_BIN");
    REQUIRE_MESSAGE(b != nullptr, "BELTRAMI_LAB_BIN must point at the built binary");
    return b;
}

CmdResult run_cmd(const std::string& args, bool merge_stderr = false) {
    std::string cmd = binary() + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    CmdResult r;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), p)) r.out += buf;
    int rc = pclose(p);
    REQUIRE(rc != -1);
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

std::string write_config(const std::string& name, const std::string& text) {
    auto path = temp_path(name);
    std::ofstream os(path);
    os << text;
    REQUIRE(os.good());
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

double parse_value(const std::string& out, const std::string& label) {
    auto pos = out.find("\n" + label);
    if (pos == std::string::npos && out.rfind(label, 0) == 0) pos = 0;
    REQUIRE(pos != std::string::npos);
    auto eq = out.find('=', pos);
    REQUIRE(eq != std::string::npos);
    return std::strtod(out.c_str() + eq + 1, nullptr);
}

} // namespace

TEST_SUITE("cli") {

    TEST_CASE("verify --list names the suites") {
        auto r = run_cmd("verify --list");
        CHECK(r.code == 0);
        for (const char* name : {"algebra", "exact", "conservation", "variational", "stability",
                                 "all"})
            CHECK(r.out.find(name) != std::string::npos);
    }

    TEST_CASE("init echoes the resolved configuration and writes a readable state") {
        auto cfg = write_config("cli_init.cfg", "grid.n = 8\n"
                                                "init.kind = shell\n"
                                                "init.shell.n = 1\n"
                                                "init.shell.sign = 1\n"
                                                "init.shell.norm = 0.5\n"
                                                "init.shell.target = b\n"
                                                "physics.eta = 0.05\n");
        auto out = temp_path("cli_init.chk");
        auto r = run_cmd("init -c " + cfg + " -o " + out);
        CHECK(r.code == 0);
        CHECK(r.out.find("grid.n = 8") != std::string::npos);
        CHECK(r.out.find("init.shell.norm = 0.5") != std::string::npos);
        CHECK(r.out.find("physics.nu = 0") != std::string::npos); // default echoed
        CHECK(r.out.find("wrote " + out) != std::string::npos);

        auto s = io::read_state(out);
        CHECK(s.t == 0.0);
        CHECK(s.params.eta == 0.05);
        CHECK(spectral::norm(s.u) == 0.0);
        CHECK(spectral::norm(s.B) == doctest::Approx(0.5).epsilon(1e-12));

        // --set overrides the file
        auto r2 = run_cmd("init -c " + cfg + " -s init.shell.norm=0.25 -o " + out);
        CHECK(r2.code == 0);
        CHECK(spectral::norm(io::read_state(out).B) == doctest::Approx(0.25).epsilon(1e-12));
    }

    TEST_CASE("simulate output is byte-for-byte deterministic") {
        auto cfg = write_config("cli_sim.cfg", "grid.n = 8\n"
                                               "init.random.norm_u = 0.05\n"
                                               "init.random.norm_b = 0.05\n"
                                               "init.random.kmax2 = 4\n"
                                               "physics.nu = 0.01\n"
                                               "physics.eta = 0.01\n"
                                               "time.dt = 0.01\n"
                                               "time.t_end = 0.05\n"
                                               "time.record_every = 1\n");
        auto csv1 = temp_path("cli_run1.csv");
        auto csv2 = temp_path("cli_run2.csv");
        auto r1 = run_cmd("simulate -c " + cfg + " --csv " + csv1);
        auto r2 = run_cmd("simulate -c " + cfg + " --csv " + csv2);
        CHECK(r1.code == 0);
        CHECK(r2.code == 0);
        CHECK(r1.out.find("wrote 6 records") != std::string::npos);
        CHECK(slurp(csv1) == slurp(csv2));

        auto table = diag::parse_csv_file(csv1);
        CHECK(table.rows.size() == 6);
        // provenance comments carry the effective settings
        bool saw_dt = false, saw_cfg = false;
        for (const auto& c : table.comments) {
            if (c.rfind("dt_used = ", 0) == 0) saw_dt = true;
            if (c == "resolved configuration:") saw_cfg = true;
        }
        CHECK(saw_dt);
        CHECK(saw_cfg);
    }

    TEST_CASE("simulate --csv - streams the table to stdout") {
        auto cfg = write_config("cli_stdout.cfg", "grid.n = 8\n"
                                                  "init.random.norm_u = 0.05\n"
                                                  "init.random.norm_b = 0.05\n"
                                                  "init.random.kmax2 = 4\n"
                                                  "time.dt = 0.01\n"
                                                  "time.t_end = 0.02\n");
        auto r = run_cmd("simulate -c " + cfg + " --csv -");
        CHECK(r.code == 0);
        CHECK(r.out.find(diag::kCsvHeader) != std::string::npos);
        CHECK(r.out.find("# resolved configuration:") != std::string::npos);
        // the human summary goes to stderr, not into the table
        CHECK(r.out.find("steps =") == std::string::npos);
    }

    TEST_CASE("exit codes distinguish failure classes") {
        // unknown key: configuration error
        auto r1 = run_cmd("simulate -s grid.n=8 -s mystery.key=1");
        CHECK(r1.code == 2);
        // missing config file: usage error from the parser
        auto r2 = run_cmd("simulate -c " + temp_path("no_such.cfg"));
        CHECK(r2.code == 2);
        // missing checkpoint behind a valid config
        auto r3 = run_cmd("simulate -s init.kind=checkpoint -s init.checkpoint.path=" +
                          temp_path("no_such.chk"));
        CHECK(r3.code == 2);
        // bad minimize mode
        auto r4 = run_cmd("minimize --mode sideways --h1 1");
        CHECK(r4.code == 2);
        // no subcommand at all
        auto r5 = run_cmd("");
        CHECK(r5.code == 2);
    }

    TEST_CASE("minimize woltjer writes the minimizer as a B-only checkpoint") {
        auto out = temp_path("cli_woltjer.chk");
        auto r = run_cmd("minimize --mode woltjer --h1 1.0 -n 8 --band-k2 4 --seed 2 -o " + out);
        CHECK(r.code == 0);
        CHECK(r.out.find("converged   = yes") != std::string::npos);
        CHECK(parse_value(r.out, "energy") == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(parse_value(r.out, "multiplier1") == doctest::Approx(1.0).epsilon(1e-3));

        auto cp = io::read_checkpoint(out);
        CHECK(cp.b_only);
        CHECK(diag::magnetic_helicity(cp.B) == doctest::Approx(1.0).epsilon(1e-7));
    }

    TEST_CASE("infeasible targets exit with their own code") {
        auto quiet = temp_path("cli_quiet.chk");
        auto ri = run_cmd("init -s grid.n=8 -s init.random.norm_u=0 -s init.random.norm_b=0.3 -o " +
                          quiet);
        REQUIRE(ri.code == 0);
        // omega = 0 forces h2 = h1; ask for something else
        auto r = run_cmd("minimize --mode fixed-omega --h1 1 --h2 2 --omega-checkpoint " + quiet);
        CHECK(r.code == 4);
    }

    TEST_CASE("decay-fit recovers the diffusive rate of a force-free field") {
        auto cfg = write_config("cli_decay.cfg", "grid.n = 8\n"
                                                 "init.kind = shell\n"
                                                 "init.shell.n = 1\n"
                                                 "init.shell.sign = 1\n"
                                                 "init.shell.norm = 0.5\n"
                                                 "init.shell.target = b\n"
                                                 "physics.eta = 0.05\n"
                                                 "time.dt = 0.01\n"
                                                 "time.t_end = 3\n"
                                                 "time.record_every = 10\n");
        auto csv = temp_path("cli_decay.csv");
        auto r = run_cmd("simulate -c " + cfg + " --csv " + csv);
        REQUIRE(r.code == 0);

        // E_B = |B|^2 of a lambda = 1 force-free field decays at 2 eta lambda^2
        auto f = run_cmd("decay-fit --csv " + csv + " --column E_B --t0 0 --t1 3 --expect -0.1");
        CHECK(f.code == 0);
        CHECK(parse_value(f.out, "rate") == doctest::Approx(-0.1).epsilon(1e-6));
        CHECK(parse_value(f.out, "r2") == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(f.out.find("expected  = -0.1") != std::string::npos);

        // too few samples in the window is a numerical failure, not a crash
        auto few = run_cmd("decay-fit --csv " + csv + " --column E_B --t0 2.9 --t1 3.0");
        CHECK(few.code == 3);
    }

    TEST_CASE("a run can be continued from its final checkpoint") {
        auto cfg = write_config("cli_chain.cfg", "grid.n = 8\n"
                                                 "init.random.norm_u = 0.05\n"
                                                 "init.random.norm_b = 0.05\n"
                                                 "init.random.kmax2 = 4\n"
                                                 "physics.nu = 0.01\n"
                                                 "physics.eta = 0.01\n"
                                                 "time.dt = 0.01\n"
                                                 "time.t_end = 0.02\n");
        auto mid = temp_path("cli_chain_mid.chk");
        auto r1 = run_cmd("simulate -c " + cfg + " --csv - --checkpoint " + mid);
        REQUIRE(r1.code == 0);

        auto csv = temp_path("cli_chain.csv");
        auto r2 = run_cmd("simulate -s init.kind=checkpoint -s init.checkpoint.path=" + mid +
                          " -s time.dt=0.01 -s time.t_end=0.04 --csv " + csv);
        CHECK(r2.code == 0);
        auto table = diag::parse_csv_file(csv);
        REQUIRE(!table.rows.empty());
        CHECK(*table.rows.front()[table.column_index("t")] == doctest::Approx(0.02));
        CHECK(*table.rows.back()[table.column_index("t")] == doctest::Approx(0.04));
    }
}
