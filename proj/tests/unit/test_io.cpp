#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "beltrami/checkpoint.hpp"
#include "beltrami/config.hpp"
#include "beltrami/errors.hpp"
#include "beltrami/fields.hpp"
#include "beltrami/operators.hpp"
#include "helpers.hpp"

using namespace beltrami;
using test_helpers::identical;
using test_helpers::temp_path;

TEST_SUITE("io") {

    TEST_CASE("config parsing: comments, whitespace, types, strictness") {
        auto cfg = io::ConfigMap::from_string("# header comment\n"
                                              "grid.n = 16   # trailing comment\n"
                                              "physics.nu = 1e-2\r\n"
                                              "\n"
                                              "init.kind=shell\n"
                                              "flag.on = Yes\n"
                                              "count = -3\n",
                                              "inline");
        CHECK(cfg.has("grid.n"));
        CHECK(!cfg.has("grid"));
        CHECK(cfg.require_int("grid.n") == 16);
        CHECK(cfg.require_double("physics.nu") == 1e-2);
        CHECK(cfg.get_string("init.kind", "random") == "shell");
        CHECK(cfg.get_bool("flag.on", false));
        CHECK(cfg.get_int("count", 0) == -3);
        // defaults are recorded too
        CHECK(cfg.get_double("physics.eta", 0.25) == 0.25);
        CHECK(cfg.get_u64("seed", 7) == 7);
        CHECK_NOTHROW(cfg.finish());

        auto lines = cfg.echo_lines();
        REQUIRE(lines.size() == 7);
        CHECK(lines[0] == "count = -3");            // sorted by key
        CHECK(lines[2] == "grid.n = 16");
        CHECK(lines[4] == "physics.eta = 0.25");    // applied default echoed
        CHECK(lines[5] == "physics.nu = 0.01");     // canonical number formatting

        CHECK_THROWS_AS(io::ConfigMap::from_string("a = 1\na = 2\n"), ConfigError);
        CHECK_THROWS_AS(io::ConfigMap::from_string("just words\n"), ConfigError);
        CHECK_THROWS_AS(io::ConfigMap::from_string(" = 3\n"), ConfigError);
    }

    TEST_CASE("config getters reject malformed values and typos") {
        auto cfg = io::ConfigMap::from_string("x = 1.5oops\ny = true\nz = 2.5\nneg = -1\n");
        CHECK_THROWS_AS(cfg.require_double("x"), ConfigError);
        CHECK_THROWS_AS(cfg.get_int("z", 0), ConfigError);   // non-integer
        CHECK_THROWS_AS(cfg.get_bool("z", false), ConfigError);
        CHECK_THROWS_AS(cfg.get_u64("neg", 0), ConfigError); // negative u64
        CHECK_THROWS_AS(cfg.require_string("absent"), ConfigError);
        CHECK(cfg.get_bool("y", false));

        auto unused = io::ConfigMap::from_string("grid.n = 8\nmystery.key = 1\n");
        CHECK(unused.require_int("grid.n") == 8);
        CHECK_THROWS_AS(unused.finish(), ConfigError); // mystery.key never consumed

        io::ConfigMap overr;
        overr.set("a.b", "  5  ");
        CHECK(overr.get_int("a.b", 0) == 5);
    }

    TEST_CASE("run setup: random defaults") {
        auto cfg = io::ConfigMap::from_string("grid.n = 16\n");
        auto rs = io::build_run_setup(cfg);
        CHECK_NOTHROW(cfg.finish());
        CHECK(rs.state.grid().n == 16);
        CHECK(spectral::norm(rs.state.u) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(spectral::norm(rs.state.B) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rs.state.params.nu == 0.0);
        CHECK(rs.state.params.hall == 1.0);
        CHECK(rs.dt == 0.0); // auto
        CHECK(rs.t_end == 1.0);
        CHECK(rs.record_every == 100);
        CHECK(!rs.exact.has_value());
        CHECK(rs.csv_path.empty());

        // the same config reproduces the same state bitwise
        auto cfg2 = io::ConfigMap::from_string("grid.n = 16\n");
        auto rs2 = io::build_run_setup(cfg2);
        CHECK(identical(rs.state.u, rs2.state.u));
        CHECK(identical(rs.state.B, rs2.state.B));
    }

    TEST_CASE("run setup: aligned-pair initialization carries its closed form") {
        std::string base = "grid.n = 16\n"
                           "init.kind = double_beltrami\n"
                           "init.db.shell1.n = 1\n"
                           "init.db.shell1.sign = 1\n"
                           "init.db.shell1.norm = 1.2\n"
                           "init.db.shell2.n = 4\n"
                           "init.db.shell2.sign = -1\n"
                           "init.db.shell2.norm = 0.6\n"
                           "physics.nu = 0.05\n";
        {
            auto cfg = io::ConfigMap::from_string(base + "physics.eta = 0.05\n");
            auto rs = io::build_run_setup(cfg);
            CHECK_NOTHROW(cfg.finish());
            REQUIRE(rs.exact.has_value());
            CHECK(rs.alpha + rs.beta == doctest::Approx(-1.0).epsilon(1e-12));
            auto res = fields::verify_double_beltrami(rs.state.u, rs.state.B, rs.alpha, rs.beta);
            CHECK(res.r1 < 1e-12);
            CHECK(res.r2 < 1e-12);
        }
        {
            // nu != eta: no closed form
            auto cfg = io::ConfigMap::from_string(base + "physics.eta = 0.01\n");
            auto rs = io::build_run_setup(cfg);
            CHECK(!rs.exact.has_value());
        }
        {
            // a perturbation clears the closed form and has the requested size
            auto cfg = io::ConfigMap::from_string(base + "physics.eta = 0.05\n"
                                                         "perturbation.enabled = true\n"
                                                         "perturbation.scaling = absolute\n"
                                                         "perturbation.amplitude = 1e-3\n");
            auto rs = io::build_run_setup(cfg);
            CHECK_NOTHROW(cfg.finish());
            CHECK(!rs.exact.has_value());

            auto cfg0 = io::ConfigMap::from_string(base + "physics.eta = 0.05\n");
            auto rs0 = io::build_run_setup(cfg0);
            auto du = rs.state.u - rs0.state.u;
            auto dB = rs.state.B - rs0.state.B;
            double nu_ = spectral::norm(du), nb_ = spectral::norm(dB);
            // recovering the perturbation by subtracting O(1) states leaves
            // roundoff of order eps * |background| / amplitude ~ 1e-13
            CHECK(std::sqrt(nu_ * nu_ + nb_ * nb_) == doctest::Approx(1e-3).epsilon(1e-9));
        }
    }

    TEST_CASE("run setup: validation failures") {
        auto missing_grid = io::ConfigMap::from_string("init.kind = random\n");
        CHECK_THROWS_AS(io::build_run_setup(missing_grid), ConfigError);

        auto bad_kind = io::ConfigMap::from_string("grid.n = 8\ninit.kind = vortex\n");
        CHECK_THROWS_AS(io::build_run_setup(bad_kind), ConfigError);

        auto neg_nu = io::ConfigMap::from_string("grid.n = 8\nphysics.nu = -0.1\n");
        CHECK_THROWS_AS(io::build_run_setup(neg_nu), ConfigError);

        auto bad_dt = io::ConfigMap::from_string("grid.n = 8\ntime.dt = sometimes\n");
        CHECK_THROWS_AS(io::build_run_setup(bad_dt), ConfigError);

        auto neg_dt = io::ConfigMap::from_string("grid.n = 8\ntime.dt = -0.1\n");
        CHECK_THROWS_AS(io::build_run_setup(neg_dt), ConfigError);

        auto bad_every = io::ConfigMap::from_string("grid.n = 8\ntime.record_every = 0\n");
        CHECK_THROWS_AS(io::build_run_setup(bad_every), ConfigError);

        // relative perturbation needs something to be relative to
        auto quiet = io::ConfigMap::from_string("grid.n = 8\n"
                                                "init.random.norm_u = 0\n"
                                                "init.random.norm_b = 0\n"
                                                "perturbation.enabled = true\n");
        CHECK_THROWS_AS(io::build_run_setup(quiet), ConfigError);

        auto bad_scaling = io::ConfigMap::from_string("grid.n = 8\n"
                                                      "perturbation.enabled = true\n"
                                                      "perturbation.scaling = both\n");
        CHECK_THROWS_AS(io::build_run_setup(bad_scaling), ConfigError);
    }

    TEST_CASE("run setup: explicit dt and shell/abc targets") {
        auto cfg = io::ConfigMap::from_string("grid.n = 16\n"
                                              "init.kind = shell\n"
                                              "init.shell.n = 4\n"
                                              "init.shell.sign = -1\n"
                                              "init.shell.norm = 0.8\n"
                                              "init.shell.target = b\n"
                                              "time.dt = 0.05\n"
                                              "time.t_end = 2\n"
                                              "time.record_every = 5\n"
                                              "output.csv = out.csv\n");
        auto rs = io::build_run_setup(cfg);
        CHECK_NOTHROW(cfg.finish());
        CHECK(rs.dt == 0.05);
        CHECK(rs.t_end == 2.0);
        CHECK(rs.record_every == 5);
        CHECK(rs.csv_path == "out.csv");
        CHECK(spectral::norm(rs.state.u) == 0.0);
        CHECK(spectral::norm(rs.state.B) == doctest::Approx(0.8).epsilon(1e-12));

        auto abc = io::ConfigMap::from_string("grid.n = 16\n"
                                              "init.kind = abc\n"
                                              "init.abc.a = 0.5\n"
                                              "init.abc.b = 0.5\n"
                                              "init.abc.c = 0.5\n");
        auto rsa = io::build_run_setup(abc);
        CHECK_NOTHROW(abc.finish());
        double expect = std::sqrt(volume_total() * 3.0 * 0.25);
        CHECK(spectral::norm(rsa.state.u) == doctest::Approx(expect).epsilon(1e-12));
        CHECK(spectral::norm(rsa.state.B) == 0.0);
    }

    TEST_CASE("checkpoint roundtrip is bitwise") {
        GridSpec g{8};
        dynamics::SimState s;
        s.t = 1.75;
        s.params = {0.05, 0.02, 0.9};
        s.u = fields::random_solenoidal(g, 4, 601, 1.1);
        s.B = fields::random_solenoidal(g, 4, 602, 0.7);

        auto path = temp_path("state_roundtrip.chk");
        io::write_checkpoint(path, s);
        auto back = io::read_state(path);
        CHECK(back.t == 1.75);
        CHECK(back.params.nu == 0.05);
        CHECK(back.params.eta == 0.02);
        CHECK(back.params.hall == 0.9);
        CHECK(identical(back.u, s.u));
        CHECK(identical(back.B, s.B));

        auto cp = io::read_checkpoint(path);
        CHECK(!cp.b_only);
        CHECK(identical(cp.B, s.B));
    }

    TEST_CASE("B-only checkpoints hold a single field") {
        GridSpec g{8};
        auto B = fields::random_solenoidal(g, 4, 603, 2.0);
        auto path = temp_path("b_only.chk");
        io::write_checkpoint_b_only(path, B);
        auto cp = io::read_checkpoint(path);
        CHECK(cp.b_only);
        CHECK(identical(cp.B, B));
        CHECK(cp.u.grid.n == 0); // never allocated
        CHECK_THROWS_AS(io::read_state(path), CheckpointError);
    }

    TEST_CASE("corrupt checkpoints are rejected") {
        CHECK_THROWS_AS(io::read_checkpoint(temp_path("does_not_exist.chk")), CheckpointError);

        auto junk = temp_path("junk.chk");
        {
            std::ofstream os(junk, std::ios::binary);
            os << "NOTMAGIC and then some";
        }
        CHECK_THROWS_AS(io::read_checkpoint(junk), CheckpointError);

        GridSpec g{8};
        dynamics::SimState s;
        s.u = fields::random_solenoidal(g, 4, 604, 1.0);
        s.B = fields::random_solenoidal(g, 4, 605, 1.0);
        auto trunc = temp_path("trunc.chk");
        io::write_checkpoint(trunc, s);
        std::filesystem::resize_file(trunc, std::filesystem::file_size(trunc) / 2);
        CHECK_THROWS_AS(io::read_checkpoint(trunc), CheckpointError);

        auto extra = temp_path("extra.chk");
        io::write_checkpoint(extra, s);
        {
            std::ofstream os(extra, std::ios::binary | std::ios::app);
            os.put('\0');
        }
        CHECK_THROWS_AS(io::read_checkpoint(extra), CheckpointError);
    }

    TEST_CASE("run setup resumes from a checkpoint with physics overrides") {
        GridSpec g{8};
        dynamics::SimState s;
        s.t = 0.5;
        s.params = {0.03, 0.04, 1.0};
        s.u = fields::random_solenoidal(g, 4, 606, 0.9);
        s.B = fields::random_solenoidal(g, 4, 607, 0.5);
        auto path = temp_path("resume.chk");
        io::write_checkpoint(path, s);

        auto cfg = io::ConfigMap::from_string("init.kind = checkpoint\n"
                                              "init.checkpoint.path = " + path + "\n"
                                              "physics.eta = 0.125\n"
                                              "time.t_end = 2\n");
        auto rs = io::build_run_setup(cfg);
        CHECK_NOTHROW(cfg.finish());
        CHECK(rs.state.t == 0.5);
        CHECK(rs.state.params.nu == 0.03);    // stored value kept
        CHECK(rs.state.params.eta == 0.125);  // override applied
        CHECK(identical(rs.state.u, s.u));
        CHECK(identical(rs.state.B, s.B));
        // stored values appear as the echoed defaults
        bool saw_nu = false;
        for (const auto& line : cfg.echo_lines())
            if (line == "physics.nu = 0.03") saw_nu = true;
        CHECK(saw_nu);

        // t_end before the resumed time is rejected
        auto early = io::ConfigMap::from_string("init.kind = checkpoint\n"
                                                "init.checkpoint.path = " + path + "\n"
                                                "time.t_end = 0.25\n");
        CHECK_THROWS_AS(io::build_run_setup(early), ConfigError);
    }
}
