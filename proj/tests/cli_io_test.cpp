#include "doctest.h"

#include "mfg/commands.hpp"
#include "mfg/config.hpp"
#include "mfg/error.hpp"
#include "mfg/io.hpp"
#include "support.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

using namespace mfg;

namespace {

std::string error_of(const std::string& text) {
    try {
        build_run_config(ConfigDocument::parse(text, "t.cfg"));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        return e.what();
    }
    return "";
}

} // namespace

TEST_SUITE("cli_io") {

TEST_CASE("parse errors carry the line") {
    CHECK_THROWS_WITH(ConfigDocument::parse("grid.nx = 9\nno equals sign\n", "a.cfg"),
                      doctest::Contains("a.cfg:2:"));
    CHECK_THROWS_WITH(ConfigDocument::parse("grid.nx = 9\n\ngrid.nz = 3\n", "a.cfg"),
                      doctest::Contains("a.cfg:3: unknown key 'grid.nz'"));
    CHECK_THROWS_WITH(ConfigDocument::parse("grid.nx = 9\ngrid.nx = 3\n", "a.cfg"),
                      doctest::Contains("line 1"));
    CHECK(error_of("grid.nx = 9\ngrid.T = banana\n").find("t.cfg:2: grid.T") != std::string::npos);
    CHECK(error_of("hjb.sigma = -1\n").find("t.cfg:1:") != std::string::npos);
    CHECK(error_of("demand.model = monopoly\n").find("t.cfg:1: demand.model") != std::string::npos);
}

TEST_CASE("document round trip") {
    const ConfigDocument doc = ConfigDocument::load(testing::config_dir() / "bertrand_exp_small.cfg");
    const ConfigDocument again = ConfigDocument::parse(doc.text());
    CHECK(again.keys() == doc.keys());
    for (const std::string& k : doc.keys()) CHECK(again.get(k, "?") == doc.get(k, "!"));
    CHECK(doc.line("grid.nx") == 6);
    CHECK(doc.line("levy.theta") == 0);
    CHECK(resolve_key("eps0") == "demand.eps0");
}

TEST_CASE("every shipped config loads except the corrupted one") {
    for (const auto& entry : std::filesystem::directory_iterator(testing::config_dir())) {
        if (entry.path().extension() != ".cfg") continue;
        const std::string name = entry.path().stem().string();
        INFO(name);
        if (name == "corrupted_m0") {
            CHECK_THROWS_WITH_AS(load_run_config(entry.path()), doctest::Contains("node 60"), Error);
        } else {
            CHECK_NOTHROW(load_run_config(entry.path()));
        }
    }
}

TEST_CASE("numbers survive a csv round trip") {
    const double values[] = {0.1, 1.0 / 3.0, -2.5e-300, std::numeric_limits<double>::max(), 6.02214076e23,
                             std::nextafter(1.0, 2.0)};
    for (double v : values) CHECK(std::stod(format_number(v)) == v);

    const Grid g(6.0, 19, 1.0, 5);
    Field f(g, Unit::currency, true);
    for (std::size_t n = 0; n <= g.nt; ++n) {
        f.set_row(n, testing::sample(g, [&](double x) { return std::sin(x * (n + 1)) / 7.0; }));
    }
    const auto dir = testing::scratch("csv");
    write_field_csv(dir / "f.csv", f);
    const Field back = read_field_csv(dir / "f.csv", g, Unit::currency, true);
    CHECK(back.data().size() == f.data().size());
    CHECK(std::equal(back.data().begin(), back.data().end(), f.data().begin()));

    write_text(dir / "p.csv", "# comment\n0,1.5\n\n0.2,2\n0.4,2.5\n0.6,3\n");
    const Grid tiny(0.6, 2, 1.0, 1);
    const Profile p = read_profile_csv(dir / "p.csv", tiny);
    CHECK(p == Profile{1.5, 2.0, 2.5, 3.0});
    CHECK_THROWS_AS(read_profile_csv(dir / "p.csv", g), Error);
}

TEST_CASE("solve, verify and simulate from the command layer") {
    const auto dir = testing::scratch("solve");
    std::ostringstream log;
    const int code = cmd_solve(testing::config_dir() / "bertrand_exp_decoupled.cfg", dir, log);
    INFO(log.str());
    REQUIRE(code == exit_ok);
    for (const char* f : {"u.csv", "m.csv", "q.csv", "price.csv", "traces.csv", "iterations.csv", "profiles.csv",
                          "report.txt", "report.csv", "config.cfg", "plot.gp"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    const Traces tr = read_traces_csv(dir / "traces.csv");
    CHECK(std::fabs(tr.eta.front() - 1.0) <= 1e-6);

    std::ostringstream vlog;
    CHECK(cmd_verify(dir, std::nullopt, vlog) == exit_ok);
    CHECK(vlog.str().find("matches stored report.csv") != std::string::npos);

    std::ostringstream slog;
    CHECK(cmd_simulate(testing::config_dir() / "bertrand_exp_decoupled.cfg", dir, std::nullopt, 11u, slog) == exit_ok);
    CHECK(std::filesystem::exists(dir / "histograms.csv"));
    CHECK(std::filesystem::exists(dir / "zscores.csv"));
}

TEST_CASE("bad inputs map to exit codes") {
    std::ostringstream log;
    CHECK(cmd_solve(testing::config_dir() / "corrupted_m0.cfg", testing::scratch("bad"), log) == exit_bad_config);
    CHECK(log.str().find("corrupted_m0.cfg:") != std::string::npos);
    CHECK(cmd_solve(testing::config_dir() / "missing.cfg", testing::scratch("bad"), log) == exit_bad_config);

    const auto dir = testing::scratch("capped");
    ConfigDocument doc = ConfigDocument::load(testing::config_dir() / "bertrand_exp_small.cfg");
    doc.set("coupler.max_iter", "2");
    doc.set("coupler.tol", "1e-14");
    std::ofstream(dir / "c.cfg") << doc.text();
    CHECK(cmd_solve(dir / "c.cfg", dir, log) == exit_not_converged);
}

TEST_CASE("sweep writes one row per value") {
    const auto dir = testing::scratch("sweep");
    std::ostringstream log;
    const int code = cmd_sweep(testing::config_dir() / "degenerate_lambda0.cfg", "eps0", {"0", "0.05"}, dir, log);
    INFO(log.str());
    CHECK(code == exit_ok);
    const std::string csv = read_text(dir / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(cmd_sweep(testing::config_dir() / "degenerate_lambda0.cfg", "nonsense", {"1"}, dir, log) == exit_bad_config);
}

}
