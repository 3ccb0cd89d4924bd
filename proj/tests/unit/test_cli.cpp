// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file test_cli.cpp
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

#include "casimir/cli/checks.hpp"
#include "casimir/cli/commands.hpp"
#include "casimir/cli/config.hpp"
#include "casimir/cli/report.hpp"

using namespace casimir;
using namespace casimir::cli;
namespace fs = std::filesystem;

namespace
{
std::string error_of(std::string const& text)
{
    try
    {
        parse_config(text, "t.cfg");
    }
    catch (ConfigError const& e)
    {
        return e.what();
    }
    return {};
}

//! Fresh scratch directory, removed on scope exit.
struct Scratch
{
    fs::path dir;

    explicit Scratch(std::string const& name) : dir{fs::temp_directory_path() / ("casimir_test_" + name)}
    {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }

    fs::path write(std::string const& name, std::string const& text) const
    {
        std::ofstream{dir / name} << text;
        return dir / name;
    }
};

std::string slurp(fs::path const& p)
{
    std::ifstream in{p, std::ios::binary};
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(std::string const& command, fs::path const& config, fs::path const& out_dir, std::string* out = nullptr)
{
    std::ostringstream o;
    std::ostringstream e;
    int const code = run(CommandLine{command, config, std::nullopt, out_dir}, o, e);
    if (out)
        *out = o.str() + e.str();
    return code;
}

constexpr char const* small_scan = R"(geometry.R = 1
geometry.r = 0.8
geometry.L = 2.5
scan.a_values = 0.1, 0.2, 0.3
mc.seed = 5
mc.n_loops = 600
mc.n_points = 64
mc.n_beta = 8
mc.doubling_study = false
)";

}  // namespace

TEST_CASE("config: values, lists and comments")
{
    auto const c = parse_config(R"(# comment
geometry.R = 1.5   # trailing
geometry.r=.5
geometry.L = 4
geometry.shape = cylinder
scan.a_min = 0.1
scan.a_max = 0.9
scan.n = 5
scan.spacing = log
mc.seed = 42
mc.n_points = 128
mc.x_sampling = uniform
mc.doubling_study = off
)",
                                "t.cfg");
    CHECK(*c.geometry.R == 1.5);
    CHECK(*c.geometry.r == 0.5);
    CHECK(c.geometry.shape == Shape::cylinder);
    CHECK(c.require_seed() == 42);
    CHECK(c.mc.n_points == 128);
    CHECK(c.mc.n_loops == 20000);
    CHECK(c.mc.x_sampling == XSampling::uniform);
    CHECK_FALSE(c.mc.doubling_study);
    auto const h = c.heights();
    REQUIRE(h.size() == 5);
    CHECK(h.front() == 0.1);
    CHECK(h.back() == 0.9);
    CHECK(h[2] == doctest::Approx(0.3));  // geometric mean
    CHECK(c.echo["geometry.r"] == 0.5);
    CHECK(c.echo["mc.x_sampling"] == "uniform");
    CHECK(c.echo.begin().key() == "geometry.R");

    auto const lin = parse_config("scan.a_min = 0.1\nscan.a_max = 0.9\nscan.n = 5\n", "t");
    CHECK(lin.heights()[2] == doctest::Approx(0.5));
    auto const list = parse_config("scan.a_values = 0.1, 0.25 ,0.4\n", "t");
    CHECK(list.heights() == std::vector<double>{0.1, 0.25, 0.4});
}

TEST_CASE("config: errors carry positions")
{
    CHECK(error_of("geometry.R = 1\ngeometry.X = 2\n").starts_with("t.cfg:2:1: unknown key"));
    CHECK(error_of("mc.seed = 1\nmc.seed = 2\n").starts_with("t.cfg:2:1: duplicate key"));
    CHECK(error_of("geometry.R = abc\n").starts_with("t.cfg:1:14:"));
    CHECK(error_of("geometry.R 1\n").starts_with("t.cfg:1:"));
    CHECK(error_of("geometry.R =\n").find("missing value") != std::string::npos);
    CHECK_FALSE(error_of("mc.n_points = 1\n").empty());
    CHECK_FALSE(error_of("mc.n_loops = 0\n").empty());
    CHECK_FALSE(error_of("mc.n_beta = 2\n").empty());
    CHECK_FALSE(error_of("mc.n_loops = -3\n").empty());
    CHECK_FALSE(error_of("mc.doubling_study = maybe\n").empty());
    CHECK_FALSE(error_of("mc.x_sampling = cubic\n").empty());
    CHECK_FALSE(error_of("scan.a_values = 0.1, x\n").empty());
    CHECK_FALSE(error_of("scan.a_values = 0.1\nscan.a_min = 0.1\n").empty());
    CHECK(error_of("mc.seed = 3 # fine\n").empty());

    auto const no_seed = parse_config("mc.n_loops = 10\n", "t");
    CHECK_THROWS_AS(no_seed.require_seed(), ConfigError);
    CHECK_THROWS_AS(no_seed.heights(), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.cfg"), IoError);
}

TEST_CASE("scan_csv format")
{
    ScanResult scan;
    scan.heights = {0.5};
    EnergyEstimate e;
    e.value = -1.25e-3;
    e.std_error = 2e-5;
    e.plus_component = 0;
    e.minus_component = -1.25e-3;
    e.n_minus = 7;
    e.n_null = 93;
    e.tail_warning = true;
    scan.energies = {e};
    CHECK(scan_csv(scan)
          == "a,E_int,stderr,E_plus,E_minus,n_plus,n_minus,n_null,tail_flag\n"
             "5.0000000000000000e-01,-1.2500000000000000e-03,2.0000000000000002e-05,"
             "0.0000000000000000e+00,-1.2500000000000000e-03,0,7,93,1\n");
}

TEST_CASE("run: exit codes")
{
    Scratch s{"exit"};
    std::string out;

    CHECK(run_cli("bound", s.dir / "missing.cfg", s.dir, &out) == exit_io_error);
    CHECK(run_cli("bound", s.write("bad.cfg", "bound.r = 0\nbound.R = 1\nbound.a = 0.1\n"), s.dir) == exit_config_error);
    CHECK(run_cli("bound", s.write("typo.cfg", "bound.q = 1\n"), s.dir, &out) == exit_config_error);
    CHECK(out.find("typo.cfg:1:1") != std::string::npos);
    CHECK(run_cli("spectral", s.write("dom.cfg", "spectral.domain = torus\nspectral.betas = 1\n"), s.dir)
          == exit_config_error);

    CHECK(run_cli("bound", s.write("ok.cfg", "bound.r = 0.1\nbound.R = 1\nbound.a = 0.05\n"), s.dir, &out) == exit_ok);
    CHECK(out.find("2.05") != std::string::npos);

    auto const tiny = s.write("tiny.cfg", "geometry.R = 1\ngeometry.r = 0.5\ngeometry.L = 4\n"
                                          "scan.a_values = 0.1, 0.2, 0.4\nmc.seed = 1\nmc.n_loops = 10\n"
                                          "mc.n_points = 64\n");
    CHECK(run_cli("validate", tiny, s.dir, &out) == exit_check_failed);
    CHECK(out.find("n_loops") != std::string::npos);

    // Scan errors: unwritable output, conflicting scan keys, a height above L.
    auto const scan_cfg = s.write("scan.cfg", small_scan);
    fs::path const blocker = s.write("file", "x");
    CHECK(run_cli("scan", scan_cfg, blocker / "sub", &out) == exit_io_error);
    CHECK(run_cli("scan", s.write("far.cfg", std::string{small_scan} + "scan.a_min = 0.1\n"), s.dir)
          == exit_config_error);
    auto const high = s.write("high.cfg", "geometry.R = 1\ngeometry.r = 0.8\ngeometry.L = 2.5\n"
                                          "scan.a_values = 0.1, 0.2, 3\nmc.seed = 5\nmc.n_loops = 100\n");
    CHECK(run_cli("scan", high, s.dir, &out) == exit_config_error);

    ::setenv("CASIMIR_THREADS", "0", 1);
    CHECK(run_cli("bound", s.dir / "ok.cfg", s.dir) == exit_config_error);
    ::unsetenv("CASIMIR_THREADS");
}

TEST_CASE("run: --seed overrides the config seed")
{
    Scratch s{"seed"};
    auto const cfg = s.write("scan.cfg", small_scan);
    std::ostringstream o, e;
    REQUIRE(run(CommandLine{"scan", cfg, 99, s.dir}, o, e) == exit_ok);
    auto const json = nlohmann::json::parse(slurp(s.dir / "scan.json"));
    CHECK(json["seed"] == 99);
    CHECK(json["config"]["mc.seed"] == 99);
    CHECK(json["rows"].size() == 3);
    CHECK(json.contains("equilibrium"));
}

TEST_CASE("run: scan output is byte-identical across worker counts")
{
    Scratch s{"repro"};
    auto const cfg = s.write("scan.cfg", small_scan);
    fs::create_directories(s.dir / "one");
    fs::create_directories(s.dir / "two");
    ::setenv("CASIMIR_THREADS", "1", 1);
    REQUIRE(run_cli("scan", cfg, s.dir / "one") == exit_ok);
    ::setenv("CASIMIR_THREADS", "2", 1);
    REQUIRE(run_cli("scan", cfg, s.dir / "two") == exit_ok);
    ::unsetenv("CASIMIR_THREADS");
    CHECK(slurp(s.dir / "one" / "scan.csv") == slurp(s.dir / "two" / "scan.csv"));
    CHECK(slurp(s.dir / "one" / "scan.json") == slurp(s.dir / "two" / "scan.json"));
    CHECK(slurp(s.dir / "one" / "scan.csv").find('\r') == std::string::npos);
}

TEST_CASE("run: spectral and shipped configs parse")
{
    Scratch s{"spectral"};
    std::string out;
    auto const interval = s.write("i.cfg", "spectral.domain = interval\nspectral.size = 2\nspectral.betas = 0.5\n");
    CHECK(run_cli("spectral", interval, s.dir, &out) == exit_ok);
    CHECK(out.find("0.628379421") != std::string::npos);

    for (auto const& entry : fs::directory_iterator{fs::path{CASIMIR_SOURCE_DIR} / "configs"})
    {
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(load_config(entry.path()));
    }
}

TEST_CASE("checks: helpers")
{
    Comparison const c{"x", 1.2, 1.0, 0.1};
    CHECK(c.z() == doctest::Approx(2));
    CHECK(c.within(3));
    CHECK_FALSE(c.within(1));
    CHECK(Comparison{"zero", 0, 0, 0}.within(3));
    CHECK_FALSE(Comparison{"exact", 1, 0, 0}.within(3));

    CHECK(theta_relation_residual() <= 1e-10);
    CHECK(check_theta_relation().pass);
    CHECK(check_disk_bound().pass);
    CHECK(weyl_residual(3, 100) <= 1e-9);
    CHECK(check_weyl_cancellation(3, 100).pass);
    CHECK_FALSE(check_bridge_law(1, 100, 64).pass);

    auto const moments = bridge_moments(4, 20000, 8);
    CHECK(moments.size() == 9);
    for (auto const& m : moments)
    {
        CAPTURE(m.label);
        CHECK(m.within(4));
    }
}
