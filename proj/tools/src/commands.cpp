// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file commands.cpp
#include "casimir/cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>

#include "casimir/cli/checks.hpp"
#include "casimir/geometry.hpp"
#include "casimir/loops.hpp"
#include "casimir/parallel.hpp"
#include "casimir/spectral.hpp"

namespace casimir::cli
{
namespace
{
template<class... Args>
std::string format(char const* fmt, Args... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

double require(std::optional<double> const& v, char const* key)
{
    if (!v)
    {
        throw ConfigError(std::string{"missing required key '"} + key + "'");
    }
    return *v;
}

void write_file(std::filesystem::path const& path, std::string const& text)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << text;
    os.close();
    if (!os)
    {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

std::filesystem::path resolve(std::filesystem::path const& out_dir, std::string const& name)
{
    std::filesystem::path const p{name};
    return p.is_absolute() ? p : out_dir / p;
}

ScanResult scan_at(RunConfig const& config, FlaskSystem const& sys, std::vector<double> const& heights,
                   std::size_t n_points)
{
    return force_scan(sys, heights, config.grid_policy(),
                      LoopEnsemble{config.require_seed(), n_points, config.mc.n_loops},
                      config.x_sampler(), config.geometry.shape);
}

}  // namespace

//---------------------------------------------------------------------------//
ScanStudy run_scan_study(RunConfig const& config)
{
    config.require_seed();
    FlaskSystem sys;
    sys.bulb_radius = require(config.geometry.R, "geometry.R");
    sys.neck_radius = require(config.geometry.r, "geometry.r");
    sys.neck_length = require(config.geometry.L, "geometry.L");
    std::vector<double> const heights = config.heights();
    if (heights.size() < 3)
    {
        throw ConfigError("a scan needs at least 3 piston heights");
    }
    for (std::size_t k = 0; k < heights.size(); ++k)
    {
        FlaskSystem probe = sys;
        probe.piston_height = heights[k];
        try
        {
            probe.validate();
        }
        catch (std::invalid_argument const& e)
        {
            throw ConfigError(format("scan height a=%g: %s", heights[k], e.what()));
        }
        if (k > 0 && !(heights[k] > heights[k - 1]))
        {
            throw ConfigError("scan heights must be strictly increasing");
        }
    }
    sys.piston_height = heights.front();

    ScanStudy study;
    study.system = sys;
    if (config.geometry.shape == Shape::flask)
    {
        study.warnings = build_domains(sys).warnings;
    }
    study.scan = scan_at(config, sys, heights, config.mc.n_points);
    for (std::size_t k = 0; k < heights.size(); ++k)
    {
        if (study.scan.energies[k].tail_warning)
        {
            study.warnings.push_back(
                format("a=%g: first or last beta cell is not negligible; widen the beta grid", heights[k]));
        }
    }
    if (config.mc.doubling_study)
    {
        for (std::size_t n : {config.mc.n_points / 2, config.mc.n_points * 2})
        {
            if (n >= 2)
            {
                study.doubling.push_back({n, scan_at(config, sys, heights, n)});
            }
        }
    }
    return study;
}

//---------------------------------------------------------------------------//
int cmd_validate(RunConfig const& config, std::ostream& out)
{
    std::uint64_t const seed = config.require_seed();
    std::size_t const n_loops = config.mc.n_loops;
    std::size_t const n_points = config.mc.n_points;

    std::vector<std::function<CheckResult()>> const checks{
        [&] { return check_bridge_law(seed, n_loops, n_points); },
        [] { return check_theta_relation(); },
        [] { return check_disk_bound(); },
        [&] { return check_box_mc(seed, n_loops, n_points, 0.1); },
        [&] { return check_weyl_cancellation(seed, 100); },
        [&] { return check_factorization(seed, n_loops, n_points); },
        [&] { return check_hemisphere_exclusion(seed, n_loops, n_points, config.mc.n_beta); },
    };
    char const* const names[] = {"bridge covariance", "theta relation", "disk bound", "box MC (N-doubling)",
                                 "Weyl cancellation", "factorization", "hemisphere exclusion"};

    bool all = true;
    out << format("%-22s %-6s %s\n", "check", "result", "detail");
    for (std::size_t i = 0; i < checks.size(); ++i)
    {
        CheckResult r;
        try
        {
            r = checks[i]();
        }
        catch (std::exception const& e)
        {
            r = {names[i], false, std::string{"error: "} + e.what()};
        }
        all = all && r.pass;
        out << format("%-22s %-6s %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
    }
    return all ? exit_ok : exit_check_failed;
}

int cmd_scan(RunConfig const& config, std::filesystem::path const& out_dir, std::ostream& out)
{
    auto const start = std::chrono::steady_clock::now();
    ScanStudy const study = run_scan_study(config);
    std::string const csv = scan_csv(study.scan);
    std::string const json = scan_json(config, study).dump(2) + '\n';

    auto const csv_path = resolve(out_dir, config.output.csv_path);
    auto const json_path = resolve(out_dir, config.output.json_path);
    write_file(csv_path, csv);
    write_file(json_path, json);

    double const seconds
        = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << format("%-8s %-13s %-10s %-13s %-13s\n", "a", "E_int", "stderr", "E_plus", "E_minus");
    for (std::size_t k = 0; k < study.scan.heights.size(); ++k)
    {
        auto const& e = study.scan.energies[k];
        out << format("%-8.4g % -13.5e %-10.3e % -13.5e % -13.5e%s\n", study.scan.heights[k], e.value,
                      e.std_error, e.plus_component, e.minus_component, e.tail_warning ? "  tail!" : "");
    }
    if (auto const& eq = study.scan.equilibrium)
    {
        out << format("equilibrium bracket: a* in [%g, %g], a* ~ %g\n", eq->a_lo, eq->a_hi, eq->a_star);
    }
    else
    {
        out << "no force sign change on this scan\n";
    }
    for (auto const& w : study.warnings)
    {
        out << "warning: " << w << '\n';
    }
    out << "wrote " << csv_path.string() << " and " << json_path.string() << '\n';
    out << format("wall time %.2f s on %u worker(s)\n", seconds, worker_count());
    return exit_ok;
}

int cmd_spectral(RunConfig const& config, std::ostream& out)
{
    auto const& sp = config.spectral;
    if (sp.betas.empty())
    {
        throw ConfigError("spectral.betas must list at least one proper time");
    }
    for (double beta : sp.betas)
    {
        if (!(beta > 0))
        {
            throw ConfigError("spectral.betas must be positive");
        }
    }
    auto const need_size = [&](std::size_t n) {
        if (sp.size.size() != n)
        {
            throw ConfigError(format("spectral.size for domain '%s' needs %zu value(s)", sp.domain.c_str(), n));
        }
        for (double v : sp.size)
        {
            if (!(v > 0))
            {
                throw ConfigError("spectral.size values must be positive");
            }
        }
    };
    auto const mc = [&](Region const& region, Box const& box) {
        return phi_mc(region, sp.betas,
                      LoopEnsemble{config.require_seed(), config.mc.n_points, config.mc.n_loops}, box,
                      SpectralSampling{config.require_seed(), 1});
    };

    if (sp.domain == "interval")
    {
        need_size(1);
        out << format("%-10s %-22s %-22s\n", "beta", "eigsum", "poisson");
        for (double beta : sp.betas)
        {
            out << format("%-10g %-22.15g %-22.15g\n", beta, phi_interval_eigsum(sp.size[0], beta),
                          phi_interval_poisson(sp.size[0], beta));
        }
        return exit_ok;
    }
    if (sp.domain == "disk")
    {
        need_size(1);
        double const r = sp.size[0];
        out << format("%-10s %-22s %-22s\n", "beta", "eigsum", "bound r^2/(2 beta)");
        for (double beta : sp.betas)
        {
            out << format("%-10g %-22.15g %-22.15g\n", beta, phi_disk_eigsum(r, beta), r * r / (2 * beta));
        }
        return exit_ok;
    }
    if (sp.domain == "box")
    {
        need_size(3);
        Box const box{{0, 0, 0}, {sp.size[0], sp.size[1], sp.size[2]}};
        std::vector<SpectralEstimate> est;
        if (sp.mc)
        {
            est = mc(Region{box}, box);
        }
        out << format("%-10s %-22s %s\n", "beta", "eigsum", sp.mc ? "MC +- stderr (z)" : "");
        for (std::size_t b = 0; b < sp.betas.size(); ++b)
        {
            double const exact = phi_box_eigsum(sp.size[0], sp.size[1], sp.size[2], sp.betas[b]);
            out << format("%-10g %-22.15g", sp.betas[b], exact);
            if (sp.mc)
            {
                Comparison const c{"", est[b].value, exact, est[b].std_error};
                out << format(" %.8g +- %.3g (%.2f)", est[b].value, est[b].std_error, c.z());
            }
            out << '\n';
        }
        return exit_ok;
    }
    if (sp.domain.rfind("flask-D", 0) == 0 && sp.domain.size() == 8 && sp.domain[7] >= '0'
        && sp.domain[7] <= '3')
    {
        int const k = sp.domain[7] - '0';
        FlaskSystem sys;
        sys.bulb_radius = require(config.geometry.R, "geometry.R");
        sys.neck_radius = require(config.geometry.r, "geometry.r");
        sys.neck_length = require(config.geometry.L, "geometry.L");
        sys.piston_height = require(sp.a, "spectral.a");
        try
        {
            sys.validate();
        }
        catch (std::invalid_argument const& e)
        {
            throw ConfigError(e.what());
        }
        DomainSet const ds = build_domains(sys);
        AxialCylinder const& c = ds.sampling_region;
        Box const box{{-c.radius, -c.radius, c.z_min}, {c.radius, c.radius, c.z_max}};
        auto const est = mc(ds.domain(k), box);
        double const a0 = weyl_a0(ds.domain(k));
        double const a1 = weyl_a1(ds.domain(k));
        out << format("%-10s %-22s %s\n", "beta", "weyl(a0,a1)", "MC +- stderr");
        for (std::size_t b = 0; b < sp.betas.size(); ++b)
        {
            double const t = 2 * std::numbers::pi * sp.betas[b];
            out << format("%-10g %-22.15g %.8g +- %.3g\n", sp.betas[b], a0 / std::pow(t, 1.5) + a1 / t,
                          est[b].value, est[b].std_error);
        }
        return exit_ok;
    }
    throw ConfigError("unknown spectral.domain '" + sp.domain
                      + "' (expected interval, disk, box or flask-D0..flask-D3)");
}

int cmd_bound(RunConfig const& config, std::ostream& out)
{
    double const r = require(config.bound.r, "bound.r");
    double const big_r = require(config.bound.R, "bound.R");
    double const a = require(config.bound.a, "bound.a");
    if (!(r > 0) || !(big_r > 0) || !(a > 0))
    {
        throw ConfigError("bound.r, bound.R and bound.a must be positive");
    }
    double const d = 2 * big_r + a;
    double const bound = plate_bound(r, d);
    AsymptoticEstimate const est = asymptotic_minus(r, big_r, a);
    bool const inside = est.value < 0 && est.value > bound;
    out << format("plate separation d = 2R + a = %.12g\n", d);
    out << format("plate_bound(r, d)   = %.10e\n", bound);
    out << format("asymptotic_minus    = %.10e (quadrature error %.2e)\n", est.value, est.error);
    out << format("inside (bound, 0)   : %s\n", inside ? "yes" : "no");
    if (!est.regime_ok)
    {
        out << "note: outside the thin-neck regime R >> r; the asymptotic estimate is indicative only\n";
    }
    return exit_ok;
}

//---------------------------------------------------------------------------//
int run(CommandLine const& cl, std::ostream& out, std::ostream& err)
{
    try
    {
        (void)worker_count();  // reject a malformed CASIMIR_THREADS up front
    }
    catch (std::invalid_argument const& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_config_error;
    }

    try
    {
        RunConfig config = load_config(cl.config);
        if (cl.seed)
        {
            config.mc.seed = *cl.seed;
            config.echo["mc.seed"] = *cl.seed;
        }
        if (cl.command == "validate")
            return cmd_validate(config, out);
        if (cl.command == "scan")
            return cmd_scan(config, cl.out_dir, out);
        if (cl.command == "spectral")
            return cmd_spectral(config, out);
        if (cl.command == "bound")
            return cmd_bound(config, out);
        err << "error: unknown command '" << cl.command << "'\n";
        return exit_config_error;
    }
    catch (ConfigError const& e)
    {
        err << "config error: " << e.what() << '\n';
        return exit_config_error;
    }
    catch (IoError const& e)
    {
        err << "I/O error: " << e.what() << '\n';
        return exit_io_error;
    }
    catch (std::invalid_argument const& e)
    {
        err << "invalid input: " << e.what() << '\n';
        return exit_config_error;
    }
    catch (std::exception const& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_check_failed;
    }
}

}  // namespace casimir::cli
