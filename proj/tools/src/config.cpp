// Copyright casimir-piston contributors
// SPDX-License-Identifier: Apache-2.0
//! \file config.cpp
#include "casimir/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace casimir::cli
{
namespace
{
//! Position of a token for error messages.
struct Where
{
    std::string const& source;
    std::size_t line;
    std::size_t column;
};

[[noreturn]] void fail(Where const& at, std::string const& msg)
{
    std::ostringstream os;
    os << at.source << ':' << at.line << ':' << at.column << ": " << msg;
    throw ConfigError(os.str());
}

std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
    {
        return {};
    }
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, Where const& at)
{
    double value = 0;
    auto const* end = text.data() + text.size();
    auto const [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    {
        fail(at, "expected a finite number, got '" + std::string{text} + "'");
    }
    return value;
}

std::uint64_t parse_unsigned(std::string_view text, Where const& at)
{
    std::uint64_t value = 0;
    auto const* end = text.data() + text.size();
    auto const [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
    {
        fail(at, "expected a non-negative integer, got '" + std::string{text} + "'");
    }
    return value;
}

bool parse_bool(std::string_view text, Where const& at)
{
    if (text == "true" || text == "on" || text == "yes" || text == "1")
    {
        return true;
    }
    if (text == "false" || text == "off" || text == "no" || text == "0")
    {
        return false;
    }
    fail(at, "expected true or false, got '" + std::string{text} + "'");
}

std::vector<double> parse_list(std::string_view text, Where const& at)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (true)
    {
        auto const comma = text.find(',', pos);
        auto const item = trim(text.substr(pos, comma - pos));
        if (item.empty())
        {
            fail(at, "empty list element");
        }
        out.push_back(parse_real(item, at));
        if (comma == std::string_view::npos)
        {
            return out;
        }
        pos = comma + 1;
    }
}

using Setter = std::function<void(RunConfig&, std::string_view, Where const&)>;

std::map<std::string, Setter, std::less<>> const& setters()
{
    static std::map<std::string, Setter, std::less<>> const table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto real = [&](std::string key, auto get) {
            t.emplace(std::move(key), [get](RunConfig& c, std::string_view v, Where const& at) {
                get(c) = parse_real(v, at);
            });
        };
        auto count = [&](std::string key, auto get) {
            t.emplace(std::move(key), [get](RunConfig& c, std::string_view v, Where const& at) {
                get(c) = static_cast<std::size_t>(parse_unsigned(v, at));
            });
        };
        auto flag = [&](std::string key, auto get) {
            t.emplace(std::move(key), [get](RunConfig& c, std::string_view v, Where const& at) {
                get(c) = parse_bool(v, at);
            });
        };
        auto list = [&](std::string key, auto get) {
            t.emplace(std::move(key), [get](RunConfig& c, std::string_view v, Where const& at) {
                get(c) = parse_list(v, at);
            });
        };
        auto text = [&](std::string key, auto get) {
            t.emplace(std::move(key), [get](RunConfig& c, std::string_view v, Where const&) {
                get(c) = std::string{v};
            });
        };

        real("geometry.R", [](RunConfig& c) -> auto& { return c.geometry.R; });
        real("geometry.r", [](RunConfig& c) -> auto& { return c.geometry.r; });
        real("geometry.L", [](RunConfig& c) -> auto& { return c.geometry.L; });
        t.emplace("geometry.shape", [](RunConfig& c, std::string_view v, Where const& at) {
            if (v == "flask")
                c.geometry.shape = Shape::flask;
            else if (v == "cylinder")
                c.geometry.shape = Shape::cylinder;
            else
                fail(at, "geometry.shape must be flask or cylinder");
        });

        list("scan.a_values", [](RunConfig& c) -> auto& { return c.scan.a_values; });
        real("scan.a_min", [](RunConfig& c) -> auto& { return c.scan.a_min; });
        real("scan.a_max", [](RunConfig& c) -> auto& { return c.scan.a_max; });
        t.emplace("scan.n", [](RunConfig& c, std::string_view v, Where const& at) {
            c.scan.n = static_cast<std::size_t>(parse_unsigned(v, at));
        });
        t.emplace("scan.spacing", [](RunConfig& c, std::string_view v, Where const& at) {
            if (v == "linear")
                c.scan.log_spacing = false;
            else if (v == "log")
                c.scan.log_spacing = true;
            else
                fail(at, "scan.spacing must be linear or log");
        });

        count("mc.n_loops", [](RunConfig& c) -> auto& { return c.mc.n_loops; });
        count("mc.n_points", [](RunConfig& c) -> auto& { return c.mc.n_points; });
        count("mc.n_beta", [](RunConfig& c) -> auto& { return c.mc.n_beta; });
        real("mc.beta_min_factor", [](RunConfig& c) -> auto& { return c.mc.beta_min_factor; });
        real("mc.beta_max_factor", [](RunConfig& c) -> auto& { return c.mc.beta_max_factor; });
        t.emplace("mc.seed", [](RunConfig& c, std::string_view v, Where const& at) {
            c.mc.seed = parse_unsigned(v, at);
        });
        count("mc.x_samples_per_beta", [](RunConfig& c) -> auto& { return c.mc.x_samples_per_beta; });
        t.emplace("mc.x_sampling", [](RunConfig& c, std::string_view v, Where const& at) {
            if (v == "uniform")
                c.mc.x_sampling = XSampling::uniform;
            else if (v == "loop_adapted")
                c.mc.x_sampling = XSampling::loop_adapted;
            else
                fail(at, "mc.x_sampling must be uniform or loop_adapted");
        });
        flag("mc.doubling_study", [](RunConfig& c) -> auto& { return c.mc.doubling_study; });

        text("output.csv_path", [](RunConfig& c) -> auto& { return c.output.csv_path; });
        text("output.json_path", [](RunConfig& c) -> auto& { return c.output.json_path; });

        text("spectral.domain", [](RunConfig& c) -> auto& { return c.spectral.domain; });
        list("spectral.size", [](RunConfig& c) -> auto& { return c.spectral.size; });
        list("spectral.betas", [](RunConfig& c) -> auto& { return c.spectral.betas; });
        real("spectral.a", [](RunConfig& c) -> auto& { return c.spectral.a; });
        flag("spectral.mc", [](RunConfig& c) -> auto& { return c.spectral.mc; });

        real("bound.r", [](RunConfig& c) -> auto& { return c.bound.r; });
        real("bound.R", [](RunConfig& c) -> auto& { return c.bound.R; });
        real("bound.a", [](RunConfig& c) -> auto& { return c.bound.a; });
        return t;
    }();
    return table;
}

std::optional<double> try_real(std::string_view text)
{
    double value = 0;
    auto const* end = text.data() + text.size();
    auto const [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end)
    {
        return std::nullopt;
    }
    return value;
}

//! Typed copy of a raw value for the JSON echo: integers, reals, numeric
//! lists, else the text itself.
nlohmann::ordered_json echo_value(std::string_view raw)
{
    std::uint64_t integer = 0;
    auto const* end = raw.data() + raw.size();
    if (auto const [ptr, ec] = std::from_chars(raw.data(), end, integer); ec == std::errc{} && ptr == end)
    {
        return integer;
    }
    if (auto const real = try_real(raw))
    {
        return *real;
    }
    if (raw.find(',') != std::string_view::npos)
    {
        auto list = nlohmann::ordered_json::array();
        std::size_t pos = 0;
        while (true)
        {
            auto const comma = raw.find(',', pos);
            auto const item = try_real(trim(raw.substr(pos, comma - pos)));
            if (!item)
            {
                return std::string{raw};
            }
            list.push_back(*item);
            if (comma == std::string_view::npos)
            {
                return list;
            }
            pos = comma + 1;
        }
    }
    return std::string{raw};
}

}  // namespace

//---------------------------------------------------------------------------//
RunConfig parse_config(std::string_view text, std::string const& source)
{
    RunConfig cfg;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto const eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto const hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        if (trim(line).empty())
        {
            continue;
        }
        auto const column_of = [&](std::string_view part) {
            return static_cast<std::size_t>(part.data() - line.data()) + 1;
        };

        auto const eq = line.find('=');
        auto const key = trim(line.substr(0, eq));
        if (eq == std::string_view::npos)
        {
            fail({source, line_no, column_of(key)}, "expected 'key = value'");
        }
        Where const key_at{source, line_no, key.empty() ? eq + 1 : column_of(key)};
        if (key.empty())
        {
            fail(key_at, "missing key before '='");
        }
        auto const value = trim(line.substr(eq + 1));
        Where const value_at{source, line_no, value.empty() ? eq + 2 : column_of(value)};
        if (value.empty())
        {
            fail(value_at, "missing value for '" + std::string{key} + "'");
        }

        auto const setter = setters().find(key);
        if (setter == setters().end())
        {
            fail(key_at, "unknown key '" + std::string{key} + "'");
        }
        if (auto const prev = seen.find(key); prev != seen.end())
        {
            fail(key_at, "duplicate key '" + std::string{key} + "' (first set on line "
                             + std::to_string(prev->second) + ")");
        }
        seen.emplace(std::string{key}, line_no);
        setter->second(cfg, value, value_at);
        cfg.echo[std::string{key}] = echo_value(value);
    }

    if (!cfg.scan.a_values.empty() && (cfg.scan.a_min || cfg.scan.a_max || cfg.scan.n))
    {
        throw ConfigError(source + ": give either scan.a_values or scan.a_min/a_max/n, not both");
    }
    if (cfg.mc.n_loops < 1 || cfg.mc.n_points < 2 || cfg.mc.n_beta < 3 || cfg.mc.x_samples_per_beta < 1)
    {
        throw ConfigError(source
                          + ": need mc.n_loops >= 1, mc.n_points >= 2, mc.n_beta >= 3 and "
                            "mc.x_samples_per_beta >= 1");
    }
    if (!(cfg.mc.beta_min_factor > 0) || !(cfg.mc.beta_max_factor > 0))
    {
        throw ConfigError(source + ": beta grid factors must be positive");
    }
    return cfg;
}

RunConfig load_config(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw IoError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

//---------------------------------------------------------------------------//
std::vector<double> RunConfig::heights() const
{
    if (!scan.a_values.empty())
    {
        return scan.a_values;
    }
    if (!scan.a_min || !scan.a_max || !scan.n)
    {
        throw ConfigError("scan needs scan.a_values or all of scan.a_min, scan.a_max, scan.n");
    }
    if (*scan.n < 2 || !(*scan.a_max > *scan.a_min) || !(*scan.a_min > 0))
    {
        throw ConfigError("scan range needs 0 < a_min < a_max and n >= 2");
    }
    std::vector<double> out;
    double const lo = scan.log_spacing ? std::log(*scan.a_min) : *scan.a_min;
    double const hi = scan.log_spacing ? std::log(*scan.a_max) : *scan.a_max;
    for (std::size_t k = 0; k < *scan.n; ++k)
    {
        double const t = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(*scan.n - 1);
        out.push_back(scan.log_spacing ? std::exp(t) : t);
    }
    out.front() = *scan.a_min;
    out.back() = *scan.a_max;
    return out;
}

std::uint64_t RunConfig::require_seed() const
{
    if (!mc.seed)
    {
        throw ConfigError("mc.seed is required (set it in the config or pass --seed)");
    }
    return *mc.seed;
}

GridPolicy RunConfig::grid_policy() const
{
    return {mc.n_beta, mc.beta_min_factor, mc.beta_max_factor};
}

XSampler RunConfig::x_sampler() const
{
    return {mc.x_sampling, require_seed(), mc.x_samples_per_beta};
}

}  // namespace casimir::cli
