#include "abscat/cli.hpp"
#include "abscat/errors.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace abscat::cli {

namespace {

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

// Rethrows `e` with the mode index prepended, keeping config errors apart.
[[noreturn]] void rethrow_for_mode(int m, const std::exception& e)
{
    const std::string tag = "mode m = " + std::to_string(m);
    std::string msg = e.what();
    if (msg.find(tag) == std::string::npos) {
        msg = tag + ": " + msg;
    }
    if (dynamic_cast<const ConfigError*>(&e)) {
        throw ConfigError(msg);
    }
    throw Error(msg);
}

std::string describe_schedule(const ModelSchedule& s)
{
    std::string out;
    auto add = [&out](const std::string& part) { out += (out.empty() ? "" : "; ") + part; };
    if (s.subcritical_default()) {
        add("subcritical=" + describe(*s.subcritical_default()));
    }
    if (s.supercritical_default()) {
        add("supercritical=" + describe(*s.supercritical_default()));
    }
    for (const auto& [m, model] : s.per_mode()) {
        add("m=" + std::to_string(m) + ":" + describe(model));
    }
    return out.empty() ? "regular only" : out;
}

std::string describe_schedule(const quartic::QuarticSchedule& s)
{
    return "|m|<=" + std::to_string(s.m_abs) + ":" + quartic::describe(s.inner)
           + "; |m|>" + std::to_string(s.m_abs) + ":" + quartic::describe(s.outer);
}

// Solves every mode of the scenario; `concurrent` spreads modes over threads.
CrossSectionReport compute(const Scenario& sc, bool concurrent)
{
    const auto range = resolve_mode_range(sc);
    const int n = range.second - range.first + 1;
    std::vector<ChannelSolution> channels(n);

    std::function<void(int)> solve_one;
    ScatteringConfig base;
    if (const auto* cfg = std::get_if<ScatteringConfig>(&sc.potential)) {
        base = *cfg;
        solve_one = [&](int i) {
            const int m = range.first + i;
            const PartialMode mode = classify_mode(*cfg, m);
            if (mode.regime == Regime::Regular) {
                channels[i] = make_channel(*cfg, mode, 0.5, 0.5);
                return;
            }
            const BoundaryModel* model = sc.schedule.lookup(mode);
            if (!model) {
                throw ModelRegimeMismatch("no boundary model configured for the "
                                          + to_string(mode.regime) + " regime");
            }
            channels[i] = solve_channel(*cfg, mode, *model);
        };
    }
    else {
        const auto& qcfg = std::get<quartic::QuarticConfig>(sc.potential);
        base = {qcfg.beta, 0.0, qcfg.p, qcfg.mass};
        solve_one = [&](int i) {
            const int m = range.first + i;
            channels[i] = quartic::quartic_smatrix(qcfg, m, sc.quartic_schedule(m), sc.tolerance);
        };
    }

    const auto failure = detail::parallel_for(n, concurrent, solve_one);
    if (failure) {
        try {
            std::rethrow_exception(failure->second);
        }
        catch (const std::exception& e) {
            rethrow_for_mode(range.first + failure->first, e);
        }
    }
    return assemble_report(base, std::move(channels), range, sc.phi_samples);
}

void write_file(const std::filesystem::path& path, const std::string& text,
                std::vector<std::string>& written)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    written.push_back(path.string());
}

} // namespace

std::pair<int, int> resolve_mode_range(const Scenario& sc)
{
    if (const auto* cfg = std::get_if<ScatteringConfig>(&sc.potential)) {
        const auto needed = non_regular_range(*cfg);
        if (sc.m_range) {
            if (needed && (needed->first < sc.m_range->first || needed->second > sc.m_range->second)) {
                throw IncompleteRangeError("m_range [" + std::to_string(sc.m_range->first) + ", "
                                           + std::to_string(sc.m_range->second)
                                           + "] misses non-Regular modes in ["
                                           + std::to_string(needed->first) + ", "
                                           + std::to_string(needed->second) + "]");
            }
            return *sc.m_range;
        }
        const auto core = needed.value_or(std::pair{0, 0});
        return {core.first - sc.auto_margin, core.second + sc.auto_margin};
    }
    if (sc.m_range) {
        return *sc.m_range;
    }
    const int reach = sc.quartic_schedule.m_abs + sc.auto_margin;
    return {-reach, reach + 1};
}

std::string output_directory(const Scenario& sc, const std::optional<std::string>& flag)
{
    if (flag) {
        return *flag;
    }
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) {
        return env;
    }
    return sc.output.dir;
}

std::string format_mode_table(const CrossSectionReport& report)
{
    std::string out = "m,regime,nu_squared,mu,re_S,im_S,abs_S,sigma_abs\n";
    for (const auto& ch : report.channels) {
        out += std::to_string(ch.mode.m) + "," + to_string(ch.mode.regime) + ","
               + g17(ch.mode.nu_squared) + "," + g17(ch.mode.mu) + "," + g17(ch.s_matrix.real())
               + "," + g17(ch.s_matrix.imag()) + "," + g17(std::abs(ch.s_matrix)) + ","
               + g17(ch.sigma_abs) + "\n";
    }
    return out;
}

std::string format_summary(const Scenario& sc, const RunResult& result)
{
    std::string out = "key,value\n";
    auto row = [&out](const std::string& k, const std::string& v) { out += k + "," + v + "\n"; };
    if (const auto* cfg = std::get_if<ScatteringConfig>(&sc.potential)) {
        row("potential", "inverse_square");
        row("beta", g17(cfg->beta));
        row("gamma", g17(cfg->gamma));
        row("p", g17(cfg->p));
        row("mass", g17(cfg->mass));
    }
    else {
        const auto& qc = std::get<quartic::QuarticConfig>(sc.potential);
        row("potential", "inverse_quartic");
        row("beta", g17(qc.beta));
        row("lambda", g17(qc.lambda));
        row("p", g17(qc.p));
        row("mass", g17(qc.mass));
    }
    row("m_lo", std::to_string(result.report.mode_range.first));
    row("m_hi", std::to_string(result.report.mode_range.second));
    row("total_abs", g17(result.report.total_abs));
    row("model", csv_quote(result.model_description));
    return out;
}

std::string format_differential(const CrossSectionReport& report)
{
    std::string out = "# phi dsigma_dphi\n";
    for (const auto& [phi, value] : report.differential_elastic) {
        out += g17(phi) + " " + g17(value) + "\n";
    }
    return out;
}

std::string format_json(const Scenario& sc, const RunResult& result)
{
    nlohmann::ordered_json j;
    if (const auto* cfg = std::get_if<ScatteringConfig>(&sc.potential)) {
        j["potential"] = {{"type", "inverse_square"}, {"beta", cfg->beta}, {"gamma", cfg->gamma},
                          {"p", cfg->p}, {"mass", cfg->mass}};
    }
    else {
        const auto& qc = std::get<quartic::QuarticConfig>(sc.potential);
        j["potential"] = {{"type", "inverse_quartic"}, {"beta", qc.beta}, {"lambda", qc.lambda},
                          {"p", qc.p}, {"mass", qc.mass}};
    }
    j["model"] = result.model_description;
    j["m_range"] = {result.report.mode_range.first, result.report.mode_range.second};
    j["total_abs"] = result.report.total_abs;
    auto modes = nlohmann::ordered_json::array();
    for (const auto& ch : result.report.channels) {
        modes.push_back({{"m", ch.mode.m},
                         {"regime", to_string(ch.mode.regime)},
                         {"nu_squared", ch.mode.nu_squared},
                         {"mu", ch.mode.mu},
                         {"re_S", ch.s_matrix.real()},
                         {"im_S", ch.s_matrix.imag()},
                         {"abs_S", std::abs(ch.s_matrix)},
                         {"sigma_abs", ch.sigma_abs}});
    }
    j["modes"] = std::move(modes);
    auto diff = nlohmann::ordered_json::array();
    for (const auto& [phi, value] : result.report.differential_elastic) {
        diff.push_back({phi, value});
    }
    j["differential"] = std::move(diff);
    return j.dump(2) + "\n";
}

RunResult run_scenario(const Scenario& sc, const std::string& out_dir)
{
    RunResult result;
    result.report = compute(sc, true);
    result.model_description = sc.is_quartic() ? describe_schedule(sc.quartic_schedule)
                                               : describe_schedule(sc.schedule);

    const std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error("cannot create output directory " + out_dir + ": " + ec.message());
    }
    if (sc.output.format == OutputFormat::Csv) {
        write_file(dir / "modes.csv", format_mode_table(result.report), result.written);
        write_file(dir / "summary.csv", format_summary(sc, result), result.written);
        write_file(dir / "differential.dat", format_differential(result.report), result.written);
    }
    else {
        write_file(dir / "result.json", format_json(sc, result), result.written);
    }
    return result;
}

SweepAxis parse_sweep_axis(const std::string& spec)
{
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("--vary '" + spec + "': expected name=lo:hi:step or name=v1,v2,...");
    }
    SweepAxis axis{spec.substr(0, eq), {}};
    if (axis.name != "beta" && axis.name != "gamma" && axis.name != "lambda" && axis.name != "p") {
        throw ConfigError("--vary: unknown parameter '" + axis.name + "' (beta, gamma, lambda, p)");
    }
    const std::string body = spec.substr(eq + 1);
    auto number = [&spec](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        }
        catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v)) {
            throw ConfigError("--vary '" + spec + "': bad number '" + s + "'");
        }
        return v;
    };
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, sep)) {
            parts.push_back(item);
        }
        return parts;
    };
    if (body.find(':') != std::string::npos) {
        const auto parts = split(body, ':');
        if (parts.size() != 3) {
            throw ConfigError("--vary '" + spec + "': expected lo:hi:step");
        }
        const double lo = number(parts[0]);
        const double hi = number(parts[1]);
        const double step = number(parts[2]);
        if (!(step > 0.0) || hi < lo) {
            throw ConfigError("--vary '" + spec + "': need step > 0 and lo <= hi");
        }
        const long count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
        if (count > 100000) {
            throw ConfigError("--vary '" + spec + "': too many points");
        }
        for (long i = 0; i < count; ++i) {
            axis.values.push_back(lo + static_cast<double>(i) * step);
        }
    }
    else {
        for (const auto& part : split(body, ',')) {
            axis.values.push_back(number(part));
        }
    }
    if (axis.values.empty()) {
        throw ConfigError("--vary '" + spec + "': no values");
    }
    return axis;
}

std::vector<SweepPoint> sweep(const Scenario& base, const std::vector<SweepAxis>& axes)
{
    for (const auto& axis : axes) {
        if (axis.name == "gamma" && base.is_quartic()) {
            throw ConfigError("--vary gamma needs an inverse_square scenario");
        }
        if (axis.name == "lambda" && !base.is_quartic()) {
            throw ConfigError("--vary lambda needs an inverse_quartic scenario");
        }
    }
    std::size_t total = 1;
    for (const auto& axis : axes) {
        total *= axis.values.size();
    }
    std::vector<SweepPoint> points(total);
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rest = k;
        auto& values = points[k].values;
        values.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            values[a] = axes[a].values[rest % axes[a].values.size()];
            rest /= axes[a].values.size();
        }
    }

    detail::parallel_for(static_cast<int>(total), true, [&](int k) {
        SweepPoint& point = points[k];
        Scenario sc = base;
        auto set = [&sc](const std::string& name, double v) {
            std::visit(
                [&](auto& cfg) {
                    if (name == "beta") {
                        cfg.beta = v;
                    }
                    else if (name == "p") {
                        cfg.p = v;
                    }
                    else if constexpr (std::is_same_v<std::decay_t<decltype(cfg)>, ScatteringConfig>) {
                        cfg.gamma = v;
                    }
                    else {
                        cfg.lambda = v;
                    }
                },
                sc.potential);
        };
        try {
            for (std::size_t a = 0; a < axes.size(); ++a) {
                set(axes[a].name, point.values[a]);
            }
            std::visit([](const auto& cfg) { cfg.validate(); }, sc.potential);
            point.total_abs = compute(sc, false).total_abs;
            point.status = "ok";
        }
        catch (const std::exception& e) {
            point.status = e.what();
        }
    });
    return points;
}

std::string format_sweep(const std::vector<SweepAxis>& axes, const std::vector<SweepPoint>& points)
{
    std::string out;
    for (const auto& axis : axes) {
        out += axis.name + ",";
    }
    out += "total_abs,status\n";
    for (const auto& point : points) {
        for (double v : point.values) {
            out += g17(v) + ",";
        }
        out += (point.total_abs ? g17(*point.total_abs) : std::string("nan")) + ","
               + csv_quote(point.status) + "\n";
    }
    return out;
}

} // namespace abscat::cli
