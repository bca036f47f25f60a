#include "abscat/cli.hpp"
#include "abscat/errors.hpp"

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace abscat::cli {

namespace {

std::pair<int, int> parse_range_flag(const std::string& text)
{
    const auto colon = text.find(':');
    try {
        if (colon != std::string::npos) {
            std::size_t a = 0;
            std::size_t b = 0;
            const std::string lo_text = text.substr(0, colon);
            const std::string hi_text = text.substr(colon + 1);
            const int lo = std::stoi(lo_text, &a);
            const int hi = std::stoi(hi_text, &b);
            if (a == lo_text.size() && b == hi_text.size() && lo <= hi) {
                return {lo, hi};
            }
        }
    }
    catch (const std::exception&) {
    }
    throw ConfigError("--m-range: expected 'auto' or lo:hi, got '" + text + "'");
}

} // namespace

int main_entry(int argc, char** argv)
{
    CLI::App app{"Aharonov-Bohm scattering with absorbing cores"};
    app.require_subcommand(1);

    std::string run_config;
    std::optional<std::string> run_out;
    std::string run_format;
    std::string run_range;
    auto* run = app.add_subcommand("run", "solve a scenario and write its tables");
    run->add_option("config", run_config, "scenario file")->required();
    run->add_option("--out", run_out, "output directory");
    run->add_option("--format", run_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--m-range", run_range, "auto or lo:hi");

    bool strict = false;
    auto* cert = app.add_subcommand("certify", "run the oracle certification suite");
    cert->add_flag("--strict", strict, "tighten the integration tolerance by 100");

    std::string sweep_config;
    std::vector<std::string> vary;
    std::optional<std::string> sweep_out;
    auto* sw = app.add_subcommand("sweep", "total absorption over a parameter grid");
    sw->add_option("config", sweep_config, "scenario file")->required();
    sw->add_option("--vary", vary, "name=lo:hi:step or name=v1,v2,... (repeatable)")->required();
    sw->add_option("--out", sweep_out, "output directory");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) {
            Scenario sc = load_scenario(run_config);
            if (run_format == "csv") {
                sc.output.format = OutputFormat::Csv;
            }
            else if (run_format == "json") {
                sc.output.format = OutputFormat::Json;
            }
            if (run_range == "auto") {
                sc.m_range.reset();
            }
            else if (!run_range.empty()) {
                sc.m_range = parse_range_flag(run_range);
            }
            try {
                resolve_mode_range(sc);
            }
            catch (const IncompleteRangeError& e) {
                throw ConfigError(e.what());
            }
            const auto result = run_scenario(sc, output_directory(sc, run_out));
            std::printf("modes %d..%d  total_abs %.17g\n", result.report.mode_range.first,
                        result.report.mode_range.second, result.report.total_abs);
            for (const auto& path : result.written) {
                std::printf("wrote %s\n", path.c_str());
            }
            return kExitOk;
        }
        if (cert->parsed()) {
            const auto report = certify(strict ? CertifyProfile::strict() : CertifyProfile::standard());
            print_certify(std::cout, report);
            return report.passed() ? kExitOk : kExitCertification;
        }
        const Scenario sc = load_scenario(sweep_config);
        std::vector<SweepAxis> axes;
        for (const auto& spec : vary) {
            axes.push_back(parse_sweep_axis(spec));
        }
        const auto points = sweep(sc, axes);
        const std::string table = format_sweep(axes, points);
        const std::filesystem::path dir(output_directory(sc, sweep_out));
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "sweep.csv", std::ios::binary) << table;
        std::cout << table;
        const bool ok = std::all_of(points.begin(), points.end(),
                                    [](const SweepPoint& p) { return p.status == "ok"; });
        return ok ? kExitOk : kExitSolver;
    }
    catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const YAML::Exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    }
    catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}

} // namespace abscat::cli
