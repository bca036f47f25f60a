#pragma once
//! \file cli.hpp
//! Scenario files, the run/sweep drivers and the certification suite behind
//! the `abscat` command-line tool. The scenario schema is documented in
//! README.md.

#include "abscat/quartic.hpp"
#include "abscat/scatter.hpp"
#include "abscat/specfun.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace abscat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitCertification = 3;

//! Environment variable overriding the output directory of a scenario.
inline constexpr const char* kOutputDirEnv = "ABSCAT_OUTPUT_DIR";

enum class OutputFormat { Csv, Json };

struct OutputSpec {
    OutputFormat format = OutputFormat::Csv;
    std::string dir = ".";
    bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
    std::variant<ScatteringConfig, quartic::QuarticConfig> potential;
    ModelSchedule schedule;                     //!< inverse-square models
    quartic::QuarticSchedule quartic_schedule;  //!< inverse-quartic models
    std::optional<std::pair<int, int>> m_range; //!< empty: auto
    int auto_margin = 10;                       //!< Regular modes added on each side by auto
    std::vector<double> phi_samples;
    double tolerance = 1e-10;                   //!< quartic connection tolerance
    OutputSpec output;

    bool is_quartic() const { return potential.index() == 1; }
    bool operator==(const Scenario&) const = default;
};

//! Parses YAML text. Errors are ConfigError with "<source>:<line>: <field>: ...".
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);
//! YAML text that parses back to an identical Scenario.
std::string dump_scenario(const Scenario& scenario);

//! Mode range actually used: the configured one, or the non-Regular modes
//! plus auto_margin on each side. Throws IncompleteRangeError when a
//! configured range misses a non-Regular mode.
std::pair<int, int> resolve_mode_range(const Scenario& scenario);

struct RunResult {
    CrossSectionReport report;
    std::string model_description;
    std::vector<std::string> written; //!< output files
};

//! Solves the scenario and writes its output into `out_dir` (created if
//! missing): modes.csv, summary.csv, differential.dat for CSV, result.json
//! for JSON. Solver errors carry the mode index.
RunResult run_scenario(const Scenario& scenario, const std::string& out_dir);

//! Output directory precedence: explicit flag, then $ABSCAT_OUTPUT_DIR, then
//! the scenario's output.dir.
std::string output_directory(const Scenario& scenario, const std::optional<std::string>& flag);

//! Rendering used by run_scenario; exposed for golden-file tests.
std::string format_mode_table(const CrossSectionReport& report);
std::string format_summary(const Scenario& scenario, const RunResult& result);
std::string format_differential(const CrossSectionReport& report);
std::string format_json(const Scenario& scenario, const RunResult& result);

//! One varied parameter: name in {beta, gamma, lambda, p} and an inclusive
//! range lo:hi:step.
struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

//! Parses "name=lo:hi:step" or "name=v1,v2,...".
SweepAxis parse_sweep_axis(const std::string& spec);

struct SweepPoint {
    std::vector<double> values; //!< one per axis
    std::optional<double> total_abs;
    std::string status;         //!< "ok" or the error message
};

//! Cartesian product of the axes, evaluated concurrently, results in
//! lexicographic axis order.
std::vector<SweepPoint> sweep(const Scenario& base, const std::vector<SweepAxis>& axes);
std::string format_sweep(const std::vector<SweepAxis>& axes, const std::vector<SweepPoint>& points);

//! Random non-degenerate channel with a model valid for its regime:
//! beta in [0, 0.9], gamma in (0, 3], p in [0.3, 3]. Shared by certify and
//! the test suites.
struct ChannelDraw {
    ScatteringConfig cfg;
    PartialMode mode;
    BoundaryModel model;
};
ChannelDraw draw_channel(std::mt19937_64& rng);

//! H1 and H2 at (order, x), replaceable for fault injection.
using HankelProvider = std::function<std::pair<specfun::ValueAndDerivative, specfun::ValueAndDerivative>(
    specfun::Order, double)>;
HankelProvider default_hankel_provider();

struct CertifyProfile {
    double tau = 1e-13;        //!< oracle integration tolerance
    double quartic_tol = 1e-10;
    int wronskian_samples = 200;
    int channel_samples = 50;
    unsigned seed = 20240611;
    static CertifyProfile standard();
    static CertifyProfile strict(); //!< tau / 100
};

struct CertifyCheck {
    std::string name;
    double worst = 0.0;
    double threshold = 0.0;
    bool passed = false;
};

struct CertifyReport {
    std::vector<CertifyCheck> checks;
    bool passed() const;
};

CertifyReport certify(const CertifyProfile& profile,
                      const HankelProvider& hankel = default_hankel_provider());
void print_certify(std::ostream& os, const CertifyReport& report);

//! Entry point of the tool; returns the exit code.
int main_entry(int argc, char** argv);

} // namespace abscat::cli
