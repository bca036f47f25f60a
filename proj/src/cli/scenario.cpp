#include "abscat/cli.hpp"
#include "abscat/errors.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace abscat::cli {

namespace {

std::string g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Reader {
  public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                           const std::string& message) const
    {
        std::string where = source_;
        if (node.IsDefined() && node.Mark().line >= 0) {
            where += ":" + std::to_string(node.Mark().line + 1);
        }
        throw ConfigError(where + ": " + field + ": " + message);
    }

    void only_keys(const YAML::Node& map, const std::string& field,
                   std::initializer_list<const char*> allowed) const
    {
        if (!map.IsMap()) {
            fail(map, field, "expected a mapping");
        }
        const std::set<std::string> ok(allowed.begin(), allowed.end());
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!ok.contains(key)) {
                fail(kv.first, field.empty() ? key : field + "." + key, "unknown key");
            }
        }
    }

    double number(const YAML::Node& node, const std::string& field) const
    {
        if (!node.IsScalar()) {
            fail(node, field, "expected a number");
        }
        try {
            const double v = node.as<double>();
            if (!std::isfinite(v)) {
                fail(node, field, "must be finite");
            }
            return v;
        }
        catch (const YAML::BadConversion&) {
            fail(node, field, "expected a number, got '" + node.Scalar() + "'");
        }
    }

    double number_or(const YAML::Node& map, const char* key, const std::string& field,
                     double fallback) const
    {
        const auto node = map[key];
        return node ? number(node, field) : fallback;
    }

    long integer(const YAML::Node& node, const std::string& field) const
    {
        if (!node.IsScalar()) {
            fail(node, field, "expected an integer");
        }
        try {
            return node.as<long>();
        }
        catch (const YAML::BadConversion&) {
            fail(node, field, "expected an integer, got '" + node.Scalar() + "'");
        }
    }

    std::string text(const YAML::Node& node, const std::string& field) const
    {
        if (!node.IsScalar()) {
            fail(node, field, "expected a string");
        }
        return node.Scalar();
    }

    std::pair<int, int> int_pair(const YAML::Node& node, const std::string& field) const
    {
        if (!node.IsSequence() || node.size() != 2) {
            fail(node, field, "expected [lo, hi]");
        }
        const long lo = integer(node[0], field);
        const long hi = integer(node[1], field);
        if (lo > hi) {
            fail(node, field, "lo > hi");
        }
        return {static_cast<int>(lo), static_cast<int>(hi)};
    }

    BoundaryModel model(const YAML::Node& node, const std::string& field) const
    {
        if (!node.IsMap() || !node["type"]) {
            fail(node, field, "expected a mapping with 'type'");
        }
        const auto type = text(node["type"], field + ".type");
        if (type == "elastic_subcritical") {
            only_keys(node, field, {"type", "l"});
            return model::ElasticSubcritical{number_or(node, "l", field + ".l", 0.0)};
        }
        if (type == "elastic_supercritical") {
            only_keys(node, field, {"type", "theta"});
            return model::ElasticSupercritical{number_or(node, "theta", field + ".theta", 0.0)};
        }
        if (type == "sink") {
            only_keys(node, field, {"type"});
            return model::Sink{};
        }
        if (type == "total_absorption") {
            only_keys(node, field, {"type", "window"});
            if (!node["window"]) {
                fail(node, field + ".window", "required for total_absorption");
            }
            const auto w = int_pair(node["window"], field + ".window");
            if (w.first > 0 || w.second < 0) {
                fail(node["window"], field + ".window", "window [-n_minus, n_plus] needs n_minus, n_plus >= 0");
            }
            return model::TotalAbsorption{w.first, w.second};
        }
        if (type == "custom") {
            only_keys(node, field, {"type", "ratio"});
            const auto r = node["ratio"];
            if (!r || !r.IsSequence() || r.size() != 2) {
                fail(node, field + ".ratio", "expected [re, im]");
            }
            return model::Custom{{number(r[0], field + ".ratio"), number(r[1], field + ".ratio")}};
        }
        fail(node["type"], field + ".type", "unknown model '" + type + "'");
    }

    quartic::QuarticModel quartic_model(const YAML::Node& node, const std::string& field) const
    {
        if (!node.IsMap() || !node["type"]) {
            fail(node, field, "expected a mapping with 'type'");
        }
        const auto type = text(node["type"], field + ".type");
        if (type == "elastic") {
            only_keys(node, field, {"type", "theta"});
            return quartic::Elastic{number_or(node, "theta", field + ".theta", 0.0)};
        }
        if (type == "sink") {
            only_keys(node, field, {"type"});
            return quartic::Sink{};
        }
        if (type == "total_absorption") {
            only_keys(node, field, {"type"});
            return quartic::TotalAbsorption{};
        }
        fail(node["type"], field + ".type", "unknown quartic model '" + type + "'");
    }

  private:
    std::string source_;
};

std::string model_yaml(const BoundaryModel& m)
{
    struct Visitor {
        std::string operator()(const model::ElasticSubcritical& v) const
        {
            return "{type: elastic_subcritical, l: " + g17(v.l) + "}";
        }
        std::string operator()(const model::ElasticSupercritical& v) const
        {
            return "{type: elastic_supercritical, theta: " + g17(v.theta) + "}";
        }
        std::string operator()(const model::Sink&) const { return "{type: sink}"; }
        std::string operator()(const model::TotalAbsorption& v) const
        {
            return "{type: total_absorption, window: [" + std::to_string(v.lo) + ", "
                   + std::to_string(v.hi) + "]}";
        }
        std::string operator()(const model::Custom& v) const
        {
            return "{type: custom, ratio: [" + g17(v.ratio.real()) + ", " + g17(v.ratio.imag()) + "]}";
        }
    };
    return std::visit(Visitor{}, m);
}

std::string quartic_model_yaml(const quartic::QuarticModel& m)
{
    if (const auto* e = std::get_if<quartic::Elastic>(&m)) {
        return "{type: elastic, theta: " + g17(e->theta) + "}";
    }
    if (std::holds_alternative<quartic::Sink>(m)) {
        return "{type: sink}";
    }
    return "{type: total_absorption}";
}

} // namespace

Scenario parse_scenario(const std::string& text, const std::string& source)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    }
    catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": syntax: " + e.msg);
    }
    Reader r(source);
    if (!root.IsMap()) {
        r.fail(root, "<root>", "expected a mapping");
    }
    r.only_keys(root, "", {"potential", "beta", "gamma", "lambda", "p", "mass", "models", "schedule",
                           "m_range", "auto_margin", "phi", "tolerance", "output"});

    Scenario sc;
    const std::string potential = root["potential"] ? r.text(root["potential"], "potential")
                                                    : std::string("inverse_square");
    const double beta = r.number_or(root, "beta", "beta", 0.0);
    const double p = r.number_or(root, "p", "p", 1.0);
    const double mass = r.number_or(root, "mass", "mass", 0.5);

    if (potential == "inverse_square") {
        if (root["lambda"]) {
            r.fail(root["lambda"], "lambda", "only valid for inverse_quartic");
        }
        if (root["schedule"]) {
            r.fail(root["schedule"], "schedule", "only valid for inverse_quartic (use models)");
        }
        ScatteringConfig cfg{beta, r.number_or(root, "gamma", "gamma", 0.0), p, mass};
        try {
            cfg.validate();
        }
        catch (const ConfigError& e) {
            r.fail(root, "potential", e.what());
        }
        sc.potential = cfg;
        if (const auto models = root["models"]) {
            r.only_keys(models, "models", {"subcritical", "supercritical", "modes"});
            if (models["subcritical"]) {
                sc.schedule.set_default(Regime::Subcritical,
                                        r.model(models["subcritical"], "models.subcritical"));
            }
            if (models["supercritical"]) {
                sc.schedule.set_default(Regime::Supercritical,
                                        r.model(models["supercritical"], "models.supercritical"));
            }
            if (const auto modes = models["modes"]) {
                if (!modes.IsSequence()) {
                    r.fail(modes, "models.modes", "expected a list");
                }
                for (std::size_t i = 0; i < modes.size(); ++i) {
                    const auto entry = modes[i];
                    const std::string field = "models.modes[" + std::to_string(i) + "]";
                    if (!entry.IsMap() || !entry["m"]) {
                        r.fail(entry, field, "expected a mapping with 'm'");
                    }
                    const int m = static_cast<int>(r.integer(entry["m"], field + ".m"));
                    YAML::Node rest = YAML::Clone(entry);
                    rest.remove("m");
                    sc.schedule.set_mode(m, r.model(rest, field));
                }
            }
        }
    }
    else if (potential == "inverse_quartic") {
        if (root["gamma"]) {
            r.fail(root["gamma"], "gamma", "only valid for inverse_square");
        }
        if (root["models"]) {
            r.fail(root["models"], "models", "only valid for inverse_square (use schedule)");
        }
        quartic::QuarticConfig cfg{beta, r.number_or(root, "lambda", "lambda", 1.0), p, mass};
        try {
            cfg.validate();
        }
        catch (const ConfigError& e) {
            r.fail(root, "potential", e.what());
        }
        sc.potential = cfg;
        sc.quartic_schedule = {0, quartic::Elastic{}, quartic::Elastic{}};
        if (const auto s = root["schedule"]) {
            r.only_keys(s, "schedule", {"m_abs", "inner", "outer"});
            const long m_abs = s["m_abs"] ? r.integer(s["m_abs"], "schedule.m_abs") : 0;
            if (m_abs < 0) {
                r.fail(s["m_abs"], "schedule.m_abs", "must be >= 0");
            }
            sc.quartic_schedule.m_abs = static_cast<int>(m_abs);
            if (s["inner"]) {
                sc.quartic_schedule.inner = r.quartic_model(s["inner"], "schedule.inner");
            }
            if (s["outer"]) {
                sc.quartic_schedule.outer = r.quartic_model(s["outer"], "schedule.outer");
            }
        }
    }
    else {
        r.fail(root["potential"], "potential", "expected inverse_square or inverse_quartic");
    }

    if (const auto mr = root["m_range"]) {
        if (mr.IsScalar() && mr.Scalar() == "auto") {
            sc.m_range.reset();
        }
        else {
            sc.m_range = r.int_pair(mr, "m_range");
        }
    }
    if (const auto am = root["auto_margin"]) {
        const long v = r.integer(am, "auto_margin");
        if (v < 0) {
            r.fail(am, "auto_margin", "must be >= 0");
        }
        sc.auto_margin = static_cast<int>(v);
    }
    if (const auto tol = root["tolerance"]) {
        sc.tolerance = r.number(tol, "tolerance");
        if (!(sc.tolerance >= 1e-10 && sc.tolerance < 1.0)) {
            r.fail(tol, "tolerance", "must lie in [1e-10, 1)");
        }
    }
    if (const auto phi = root["phi"]) {
        if (phi.IsSequence()) {
            for (std::size_t i = 0; i < phi.size(); ++i) {
                sc.phi_samples.push_back(r.number(phi[i], "phi[" + std::to_string(i) + "]"));
            }
        }
        else if (phi.IsMap()) {
            r.only_keys(phi, "phi", {"from", "to", "count"});
            if (!phi["from"] || !phi["to"] || !phi["count"]) {
                r.fail(phi, "phi", "needs from, to and count");
            }
            const double from = r.number(phi["from"], "phi.from");
            const double to = r.number(phi["to"], "phi.to");
            const long count = r.integer(phi["count"], "phi.count");
            if (count < 1) {
                r.fail(phi["count"], "phi.count", "must be >= 1");
            }
            for (long i = 0; i < count; ++i) {
                sc.phi_samples.push_back(count == 1 ? from : from + (to - from) * i / (count - 1));
            }
        }
        else {
            r.fail(phi, "phi", "expected a list or {from, to, count}");
        }
        const AmplitudeOptions defaults;
        for (double v : sc.phi_samples) {
            if (std::abs(std::remainder(v, 2.0 * M_PI)) < defaults.phi_min) {
                r.fail(phi, "phi", "sample " + g17(v) + " lies inside the forward exclusion |phi| < "
                                       + g17(defaults.phi_min));
            }
        }
    }
    if (const auto out = root["output"]) {
        r.only_keys(out, "output", {"format", "dir"});
        if (out["format"]) {
            const auto f = r.text(out["format"], "output.format");
            if (f == "csv") {
                sc.output.format = OutputFormat::Csv;
            }
            else if (f == "json") {
                sc.output.format = OutputFormat::Json;
            }
            else {
                r.fail(out["format"], "output.format", "expected csv or json");
            }
        }
        if (out["dir"]) {
            sc.output.dir = r.text(out["dir"], "output.dir");
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path + ": cannot open scenario file");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

std::string dump_scenario(const Scenario& sc)
{
    std::ostringstream os;
    if (const auto* cfg = std::get_if<ScatteringConfig>(&sc.potential)) {
        os << "potential: inverse_square\n";
        os << "beta: " << g17(cfg->beta) << "\n";
        os << "gamma: " << g17(cfg->gamma) << "\n";
        os << "p: " << g17(cfg->p) << "\n";
        os << "mass: " << g17(cfg->mass) << "\n";
        const auto& s = sc.schedule;
        if (s.subcritical_default() || s.supercritical_default() || !s.per_mode().empty()) {
            os << "models:\n";
            if (s.subcritical_default()) {
                os << "  subcritical: " << model_yaml(*s.subcritical_default()) << "\n";
            }
            if (s.supercritical_default()) {
                os << "  supercritical: " << model_yaml(*s.supercritical_default()) << "\n";
            }
            if (!s.per_mode().empty()) {
                os << "  modes:\n";
                for (const auto& [m, model] : s.per_mode()) {
                    std::string body = model_yaml(model);
                    os << "    - {m: " << m << ", " << body.substr(1) << "\n";
                }
            }
        }
    }
    else {
        const auto& qc = std::get<quartic::QuarticConfig>(sc.potential);
        os << "potential: inverse_quartic\n";
        os << "beta: " << g17(qc.beta) << "\n";
        os << "lambda: " << g17(qc.lambda) << "\n";
        os << "p: " << g17(qc.p) << "\n";
        os << "mass: " << g17(qc.mass) << "\n";
        os << "schedule:\n";
        os << "  m_abs: " << sc.quartic_schedule.m_abs << "\n";
        os << "  inner: " << quartic_model_yaml(sc.quartic_schedule.inner) << "\n";
        os << "  outer: " << quartic_model_yaml(sc.quartic_schedule.outer) << "\n";
        os << "tolerance: " << g17(sc.tolerance) << "\n";
    }
    if (sc.m_range) {
        os << "m_range: [" << sc.m_range->first << ", " << sc.m_range->second << "]\n";
    }
    else {
        os << "m_range: auto\n";
    }
    os << "auto_margin: " << sc.auto_margin << "\n";
    if (!sc.phi_samples.empty()) {
        os << "phi: [";
        for (std::size_t i = 0; i < sc.phi_samples.size(); ++i) {
            os << (i ? ", " : "") << g17(sc.phi_samples[i]);
        }
        os << "]\n";
    }
    os << "output:\n";
    os << "  format: " << (sc.output.format == OutputFormat::Csv ? "csv" : "json") << "\n";
    os << "  dir: \"" << sc.output.dir << "\"\n";
    return os.str();
}

} // namespace abscat::cli
