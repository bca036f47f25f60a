#include "abscat/cli.hpp"
#include "abscat/errors.hpp"
#include "abscat/scatter.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace abscat;

namespace {

constexpr double kPi = std::numbers::pi;

const ScatteringConfig kCfg{0.3, 0.5, 1.0, 0.5};

ChannelSolution solve(const ScatteringConfig& cfg, int m, const BoundaryModel& model)
{
    return solve_channel(cfg, classify_mode(cfg, m), model);
}

} // namespace

TEST_CASE("mode classification examples")
{
    const auto free = classify_mode({0.0, 0.0, 1.0, 0.5}, 3);
    CHECK(free.nu_squared == 9.0);
    CHECK(free.regime == Regime::Regular);

    const auto m0 = classify_mode(kCfg, 0);
    CHECK(m0.nu_squared == doctest::Approx(-0.16).epsilon(1e-14));
    CHECK(m0.mu == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(m0.regime == Regime::Supercritical);
    CHECK(m0.order().is_imaginary());

    const auto m1 = classify_mode(kCfg, 1);
    CHECK(m1.nu_squared == doctest::Approx(0.24).epsilon(1e-14));
    CHECK(m1.mu == doctest::Approx(std::sqrt(0.24)).epsilon(1e-14));
    CHECK(m1.regime == Regime::Subcritical);

    CHECK(classify_mode(kCfg, 2).regime == Regime::Regular);
    CHECK(classify_mode(kCfg, -1).regime == Regime::Regular);
}

TEST_CASE("critical modes")
{
    // |m - beta| = gamma
    CHECK_THROWS_AS(classify_mode({0.5, 0.5, 1.0, 0.5}, 0), DegenerateModeError);
    CHECK_THROWS_AS(classify_mode({0.25, 0.75 + 1e-11, 1.0, 0.5}, 1), DegenerateModeError);
    // a hair off sqrt(1 + gamma^2)
    CHECK_THROWS_AS(classify_mode({1e-10, 0.0, 1.0, 0.5}, 1), DegenerateModeError);
    // exactly mu = 1 and the free s-wave stay Regular
    CHECK(classify_mode({0.0, 0.0, 1.0, 0.5}, 1).regime == Regime::Regular);
    CHECK(classify_mode({0.0, 0.0, 1.0, 0.5}, 0).regime == Regime::Regular);
}

TEST_CASE("configuration validation")
{
    CHECK_THROWS_AS(ScatteringConfig({1.0, 0.5, 1.0, 0.5}).validate(), ConfigError);
    CHECK_THROWS_AS(ScatteringConfig({-0.1, 0.5, 1.0, 0.5}).validate(), ConfigError);
    CHECK_THROWS_AS(ScatteringConfig({0.3, -0.5, 1.0, 0.5}).validate(), ConfigError);
    CHECK_THROWS_AS(ScatteringConfig({0.3, 0.5, 0.0, 0.5}).validate(), ConfigError);
    CHECK_THROWS_AS(ScatteringConfig({0.3, 0.5, 1.0, 0.0}).validate(), ConfigError);
    CHECK_NOTHROW(kCfg.validate());
}

TEST_CASE("sink absorption")
{
    const auto sol = solve(kCfg, 0, model::Sink{});
    CHECK(sol.sigma_abs == doctest::Approx(1.0 - std::exp(-0.8 * kPi)).epsilon(1e-13));
    CHECK(sol.sigma_abs == doctest::Approx(0.9190).epsilon(1e-4));
    CHECK(std::abs(sol.s_matrix) == doctest::Approx(std::exp(-0.4 * kPi)).epsilon(1e-13));

    const ScatteringConfig fast{0.3, 0.5, 2.5, 0.5};
    CHECK(solve(fast, 0, model::Sink{}).sigma_abs
          == doctest::Approx(-std::expm1(-0.8 * kPi) / 2.5).epsilon(1e-13));
    CHECK_THROWS_AS(solve(kCfg, 1, model::Sink{}), ModelRegimeMismatch);
}

TEST_CASE("total absorption window")
{
    for (double p : {1.0, 0.37, 4.0}) {
        const ScatteringConfig cfg{0.3, 0.5, p, 0.5};
        for (int m : {0, 1}) {
            const auto sol = solve(cfg, m, model::TotalAbsorption{0, 1});
            CHECK(sol.s_matrix == cplx(0.0));
            CHECK(sol.sigma_abs == 1.0 / p);
            CHECK(!sol.delta.has_value());
            const cplx expected = -std::polar(1.0, -kPi / 4.0) * std::cos(kPi * 0.3) / std::sqrt(p);
            CHECK(std::abs(sol.f_coeff - expected) < 1e-12);
        }
    }
    CHECK_THROWS_AS(solve(kCfg, 1, model::TotalAbsorption{0, 0}), ModelRegimeMismatch);
    // Regular modes never absorb
    CHECK(solve(kCfg, 2, model::TotalAbsorption{0, 5}).sigma_abs == 0.0);
}

TEST_CASE("free Regular modes")
{
    const ScatteringConfig free{0.0, 0.0, 1.0, 0.5};
    for (int m = -5; m <= 5; ++m) {
        const auto sol = make_channel(free, classify_mode(free, m), 0.5, 0.5);
        CHECK(std::abs(sol.s_matrix - 1.0) < 1e-15);
        CHECK(std::abs(sol.f_coeff) < 1e-15);
        CHECK(sol.sigma_abs == 0.0);
    }
}

TEST_CASE("elastic supercritical phase")
{
    const auto mode = classify_mode(kCfg, 0);
    for (double theta : {0.0, 0.4, 2.0, -3.0}) {
        const cplx s = elastic_supercritical_smatrix(kCfg, mode, theta);
        CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);
        CHECK(std::abs(s - elastic_supercritical_smatrix(kCfg, mode, theta + 2.0 * kPi)) < 1e-12);
    }
    CHECK_THROWS_AS(elastic_supercritical_smatrix(kCfg, mode, std::nan("")), ConfigError);
}

TEST_CASE("closed-form partial currents")
{
    const auto sub = classify_mode(kCfg, 1);
    CHECK(std::abs(partial_current(kCfg, sub, std::polar(0.7, 1.0), std::polar(0.7, -2.0), 3.0)) < 1e-15);

    const auto sup = classify_mode(kCfg, 0);
    const double mu = sup.mu;
    const cplx a = 0.8;
    const cplx b = a * std::exp(2.0 * kPi * mu);
    CHECK(partial_current(kCfg, sup, a, b, 2.0) < 0.0);

    const double rho = 2.0;
    const double expected = -2.0 / (kPi * kCfg.mass * rho) * std::norm(b) * std::exp(-kPi * mu);
    CHECK(partial_current(kCfg, sup, 0.0, b, rho) == doctest::Approx(expected).epsilon(1e-14));

    CHECK(partial_current(kCfg, classify_mode(kCfg, 3), 1.0, 1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(partial_current(kCfg, sup, a, b, 0.0), RangeError);
}

TEST_CASE("total cross sections")
{
    ModelSchedule sink;
    sink.set_default(Regime::Supercritical, model::Sink{});
    sink.set_default(Regime::Subcritical, model::ElasticSubcritical{0.0});
    const auto report = cross_sections(kCfg, sink, {-10, 11});
    CHECK(report.total_abs == doctest::Approx(1.0 - std::exp(-0.8 * kPi)).epsilon(1e-13));
    CHECK(report.partial_abs.at(0) == report.total_abs);

    ModelSchedule elastic;
    elastic.set_default(Regime::Supercritical, model::ElasticSupercritical{0.3});
    elastic.set_default(Regime::Subcritical, model::ElasticSubcritical{1.5});
    CHECK(cross_sections(kCfg, elastic, {-10, 11}).total_abs == 0.0);

    ModelSchedule partial;
    partial.set_default(Regime::Supercritical, model::Sink{});
    CHECK_THROWS_AS(cross_sections(kCfg, partial, {-10, 11}), ModelRegimeMismatch);
    CHECK_THROWS_AS(cross_sections(kCfg, sink, {1, 11}), IncompleteRangeError);

    const ScatteringConfig ab{0.4, 0.0, 2.0, 0.5};
    const auto window = cross_sections(ab, BoundaryModel{model::TotalAbsorption{0, 1}}, {-10, 11});
    CHECK(window.total_abs == 2.0 / 2.0);
}

TEST_CASE("pure AB census")
{
    for (int k = 1; k <= 9; ++k) {
        const ScatteringConfig cfg{0.1 * k, 0.0, 1.0, 0.5};
        const auto range = non_regular_range(cfg);
        REQUIRE(range.has_value());
        CHECK(range->first == 0);
        CHECK(range->second == 1);
        for (int m = -30; m <= 30; ++m) {
            const auto regime = classify_mode(cfg, m).regime;
            CHECK(regime == (m == 0 || m == 1 ? Regime::Subcritical : Regime::Regular));
        }
    }
    CHECK(!non_regular_range({0.0, 0.0, 1.0, 0.5}).has_value());
}

TEST_CASE("unitarity bound and absorption consistency over random channels")
{
    std::mt19937_64 rng(21);
    for (int i = 0; i < 300; ++i) {
        const auto draw = cli::draw_channel(rng);
        const auto sol = solve_channel(draw.cfg, draw.mode, draw.model);
        CAPTURE(describe(draw.model));
        CHECK(std::abs(sol.s_matrix) <= 1.0 + 1e-12);
        CHECK(sol.sigma_abs <= 1.0 / draw.cfg.p);
        const double from_s = (1.0 - std::norm(sol.s_matrix)) / draw.cfg.p;
        const bool elastic = std::holds_alternative<model::ElasticSubcritical>(draw.model)
                             || std::holds_alternative<model::ElasticSupercritical>(draw.model)
                             || draw.mode.regime == Regime::Regular;
        if (elastic) {
            CHECK(std::abs(std::abs(sol.s_matrix) - 1.0) <= 1e-10);
            CHECK(sol.sigma_abs == 0.0);
        }
        else {
            CHECK(std::abs(sol.sigma_abs - from_s) <= 1e-12 * std::max(from_s, 1e-300) + 1e-15);
        }
    }
}

TEST_CASE("flux bookkeeping against closed-form currents")
{
    std::mt19937_64 rng(22);
    int checked = 0;
    while (checked < 100) {
        const auto draw = cli::draw_channel(rng);
        if (draw.mode.regime == Regime::Regular) {
            continue;
        }
        const auto sol = solve_channel(draw.cfg, draw.mode, draw.model);
        const double n = flux_normalization(draw.mode, sol.b);
        for (double r : {1.0, 10.0, 100.0}) {
            const double rho = r / draw.cfg.p;
            const double j = partial_current(draw.cfg, draw.mode, sol.a, sol.b, rho);
            const double lhs = draw.cfg.p * sol.sigma_abs;
            const double rhs = -n * draw.cfg.mass * 2.0 * kPi * rho * j;
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
        }
        ++checked;
    }
}

TEST_CASE("custom ratios cannot exceed maximal absorption")
{
    const auto sup = classify_mode(kCfg, 0);
    const auto sub = classify_mode(kCfg, 1);
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto& mode = i % 2 ? sup : sub;
        const double limit = mode.regime == Regime::Supercritical ? std::exp(-kPi * mode.mu) : 1.0;
        const cplx r = std::polar(2.0 * limit * u(rng), 2.0 * kPi * u(rng));
        if (std::abs(r) <= limit) {
            CHECK(solve_channel(kCfg, mode, model::Custom{r}).sigma_abs <= 1.0 / kCfg.p);
        }
        else {
            CHECK_THROWS_AS(solve_channel(kCfg, mode, model::Custom{r}), UnitarityViolation);
        }
    }
}

TEST_CASE("only ratios enter: common rescaling of a and b")
{
    std::mt19937_64 rng(24);
    const std::vector<double> phis{0.5, 1.7, kPi, -2.0};
    for (int i = 0; i < 50; ++i) {
        const auto draw = cli::draw_channel(rng);
        if (draw.mode.regime == Regime::Regular) {
            continue;
        }
        const auto base = solve_channel(draw.cfg, draw.mode, draw.model);
        const cplx c = std::polar(0.1 + 3.0 * (i % 7), 0.37 * i);
        const auto scaled = make_channel(draw.cfg, draw.mode, c * base.a, c * base.b);
        const auto plain = make_channel(draw.cfg, draw.mode, base.a, base.b);
        CHECK(std::abs(scaled.s_matrix - plain.s_matrix) < 1e-13);
        CHECK(std::abs(scaled.sigma_abs - plain.sigma_abs) < 1e-13);
        CHECK(std::abs(scaled.f_coeff - plain.f_coeff) < 1e-13);

        const auto span = *non_regular_range(draw.cfg);
        std::vector<ChannelSolution> sa;
        std::vector<ChannelSolution> sb;
        for (int m = span.first; m <= span.second; ++m) {
            const auto mode = classify_mode(draw.cfg, m);
            const auto s = m == draw.mode.m ? plain : solve_channel(draw.cfg, mode, model::TotalAbsorption{m, m});
            sa.push_back(s);
            sb.push_back(m == draw.mode.m ? scaled : make_channel(draw.cfg, mode, c * s.a, c * s.b));
        }
        for (double phi : phis) {
            CHECK(std::abs(amplitude(draw.cfg, sa, phi) - amplitude(draw.cfg, sb, phi)) < 1e-12);
        }
    }
}

TEST_CASE("free-field amplitude vanishes")
{
    const ScatteringConfig free{0.0, 0.0, 1.0, 0.5};
    for (int k = 1; k < 64; ++k) {
        const double phi = -kPi + 2.0 * kPi * k / 64.0;
        if (std::abs(phi) < 1e-3) {
            continue;
        }
        CHECK(std::abs(amplitude(free, {}, phi)) <= 1e-12);
        CHECK(std::abs(amplitude(free, {}, phi, {1e-3, false, 0})) <= 1e-12);
    }
}

TEST_CASE("AB backscattering from the partial-wave sum")
{
    for (int k = 1; k <= 9; ++k) {
        const double beta = 0.1 * k;
        const ScatteringConfig cfg{beta, 0.0, 1.3, 0.5};
        const auto report = cross_sections(cfg, BoundaryModel{model::ElasticSubcritical{0.0}}, {0, 1});
        const cplx f = amplitude(cfg, report.channels, kPi);
        const double closed = std::abs(std::sin(kPi * beta)) / std::sqrt(2.0 * kPi * cfg.p);
        CHECK(std::abs(std::abs(f) - closed) <= 1e-4 * closed);
        CHECK(std::abs(aharonov_bohm_amplitude(beta, cfg.p, kPi)) == doctest::Approx(closed).epsilon(1e-14));
    }
}

TEST_CASE("resummed tail converges with the cutoff")
{
    // deviations from the AB tail fall off like gamma^2 / (2 |m - beta|)
    const ScatteringConfig cfg{0.3, 0.5, 1.0, 0.5};
    ModelSchedule schedule;
    schedule.set_default(Regime::Supercritical, model::Sink{});
    schedule.set_default(Regime::Subcritical, model::ElasticSubcritical{0.0});
    const auto report = cross_sections(cfg, schedule, {0, 1});
    auto f = [&](int cutoff) { return amplitude(cfg, report.channels, 2.0, {1e-3, true, cutoff}); };
    // Abel summation bound on the neglected tail at phi = 2
    const cplx reference = f(4000);
    for (int cutoff : {20, 40, 80, 160}) {
        const double bound = kPi * 0.25 / cutoff / std::sin(1.0) / std::sqrt(2.0 * kPi);
        CHECK(std::abs(f(cutoff) - reference) <= bound);
    }

    const ScatteringConfig ab{0.3, 0.0, 1.0, 0.5};
    const auto pure = cross_sections(ab, BoundaryModel{model::ElasticSubcritical{0.0}}, {0, 1});
    CHECK(std::abs(amplitude(ab, pure.channels, 2.0) - aharonov_bohm_amplitude(0.3, 1.0, 2.0)) < 1e-14);
}

TEST_CASE("amplitude preconditions")
{
    const ScatteringConfig cfg{0.5, 0.0, 1.0, 0.5};
    CHECK_THROWS_AS(amplitude(cfg, {}, 1e-4), ForwardDirectionError);
    CHECK_THROWS_AS(amplitude(cfg, {}, 2.0 * kPi + 1e-4), ForwardDirectionError);
    CHECK_THROWS_AS(amplitude(cfg, {}, 1.0), IncompleteRangeError);
}
