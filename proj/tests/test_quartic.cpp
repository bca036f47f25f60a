#include "abscat/errors.hpp"
#include "abscat/quartic.hpp"
#include "support.hpp"

#include <doctest.h>

#include <numbers>

using namespace abscat;
using namespace abscat::quartic;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const ConnectionMatrix& a, const ConnectionMatrix& b)
{
    double d = 0.0;
    double scale = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            d = std::max(d, std::abs(a.t[i][j] - b.t[i][j]));
            scale = std::max(scale, std::abs(b.t[i][j]));
        }
    }
    return d / scale;
}

cplx pure_ab(double beta, int m)
{
    return std::exp(cplx(0.0, kPi * (m - std::abs(m - beta))));
}

} // namespace

TEST_CASE("config validation and tolerance floor")
{
    CHECK_THROWS_AS((QuarticConfig{0.0, 0.0, 1.0, 0.5}.validate()), ConfigError);
    CHECK_THROWS_AS((QuarticConfig{0.0, 1.0, -1.0, 0.5}.validate()), ConfigError);
    const QuarticConfig cfg{0.2, 2.0, 0.5, 0.5};
    CHECK(cfg.rho0() == doctest::Approx(2.0));
    CHECK(cfg.q() == doctest::Approx(1.0));
    CHECK_THROWS_AS(connection_matrix(cfg, 0, 5e-11), RangeError);
    CHECK_THROWS_AS(model_schedule(cfg, -1, Elastic{}, Elastic{}), ConfigError);
}

TEST_CASE("flux form and conjugation symmetry at q = 1")
{
    const QuarticConfig cfg{0.0, 1.0, 1.0, 0.5};
    const auto t = connection_matrix(cfg, 0, 1e-10);
    CHECK(t.flux_form_defect() <= 1e-6);
    CHECK(t.conjugation_defect() <= 1e-6);
    CHECK(t.rho_start <= cfg.lambda / 50.0);
}

TEST_CASE("connection matrix is stable under a tenfold tolerance change")
{
    const QuarticConfig cfg{0.0, 1.0, 1.0, 0.5};
    CHECK(max_diff(connection_matrix(cfg, 0, 1e-9), connection_matrix(cfg, 0, 1e-10)) <= 1e-6);
}

TEST_CASE("inward integration inverts the connection")
{
    // the identity is reached up to |T|^2 times the relative accuracy, so
    // the absolute bound applies to weakly reflecting modes only
    for (double beta : {0.0, 0.35}) {
        for (int m : {0, 1, 2, 3}) {
            const QuarticConfig cfg{beta, 1.0, 1.0, 0.5};
            const auto t = connection_matrix(cfg, m, 1e-10);
            const auto u = inverse_connection(cfg, m, 1e-10, t);
            double t_max = 0.0;
            double u_max = 0.0;
            double dev = 0.0;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    t_max = std::max(t_max, std::abs(t.t[i][j]));
                    u_max = std::max(u_max, std::abs(u[i][j]));
                    const cplx e = u[i][0] * t.t[0][j] + u[i][1] * t.t[1][j];
                    dev = std::max(dev, std::abs(e - (i == j ? 1.0 : 0.0)));
                }
            }
            CAPTURE(beta);
            CAPTURE(m);
            CAPTURE(t_max);
            CHECK(dev <= 1e-8 * t_max * u_max);
            if (t_max <= 10.0) {
                CHECK(dev <= 1e-5);
            }
        }
    }
}

TEST_CASE("elastic cores are unitary and sinks absorb")
{
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 12; ++i) {
        const QuarticConfig cfg{0.9 * unit(rng), test::log_uniform(rng, 0.1, 3.0),
                                test::log_uniform(rng, 0.3, 3.0), 0.5};
        if (cfg.q() > 10.0) {
            continue;
        }
        const int m = static_cast<int>(unit(rng) * 7) - 3;
        CAPTURE(cfg.beta);
        CAPTURE(cfg.q());
        CAPTURE(m);
        const auto t = connection_matrix(cfg, m, 1e-10);
        const auto el = quartic_smatrix(cfg, m, Elastic{2.0 * kPi * unit(rng)}, t);
        CHECK(std::abs(std::abs(el.s_matrix) - 1.0) <= 1e-6);
        CHECK(el.sigma_abs == 0.0);
        const auto sink = quartic_smatrix(cfg, m, Sink{}, t);
        CHECK(std::abs(sink.s_matrix) <= 1.0 + 1e-9);
        const double capture = capture_probability(t);
        CHECK(capture >= 0.0);
        CHECK(capture <= 1.0 + 1e-9);
        CHECK(std::abs(capture - (1.0 - std::norm(sink.s_matrix))) <= 1e-8);
    }
}

TEST_CASE("total absorption is exactly maximal")
{
    for (double p : {1.0, 0.4, 2.5}) {
        const QuarticConfig cfg{0.3, 1.0, p, 0.5};
        const auto sol = quartic_smatrix(cfg, 1, TotalAbsorption{});
        CHECK(sol.s_matrix == cplx(0.0, 0.0));
        CHECK(sol.sigma_abs == 1.0 / p);
    }
}

TEST_CASE("vanishing coupling recovers pure AB")
{
    for (double beta : {0.0, 0.3, 0.5, 0.9}) {
        const QuarticConfig cfg{beta, 1e-4, 1.0, 0.5};
        for (int m = -3; m <= 4; ++m) {
            CAPTURE(beta);
            CAPTURE(m);
            const auto sol = quartic_smatrix(cfg, m, Elastic{regular_core_phase(cfg, m)});
            CHECK(std::abs(sol.s_matrix - pure_ab(beta, m)) <= 1e-4);
        }
    }
    // the free-field example: beta = 0 gives S_m = 1
    const QuarticConfig free{0.0, 1e-4, 1.0, 0.5};
    for (int m = 0; m <= 2; ++m) {
        CHECK(std::abs(quartic_smatrix(free, m, Elastic{regular_core_phase(free, m)}).s_matrix - 1.0) <= 1e-3);
    }
    CHECK(regular_core_phase(free, 0) == 0.0);
    CHECK(regular_core_phase(free, 2) == doctest::Approx(kPi / 2.0));
    CHECK(regular_core_phase(QuarticConfig{0.25, 1.0, 1.0, 0.5}, 0) == doctest::Approx(-kPi / 4.0));
}

TEST_CASE("a generic core phase leaves a remnant as the coupling vanishes")
{
    const QuarticConfig cfg{0.0, 1e-4, 1.0, 0.5};
    CHECK(std::abs(quartic_smatrix(cfg, 0, Elastic{0.4}).s_matrix - 1.0) > 0.1);
}

TEST_CASE("capture probability falls with |m - beta|")
{
    const QuarticConfig cfg{0.0, 1.0, 1.0, 0.5};
    double previous = 1.0;
    for (int m = 0; m <= 5; ++m) {
        const double capture = capture_probability(connection_matrix(cfg, m, 1e-10));
        CAPTURE(m);
        CHECK(capture < previous);
        previous = capture;
    }
}

TEST_CASE("sink capture agrees between two tolerances")
{
    const QuarticConfig cfg{0.0, 1.0, 1.0, 0.5};
    const double coarse = capture_probability(connection_matrix(cfg, 0, 1e-9));
    const double fine = capture_probability(connection_matrix(cfg, 0, 1e-10));
    CHECK(std::abs(coarse - fine) <= 1e-6);
    // frozen from this solver at tol 1e-10
    CHECK(fine == doctest::Approx(0.957195015246).epsilon(1e-8));
}

TEST_CASE("model schedule examples")
{
    const QuarticConfig cfg{0.0, 1.0, 1.0, 0.5};
    auto total = [&](int m_abs, QuarticModel inner, QuarticModel outer, std::pair<int, int> range) {
        return quartic_cross_sections(cfg, model_schedule(cfg, m_abs, inner, outer), range).total_abs;
    };
    CHECK(total(0, TotalAbsorption{}, Elastic{}, {-3, 3}) == 1.0);
    CHECK(total(2, TotalAbsorption{}, Elastic{}, {-4, 4}) == 5.0);
    CHECK(total(1, Elastic{0.3}, Elastic{1.1}, {-3, 3}) == 0.0);

    const auto s = model_schedule(cfg, 1, Sink{}, Elastic{0.5});
    CHECK(std::holds_alternative<Sink>(s(-1)));
    CHECK(std::holds_alternative<Sink>(s(1)));
    CHECK(std::holds_alternative<Elastic>(s(2)));
}
