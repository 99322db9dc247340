#include <cmath>

#include "cspec/analysis.hpp"
#include "cspec/quadrature.hpp"
#include "cspec/symbols.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace cspec;
using doctest::Approx;

TEST_CASE("p and dt_p direct values") {
    const Frequency f(3, 21.0);
    CHECK(p(0.0, f) == 450.0);
    CHECK(p(7.0, f) == 9.0);
    CHECK(p(10.0, f) == 90.0);
    CHECK(dt_p(7.0, f) == 0.0);
    CHECK(dt_p(0.0, f) == -126.0);
    CHECK(dt_p(10.0, f) == 54.0);
}

TEST_CASE("Frequency and FluidParams reject bad input") {
    CHECK_THROWS_AS(Frequency(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Frequency(1, NAN), std::invalid_argument);
    CHECK_THROWS_AS(FluidParams(0.0, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FluidParams(1.0, -1e-3, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FluidParams(1.0, 0.0, -1e-3), std::invalid_argument);
    CHECK(FluidParams(1.0, 1e-3, 0.0).regime_label() == "theorem-regime");
    CHECK(FluidParams(50.0, 2e-4, 0.0).regime_label() == "outside-theorem-regime");
    CHECK(FluidParams(1.0, 0.4, 0.2).regime_label() == "outside-theorem-regime");
}

TEST_CASE("mult_m values") {
    const Frequency f(3, 21.0);
    CHECK(mult_m(7.0, f, 1e-3) == 1.0);
    CHECK(mult_m(7.0, f, 0.5) == 1.0);
    CHECK(mult_m(1e12, f, 1e-3) == Approx(23.1406926327792690).epsilon(1e-8));
    // exp(2 atan(-0.7)) to 30 digits
    CHECK(mult_m(0.0, f, 1e-3) == Approx(0.294801824784788704).epsilon(1e-13));
}

TEST_CASE("mult_w values") {
    const Frequency f(3, 21.0);
    const WeightParams wp(50.0, 1.0 / 12.0);
    CHECK(mult_w(7.0, f, 1e-3, wp) == Approx(1.0).epsilon(1e-14));
    CHECK(mult_w(12.0, f, 1e-3, wp) == Approx(26.0).epsilon(1e-12));
    CHECK(mult_w(600.0, f, 1e-3, wp) == Approx(250001.0).epsilon(1e-12));
    CHECK(mult_w(3.0, f, 1e-3, wp) == 1.0);
}

TEST_CASE("weight parameter admissibility") {
    CHECK_FALSE(WeightParams::admissible(4.0, 1.0 / 12.0));
    CHECK_THROWS_AS(WeightParams(4.0, 1.0 / 12.0), std::invalid_argument);
    CHECK(WeightParams::admissible(50.0, 1.0 / 12.0));
    CHECK_FALSE(WeightParams::admissible(50.0, 0.08));
    CHECK_FALSE(WeightParams::admissible(50.0, 1.5));
}

TEST_CASE("L_nu values and quadrature oracle") {
    CHECK(L_nu(0.0, Frequency(3, 21.0), 1e-3) == 0.0);
    CHECK(L_nu(1.0, Frequency(1, 0.0), 1.0) == Approx(4.0 / 3.0).epsilon(1e-15));

    const Frequency f(3, 21.0);
    const CompositeRule rule = composite_gauss(0.0, 7.0, 16, 8);
    double q = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) q += rule.weights[i] * p(rule.nodes[i], f);
    CHECK(std::abs(L_nu(7.0, f, 1e-3) - 1e-3 * q) <= 1e-10 * L_nu(7.0, f, 1e-3));
}

TEST_CASE("multiplier inequalities at (3, 21), nu = 1e-3") {
    const Frequency f(3, 21.0);
    const WeightParams wp(50.0, 1.0 / 12.0);
    const MultiplierReport rep = check_multiplier_inequalities(f, 1e-3, wp, linspace(0.0, 600.0, 10000));
    CHECK_FALSE(rep[MultiplierIneq::M_FLOOR].first_violation);
    CHECK_FALSE(rep[MultiplierIneq::W_OVER_P].first_violation);
    CHECK_FALSE(rep[MultiplierIneq::DISS_P].first_violation);
    CHECK_FALSE(rep[MultiplierIneq::DISS_NU13].first_violation);
    // w ends at 1 + beta^2 nu^{-2/3}, one above the stated cap.
    CHECK(rep[MultiplierIneq::W_BOUNDS].min_slack == Approx(-1.0).epsilon(1e-9));
    CHECK(rep[MultiplierIneq::W_BOUNDS].first_violation.has_value());
    CHECK_FALSE(rep.w_upper_attained.first_violation);
    CHECK_FALSE(rep.all_hold());

    // At the critical time nu p + dm/m = nu k^2 + 2 nu^{1/3}.
    const double c = std::cbrt(1e-3);
    CHECK(1e-3 * p(7.0, f) + mult_m_logdt(7.0, f, 1e-3) == Approx(9e-3 + 2.0 * c).epsilon(1e-14));
    const MultiplierReport one = check_multiplier_inequalities(f, 1e-3, wp, {7.0});
    CHECK(one[MultiplierIneq::M_FLOOR].min_slack == Approx(9e-3 + c).epsilon(1e-12));

    CHECK_THROWS_AS(check_multiplier_inequalities(f, 1e-3, wp, {}), std::invalid_argument);
    CHECK_THROWS_AS(check_multiplier_inequalities(f, 0.0, wp, {1.0}), std::invalid_argument);
}

TEST_CASE("property: symbol bounds") {
    Gen g(101);
    for (int i = 0; i < 2000; ++i) {
        const Frequency f(g.wavenumber(20), g.uniform(-200.0, 200.0));
        const double t = g.uniform(0.0, 1000.0);
        const double pp = p(t, f);
        CHECK(std::abs(dt_p(t, f)) <= 2.0 * std::abs(f.k) * std::sqrt(pp) * (1.0 + 1e-14));
        const double kb = bracket(double(f.k), f.eta);
        CHECK(pp <= bracket(t) * bracket(t) * kb * kb * (1.0 + 1e-14));
    }
}

TEST_CASE("property: multipliers are monotone and w is continuous at the window seams") {
    Gen g(102);
    const WeightParams wp(50.0, 1.0 / 12.0);
    for (int i = 0; i < 200; ++i) {
        const Frequency f(g.wavenumber(6), g.uniform(-60.0, 60.0));
        const double nu = g.log_uniform(1e-5, 1e-1);
        const double len = wp.beta / std::cbrt(nu);
        const double tc = f.critical_time();
        const double t_end = std::max(tc, 0.0) + 1.5 * len;
        double m_prev = mult_m(0.0, f, nu), w_prev = mult_w(0.0, f, nu, wp);
        bool monotone = true;
        for (int j = 1; j <= 400; ++j) {
            const double t = t_end * j / 400.0;
            const double m = mult_m(t, f, nu), w = mult_w(t, f, nu, wp);
            monotone &= m >= m_prev && w >= w_prev * (1.0 - 1e-15);
            m_prev = m;
            w_prev = w;
        }
        CHECK(monotone);
        for (double seam : {tc, tc + len}) {
            if (seam <= 0.0) continue;
            const double h = 1e-9 * std::max(1.0, seam);
            const double lo = mult_w(seam - h, f, nu, wp), hi = mult_w(seam + h, f, nu, wp);
            // Derivative of p/k^2 is at most 2 len, so the jump across 2h stays far below 1e-12 relative.
            CHECK(std::abs(hi - lo) <= 1e-12 * hi + 4.0 * len * h);
        }
    }
}

TEST_CASE("property: L_nu lower bound") {
    Gen g(103);
    for (int i = 0; i < 2000; ++i) {
        const Frequency f(g.wavenumber(10), g.uniform(-100.0, 100.0));
        const double nu = g.log_uniform(1e-6, 1.0);
        const double t = g.uniform(0.0, 1000.0);
        const double L = L_nu(t, f, nu);
        CHECK(L >= nu * t * t * t / 12.0 * (1.0 - 1e-12));
        CHECK(L >= nu * f.k * f.k * t * t * t / 12.0 * (1.0 - 1e-12));
    }
}
