#include <cmath>

#include "cspec/analysis.hpp"
#include "cspec/inviscid_mode.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace cspec;
using doctest::Approx;

TEST_CASE("rhs_inviscid values") {
    const Frequency f(3, 21.0);
    const auto zero = rhs_inviscid(2.0, 0.0, 0.0, f, 1.0, 0.0);
    CHECK(zero[0] == cplx(0.0));
    CHECK(zero[1] == cplx(0.0));

    const double M = 0.7;
    const cplx R(1.5, -0.5), A(0.3, 2.0), Xi(-1.0, 0.25);
    const auto at_tc = rhs_inviscid(7.0, R, A, f, M, Xi);
    CHECK(std::abs(at_tc[0] + A) < 1e-15);
    CHECK(std::abs(at_tc[1] - ((9.0 / (M * M) + 2.0) * R - 2.0 * Xi)) < 1e-12);

    const auto fig = rhs_inviscid(0.0, 0.0, 0.0, f, 1.0, 5.0);
    CHECK(fig[1].real() == Approx(-0.2).epsilon(1e-14));
}

TEST_CASE("matrix_L and vector_F at the critical time") {
    const Frequency f(3, 21.0);
    const Mat L = matrix_L(7.0, f, 1.0);
    CHECK(L[0][0] == Approx(0.0));
    CHECK(L[0][1] == Approx(-3.0).epsilon(1e-14));
    CHECK(L[1][0] == Approx(3.0 + 2.0 / 3.0).epsilon(1e-14));
    CHECK(L[1][1] == Approx(0.0));
    const auto F = vector_F(7.0, f);
    CHECK(F[0] == 0.0);
    CHECK(F[1] == Approx(-18.0 / std::pow(3.0, 3.5)).epsilon(1e-14));
}

TEST_CASE("property: trace-free L and symmetrizer bounds") {
    Gen g(301);
    for (int i = 0; i < 1000; ++i) {
        const Frequency f(g.wavenumber(10), g.uniform(-100.0, 100.0));
        const double t = g.uniform(0.0, 1000.0);
        const double M = g.log_uniform(1e-2, 1e2);
        const Mat L = matrix_L(t, f, M);
        CHECK(std::abs(L[0][0] + L[1][1]) <= 1e-12 * (std::abs(L[0][0]) + 1.0));
        const SymmetrizerCoeffs c = symmetrizer(t, f, M);
        CHECK(c.zeta >= 1.0);
        CHECK(c.zeta <= std::sqrt(1.0 + 2.0 * M * M) * (1.0 + 1e-14));
        CHECK(std::abs(c.a) / c.beta_s <= 1.0 / (2.0 * std::sqrt(2.0)) * (1.0 + 1e-14));
    }
}

TEST_CASE("energy: cross term vanishes at the critical time; coercivity") {
    const Frequency f(3, 21.0);
    const SymState z{cplx(0.4, -1.0), cplx(2.0, 0.5)};
    const SymmetrizerCoeffs c = symmetrizer(7.0, f, 1.3);
    CHECK(energy_lemma31(z, 7.0, f, 1.3) ==
          Approx(c.zeta * std::norm(z.Z1) + std::norm(z.Z2) / c.zeta).epsilon(1e-14));

    Gen g(302);
    for (int i = 0; i < 1000; ++i) {
        const Frequency fr(g.wavenumber(8), g.uniform(-80.0, 80.0));
        const double t = g.uniform(0.0, 500.0), M = g.log_uniform(1e-2, 1e2);
        const SymState s{g.cplx(10.0), g.cplx(10.0)};
        const double e = energy_lemma31(s, t, fr, M), d = energy_lemma31_diag(s, t, fr, M);
        CHECK(e >= 0.5 * d * (1.0 - 1e-13));
        CHECK(e <= 1.5 * d * (1.0 + 1e-13));
    }
}

TEST_CASE("phase rhs and WKB envelope") {
    const Frequency f(3, 21.0);
    CHECK(phase_rhs(M_PI / 2, 7.0, f, 2.0) == Approx(1.5).epsilon(1e-14));
    const double t = 7.0 + 1e3;
    for (double th : {0.0, 0.7, 2.0}) {
        const double asym = std::sqrt(p(t, f)) / 2.0;
        CHECK(std::abs(phase_rhs(th, t, f, 2.0) - asym) < 1e-2 * asym);
    }
    CHECK(wkb_envelope(7.0, f) == Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(wkb_envelope(0.0, f) == Approx(std::pow(450.0, 0.25)).epsilon(1e-14));
}

TEST_CASE("solve_mode: R + Omega = Xi_in and forced growth") {
    const Frequency f(3, 21.0);
    const InviscidInit init{0.0, 0.0, 5.0};
    const auto ts = linspace(0.0, 500.0, 5001);
    const ModeTrajectory tr = solve_mode(init, f, 1.0, 500.0, 1e-8, ts);
    double worst = 0.0;
    std::vector<double> t, r;
    for (const auto& s : tr.samples) {
        worst = std::max(worst, std::abs(s.R + s.Omega - 5.0) / 5.0);
        t.push_back(s.t);
        r.push_back(std::abs(s.R));
    }
    CHECK(worst <= 1e-10);
    const LineFit lf = fit_loglog(local_maxima(t, r), 50.0, 500.0);
    CHECK(lf.slope == Approx(0.5).epsilon(0.1));
}

TEST_CASE("homogeneous run: energy flat, sqrt(p)|Z|^2 grows like t") {
    const Frequency f(1, 2.0);
    const InviscidInit init{1.0, cplx(0.0, 1.0), -1.0};
    const auto ts = logspace(1.0, 1000.0, 2000);
    const ModeTrajectory tr = solve_mode(init, f, 1.0, 1000.0, 1e-9, ts);
    Series e, g;
    const double e0 = energy_lemma31(to_sym(1.0, cplx(0.0, 1.0), 0.0, f, 1.0), 0.0, f, 1.0);
    double lo = 1e300, hi = 0.0;
    for (const auto& s : tr.samples) {
        const double v = energy_lemma31(s.Z, s.t, f, 1.0);
        lo = std::min(lo, v / e0);
        hi = std::max(hi, v / e0);
        e.t.push_back(s.t);
        e.y.push_back(v);
        g.t.push_back(s.t);
        g.y.push_back(std::sqrt(p(s.t, f)) * s.Z.norm() * s.Z.norm());
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1e3);
    CHECK(std::abs(fit_loglog(e, 100.0, 1000.0).slope) <= 0.02);
    CHECK(fit_loglog(g, 50.0, 500.0).slope >= 0.9);
}

TEST_CASE("Gamma: trivial without forcing, consistent with the evolution operator") {
    const Frequency f(2, 5.0);
    const double M = 1.0;
    const InviscidInit hom{1.0, 0.5, -1.0};
    const auto gh = gamma_at(30.0, hom, f, M);
    const SymState zin = to_sym(1.0, 0.5, 0.0, f, M);
    CHECK(std::abs(gh[0] - zin.Z1) < 1e-14);
    CHECK(std::abs(gh[1] - zin.Z2) < 1e-14);

    const InviscidInit init{0.3, -0.2, 2.0};
    const double tol = 1e-8;
    GammaOptions go;
    go.tol = tol;
    for (double t : {3.0, 12.0}) {
        const auto G = gamma_at(t, init, f, M, go);
        const Mat phi = solution_operator(symmetrized_system(f, M, 0.0), 0.0, t, 1e-11);
        const cplx z1 = phi[0][0] * G[0] + phi[0][1] * G[1];
        const cplx z2 = phi[1][0] * G[0] + phi[1][1] * G[1];
        const ModeTrajectory tr = solve_mode(init, f, M, t, 1e-11, {t});
        const SymState& z = tr.samples.back().Z;
        const double scale = std::max(1.0, z.norm());
        CHECK(std::abs(z1 - z.Z1) <= 10.0 * tol * scale);
        CHECK(std::abs(z2 - z.Z2) <= 10.0 * tol * scale);
    }
}

TEST_CASE("Gamma converges for forced data at (3, 21)") {
    GammaOptions opt;
    opt.tail_cap = 500.0;
    const GammaResult gr = gamma_fn({50.0, 100.0, 200.0}, InviscidInit{0.0, 0.0, 5.0}, Frequency(3, 21.0), 1.0, opt);
    const double ginf = std::sqrt(std::norm(gr.gamma_inf[0]) + std::norm(gr.gamma_inf[1]));
    CHECK(std::isfinite(ginf));
    double prev = 1e300;
    for (const auto& G : gr.gamma) {
        const double d = std::sqrt(std::norm(G[0] - gr.gamma_inf[0]) + std::norm(G[1] - gr.gamma_inf[1]));
        CHECK(d <= prev);
        prev = d;
    }
}

TEST_CASE("perturb_generic") {
    const double M = 1.0, eps = 0.1;
    SUBCASE("zero data gives |Gamma_eps| = delta") {
        const Frequency f(1, 0.5);
        const PerturbResult pr = perturb_generic(InviscidInit{}, f, M, eps, 50.0);
        CHECK(pr.delta == Approx(eps * std::exp(-1.25)).epsilon(1e-14));
        CHECK(pr.inf_gamma == Approx(pr.delta).epsilon(1e-10));
    }
    SUBCASE("a crossing Gamma is pushed away from zero") {
        const Frequency f(1, 0.5);
        const double t_star = 2.0;
        const auto G = gamma_at(t_star, InviscidInit{0.0, 0.0, 1.0}, f, M);
        InviscidInit cross;
        from_sym(SymState{-G[0], -G[1]}, 0.0, f, M, cross.R_in, cross.A_in);
        cross.Omega_in = 1.0 - cross.R_in;
        const auto G0 = gamma_at(t_star, cross, f, M);
        CHECK(std::sqrt(std::norm(G0[0]) + std::norm(G0[1])) < 1e-8);
        const PerturbResult pr = perturb_generic(cross, f, M, eps, 50.0);
        CHECK(pr.inf_gamma >= 0.5 * pr.delta);
        CHECK(pr.norm_displacement <= 2.0 * eps);
    }
    SUBCASE("bad input") {
        CHECK_THROWS_AS(perturb_generic(InviscidInit{}, Frequency(1, 0.0), M, 0.0, 10.0), std::invalid_argument);
        CHECK_THROWS_AS(perturb_generic(InviscidInit{}, Frequency(30, 0.0), M, eps, 10.0), PerturbError);
    }
}
