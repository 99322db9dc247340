#include <algorithm>
#include <cmath>

#include "cspec/analysis.hpp"
#include "cspec/field_lab.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace cspec;
using doctest::Approx;

TEST_CASE("presets") {
    const SpectralField forced = assemble_preset("fig1_forced");
    REQUIRE(forced.modes.size() == 2);
    for (const auto& m : forced.modes) {
        CHECK(std::abs(m.k) == 3);
        CHECK(std::abs(forced.eta(m)) == 21.0);
        CHECK(std::abs(m.rho + m.omega - 5.0) == 0.0);
        CHECK(m.rho == cplx(0.0));
        CHECK(m.alpha == cplx(0.0));
    }
    const SpectralField tr = assemble_preset("fig1_transient");
    const FieldMode* m = tr.find(3, 42);
    REQUIRE(m != nullptr);
    CHECK(m->rho == cplx(20.0));
    CHECK(m->alpha == cplx(50.0));
    CHECK(m->rho + m->omega == cplx(5.0));

    CHECK(assemble_preset("zero").modes.empty());
    CHECK_THROWS_AS(assemble_preset("nope"), std::invalid_argument);
    CHECK_THROWS_AS(assemble(GridSpec{}, {{1, 0.3, 1.0, 0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("empty field has zero norms") {
    const SpectralField z = assemble(GridSpec{}, {});
    const HelmholtzNorms n = helmholtz_norms(z, 3.0);
    CHECK(n.Q_norm == 0.0);
    CHECK(n.Px_norm == 0.0);
    CHECK(n.Py_norm == 0.0);
    CHECK(n.rho_norm == 0.0);
    const FieldRun run = run_field(z, FluidParams(1.0, 0.0, 0.0), 10.0, {0.0, 5.0, 10.0});
    for (const auto& nn : run.norms) CHECK(nn.velocity() == 0.0);
    for (double e : run.energy_E0) CHECK(e == 0.0);
}

TEST_CASE("Helmholtz norms") {
    const GridSpec grid{8, 64.0, 0.5};
    const SpectralField one = assemble(grid, {{3, 21.0, 0.0, 0.0, 1.0}}, false);
    const HelmholtzNorms n = helmholtz_norms(one, 7.0);
    CHECK(n.Px_norm == Approx(0.0));
    CHECK(n.Py_norm == Approx(3.0 / 9.0 * std::sqrt(0.5)).epsilon(1e-14));

    // Parseval: |v|^2 = (|A|^2 + |Omega|^2) / p summed with weight d_eta.
    Gen g(601);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ModeSpec> ms;
        for (int i = 0; i < 6; ++i)
            ms.push_back({g.integer(1, 8), 0.5 * g.integer(-100, 100), g.cplx(2.0), g.cplx(2.0), g.cplx(2.0)});
        std::sort(ms.begin(), ms.end(), [](auto& a, auto& b) { return a.k < b.k || (a.k == b.k && a.eta < b.eta); });
        ms.erase(std::unique(ms.begin(), ms.end(), [](auto& a, auto& b) { return a.k == b.k && a.eta == b.eta; }),
                 ms.end());
        const SpectralField fld = assemble(grid, ms);
        const double t = g.uniform(0.0, 50.0);
        double v2 = 0.0;
        for (const auto& m : fld.modes) {
            const double pp = p(t, Frequency(m.k, fld.eta(m)));
            v2 += grid.d_eta * (std::norm(m.alpha) + std::norm(m.omega)) / pp;
        }
        const HelmholtzNorms h = helmholtz_norms(fld, t);
        CHECK(h.Q_norm * h.Q_norm + h.Px_norm * h.Px_norm + h.Py_norm * h.Py_norm == Approx(v2).epsilon(1e-12));
    }
}

TEST_CASE("Sobolev norms") {
    const GridSpec grid{8, 64.0, 0.5};
    const SpectralField one = assemble(grid, {{3, 21.0, 1.0, 0.0, 0.0}}, false);
    CHECK(sobolev_norm(one, NormSpec::iso(-1.0)) == Approx(std::sqrt(0.5) / std::sqrt(451.0)).epsilon(1e-14));
    CHECK(sobolev_norm(one, NormSpec::iso(0.0)) == Approx(sobolev_norm(one, NormSpec::l2())).epsilon(1e-15));
}

TEST_CASE("conjugate symmetry survives evolution") {
    const GridSpec grid{4, 16.0, 0.5};
    RandomBand band;
    band.seed = 7;
    const SpectralField fld = assemble_random_band(grid, band);
    CHECK(conjugate_defect(fld) == 0.0);
    for (const FluidParams& fp : {FluidParams(1.0, 0.0, 0.0), FluidParams(1.0, 1e-2, 1e-3)}) {
        const FieldRun run = run_field(fld, fp, 40.0, {0.0, 20.0, 40.0});
        REQUIRE(run.snapshots.size() == 3);
        for (const auto& s : run.snapshots) CHECK(conjugate_defect(s) == 0.0);
    }
}

TEST_CASE("norms do not depend on mode order or worker count") {
    const GridSpec grid{4, 16.0, 0.5};
    std::vector<ModeSpec> ms = {{1, 2.0, 1.0, 0.5, 0.0}, {2, -3.5, 0.0, 1.0, 2.0}, {3, 8.0, 1.0, 0.0, -1.0},
                                {1, -6.0, cplx(0.0, 1.0), 0.0, 0.0}};
    const SpectralField a = assemble(grid, ms);
    std::reverse(ms.begin(), ms.end());
    const SpectralField b = assemble(grid, ms);
    const FluidParams fp(1.0, 1e-3, 0.0);
    const std::vector<double> ts = {0.0, 10.0, 30.0};
    FieldRunOptions serial, par;
    par.jobs = 3;
    const FieldRun ra = run_field(a, fp, 30.0, ts, serial);
    const FieldRun rb = run_field(b, fp, 30.0, ts, par);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        CHECK(ra.norms[i].Q_norm == rb.norms[i].Q_norm);
        CHECK(ra.norms[i].Px_norm == rb.norms[i].Px_norm);
        CHECK(ra.norms[i].Py_norm == rb.norms[i].Py_norm);
        CHECK(ra.norms[i].rho_norm == rb.norms[i].rho_norm);
    }
}

TEST_CASE("halving d_eta changes smooth-packet norms by less than 1%") {
    const FluidParams fp(1.0, 0.0, 0.0);
    const std::vector<double> ts = {0.0, 5.0, 20.0};
    FieldRunOptions o;
    o.keep_snapshots = false;
    const FieldRun coarse = run_field(assemble_smooth_packet({3, 32.0, 0.5}, SmoothPacket{}), fp, 20.0, ts, o);
    const FieldRun fine = run_field(assemble_smooth_packet({3, 32.0, 0.25}, SmoothPacket{}), fp, 20.0, ts, o);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        // The packet starts at rest.
        if (coarse.norms[i].velocity() == 0.0)
            CHECK(fine.norms[i].velocity() == 0.0);
        else
            CHECK(std::abs(fine.norms[i].velocity() / coarse.norms[i].velocity() - 1.0) < 0.01);
        CHECK(std::abs(fine.norms[i].rho_norm / coarse.norms[i].rho_norm - 1.0) < 0.01);
    }
}

TEST_CASE("field JSON round trip") {
    RandomBand band;
    band.seed = 11;
    const SpectralField f = assemble_random_band({3, 8.0, 0.5}, band);
    const SpectralField g = field_from_json(field_to_json(f));
    REQUIRE(g.modes.size() == f.modes.size());
    CHECK(g.grid.d_eta == f.grid.d_eta);
    for (std::size_t i = 0; i < f.modes.size(); ++i) {
        CHECK(g.modes[i].k == f.modes[i].k);
        CHECK(g.modes[i].j == f.modes[i].j);
        CHECK(g.modes[i].rho == f.modes[i].rho);
        CHECK(g.modes[i].alpha == f.modes[i].alpha);
        CHECK(g.modes[i].omega == f.modes[i].omega);
    }
    CHECK_THROWS_AS(field_from_json("{\"schema\": \"other\"}"), std::invalid_argument);
    CHECK_THROWS_AS(field_from_json("not json"), std::invalid_argument);
}

TEST_CASE("forced field: inviscid growth and viscous transient") {
    const SpectralField fld = assemble_preset("fig1_forced");
    FieldRunOptions o;
    o.keep_snapshots = false;
    const auto ts = linspace(0.0, 500.0, 5001);
    const FieldRun inv = run_field(fld, FluidParams(1.0, 0.0, 0.0), 500.0, ts, o);
    std::vector<double> q;
    for (const auto& n : inv.norms) q.push_back(n.Q_norm + n.rho_norm);
    CHECK(fit_loglog(local_maxima(ts, q), 50.0, 500.0).slope == Approx(0.5).epsilon(0.1));

    const double nu = 2e-4;
    const auto tv = linspace(0.0, 1500.0, 3001);
    const FieldRun vis = run_field(fld, FluidParams(1.0, nu, 0.0), 1500.0, tv, o);
    double sup = 0.0;
    for (const auto& n : vis.norms) sup = std::max(sup, n.Q_norm + n.rho_norm);
    // data size |Xi_in| sqrt(2 d_eta)
    const double data = 5.0 * std::sqrt(2.0 * fld.grid.d_eta);
    CHECK(sup <= 10.0 * std::pow(nu, -1.0 / 6.0) * data);
    const auto& last = vis.norms.back();
    CHECK(last.Q_norm + last.rho_norm < 1e-2 * sup);
}
