#include <cmath>
#include <cstdlib>

#include "cspec/harness.hpp"
#include "doctest.h"

using namespace cspec;

TEST_CASE("resolve_jobs") {
    CHECK(resolve_jobs("3") == 3);
    CHECK(resolve_jobs("auto") >= 1);
    CHECK_THROWS_AS(resolve_jobs("0"), std::invalid_argument);
    CHECK_THROWS_AS(resolve_jobs("-2"), std::invalid_argument);
    CHECK_THROWS_AS(resolve_jobs("two"), std::invalid_argument);
    ::setenv("CSPEC_JOBS", "2", 1);
    CHECK(resolve_jobs("") == 2);
    ::setenv("CSPEC_JOBS", "bad", 1);
    CHECK_THROWS_AS(resolve_jobs(""), std::invalid_argument);
    ::unsetenv("CSPEC_JOBS");
    CHECK(resolve_jobs("") == 1);
}

TEST_CASE("sweep points: product, order, dedup, cap") {
    SweepSpec s;
    s.k = {2, 1, 1};
    s.eta = {5.0, -5.0};
    s.nu = {1e-3, 1e-2};
    const auto pts = s.points();
    REQUIRE(pts.size() == 8);
    CHECK(pts.front().k == 1);
    CHECK(pts.front().eta == -5.0);
    CHECK(pts.front().nu == 1e-3);
    CHECK(pts.back().k == 2);
    s.cap = 7;
    CHECK_THROWS_AS(s.points(), std::invalid_argument);

    SweepSpec e;
    const auto one = e.points();
    REQUIRE(one.size() == 1);
    CHECK(one[0].k == 1);
    CHECK(e.data_at(0).R == cplx(1.0));
}

TEST_CASE("sweep spec parsing") {
    const SweepSpec s = sweep_from_json(R"({"k": 2, "eta": [0, -5], "nu": [1e-3],
        "data": [{"R": [1, 0], "A": 0.5, "Omega": [0, -1]}], "rtol": 1e-9})");
    CHECK(s.k == std::vector<int>{2});
    CHECK(s.eta.size() == 2);
    CHECK(s.rtol == 1e-9);
    CHECK(s.data_at(0).Omega == cplx(0.0, -1.0));
    CHECK(s.data_at(0).A == cplx(0.5));
    CHECK_THROWS_AS(sweep_from_json(R"({"kk": 1})"), std::invalid_argument);
    CHECK_THROWS_AS(sweep_from_json(R"({"eta": "x"})"), std::invalid_argument);
    CHECK_THROWS_AS(sweep_from_json("[1]"), std::invalid_argument);
    CHECK_THROWS_AS(sweep_from_json("{"), std::invalid_argument);
}

TEST_CASE("serial and parallel sweeps write identical CSV") {
    SweepSpec s;
    s.k = {1, 2};
    s.eta = {0.0, 4.0};
    s.nu = {0.0, 1e-2};
    s.horizon = {60.0};
    s.data = {InitialData{1.0, 0.0, 0.0}, InitialData{0.0, 1.0, 1.0}};
    const SweepResult a = run_sweep(s, 1);
    const SweepResult b = run_sweep(s, 3);
    CHECK(a.failed == 0);
    CHECK(sweep_csv(a) == sweep_csv(b));
    CHECK(sweep_summary_json(a) == sweep_summary_json(b));
    CHECK(sweep_csv(a).rfind("k,eta,mach,nu,lambda,horizon,data,quantity,value,status\n", 0) == 0);
}

TEST_CASE("duplicate points collapse to one row") {
    SweepSpec once, twice;
    once.k = {1};
    twice.k = {1, 1};
    once.eta = {2.0};
    twice.eta = {2.0, 2.0};
    once.horizon = twice.horizon = {30.0};
    CHECK(sweep_csv(run_sweep(once, 1)) == sweep_csv(run_sweep(twice, 2)));
}

TEST_CASE("single-point sweep equals a direct run") {
    SweepSpec s;
    s.k = {3};
    s.eta = {21.0};
    s.horizon = {100.0};
    s.data = {InitialData{0.0, 0.0, 5.0}};
    const SweepResult sw = run_sweep(s, 1);
    REQUIRE(sw.rows.size() == 1);
    PointOptions po;
    po.early_stop = true;
    const PointResult direct = run_point({3, 21.0, 1.0, 0.0, 0.0, 100.0, 0}, InitialData{0.0, 0.0, 5.0}, po);
    CHECK(sw.rows[0].transient_max == direct.transient_max);
    CHECK(sw.rows[0].t_at_max == direct.t_at_max);
    CHECK(sw.rows[0].data_size == direct.data_size);
}

TEST_CASE("failures are reported per point") {
    SweepSpec s;
    s.mach = {-1.0, 1.0};
    s.horizon = {10.0};
    const SweepResult r = run_sweep(s, 1);
    CHECK(r.failed == 1);
    CHECK(sweep_csv(r).find("aborted: ") != std::string::npos);

    const PointResult z = run_point(RunPoint{}, InitialData{0.0, 0.0, 0.0}, PointOptions{});
    CHECK_FALSE(z.ok);
    CHECK(z.error_kind == PointError::INVALID);
}

TEST_CASE("nu scaling from synthetic rows") {
    std::vector<PointResult> rows;
    for (double nu : {1e-2, 1e-3, 1e-4})
        for (double scale : {0.5, 1.0}) {
            PointResult r;
            r.point.nu = nu;
            r.transient_max = scale * 3.0 * std::pow(nu, -1.0 / 6.0);
            rows.push_back(r);
        }
    PointResult inv;
    inv.point.nu = 0.0;
    inv.transient_max = 1e9;
    rows.push_back(inv);
    const NuScaling ns = nu_scaling(rows);
    REQUIRE(ns.available);
    CHECK(ns.exponent == doctest::Approx(-1.0 / 6.0).epsilon(1e-10));
    CHECK(ns.nu.size() == 3);
}

TEST_CASE("fmt17") {
    CHECK(fmt17(0.1) == "0.10000000000000001");
    CHECK(fmt17(NAN) == "nan");
    CHECK(fmt17(-INFINITY) == "-inf");
}
