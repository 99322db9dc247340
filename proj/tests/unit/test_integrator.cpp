#include <cmath>
#include <numbers>

#include "cspec/integrator.hpp"
#include "cspec/inviscid_mode.hpp"
#include "doctest.h"
#include "gen.hpp"

using namespace cspec;
using doctest::Approx;

namespace {

LinearSystem constant_system(const Mat& a, int dim) {
    LinearSystem sys;
    sys.dim = dim;
    sys.matrix_fn = [a](double, Mat& out) { out = a; };
    return sys;
}

Mat rotation_generator() {
    Mat a{};
    a[0][1] = 1.0;
    a[1][0] = -1.0;
    return a;
}

// Partial sum of exp(tA) computed directly.
Mat exp_partial(const Mat& a, double t, int dim, int terms) {
    Mat sum = identity_mat(dim), term = identity_mat(dim);
    for (int n = 1; n <= terms; ++n) {
        term = matmul(term, a, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) term[i][j] *= t / n;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) sum[i][j] += term[i][j];
    }
    return sum;
}

}  // namespace

TEST_CASE("rotation: z0 = (1, 0) reaches (0, -1) at pi/2") {
    Vec z0{};
    z0[0] = 1.0;
    const Trajectory tr = integrate(constant_system(rotation_generator(), 2), z0, 0.0, std::numbers::pi / 2, 1e-10,
                                    1e-12, {std::numbers::pi / 2});
    REQUIRE(tr.states.size() == 1);
    CHECK(std::abs(tr.states[0][0]) < 1e-8);
    CHECK(std::abs(tr.states[0][1] - cplx(-1.0)) < 1e-8);
}

TEST_CASE("zero data stays zero") {
    const Trajectory tr = integrate(symmetrized_system(Frequency(2, 5.0), 1.0, 0.0), Vec{}, 0.0, 20.0, 1e-8, 1e-12,
                                    {0.0, 5.0, 20.0});
    for (const auto& z : tr.states) CHECK(vec_norm(z, 2) == 0.0);
}

TEST_CASE("sample times are validated") {
    const LinearSystem sys = constant_system(rotation_generator(), 2);
    CHECK_THROWS_AS(integrate(sys, Vec{}, 0.0, 1.0, 1e-8, 1e-12, {0.5, 0.2}), std::invalid_argument);
    CHECK_THROWS_AS(integrate(sys, Vec{}, 0.0, 1.0, 1e-8, 1e-12, {2.0}), std::invalid_argument);
}

TEST_CASE("Picard series") {
    const LinearSystem rot = constant_system(rotation_generator(), 2);
    CHECK(max_abs_diff(fundamental_matrix_picard(rot, 0.0, 0.7, 0, 16).phi, identity_mat(2), 2) == 0.0);

    Mat a{};
    a[0][0] = 0.3;
    a[0][1] = -1.2;
    a[1][0] = 0.8;
    a[1][1] = -0.1;
    a[2][2] = 0.5;
    a[0][2] = 0.4;
    const PicardResult pr = fundamental_matrix_picard(constant_system(a, 3), 0.0, 0.2, 8, 32);
    CHECK(max_abs_diff(pr.phi, exp_partial(a, 0.2, 3, 8), 3) < 1e-10);

    const LinearSystem sym = symmetrized_system(Frequency(3, 21.0), 1.0, 0.0);
    const PicardResult ps = fundamental_matrix_picard(sym, 0.0, 0.05, 20, 64);
    CHECK(std::abs(det(ps.phi, 2) - 1.0) < 1e-10 + 10.0 * ps.last_term_norm);
}

TEST_CASE("integrator matches the Picard oracle on the inviscid mode system") {
    const LinearSystem sys = inviscid_ra_system(Frequency(1, 0.0), 1.0, 0.0);
    const Mat pic = fundamental_matrix_picard(sys, 0.0, 0.1, 20, 64).phi;
    CHECK(max_abs_diff(solution_operator(sys, 0.0, 0.1, 1e-10), pic, 2) <= 1e-6);

    // Halving the tolerance never makes the short-time error worse.
    const LinearSystem sym = symmetrized_system(Frequency(2, 3.0), 0.7, 0.0);
    for (double t : {0.1, 0.3, 0.5}) {
        const Mat ref = fundamental_matrix_picard(sym, 0.0, t, 30, 128).phi;
        double prev = 1e300;
        for (double tol : {1e-9, 5e-10, 2.5e-10, 1.25e-10}) {
            const double err = max_abs_diff(solution_operator(sym, 0.0, t, tol), ref, 2);
            CHECK(err <= prev * (1.0 + 1e-12) + 1e-15);
            prev = err;
        }
    }
}

TEST_CASE("solution operator: identity, Liouville, group property") {
    const LinearSystem sys = symmetrized_system(Frequency(3, 21.0), 1.0, 0.0);
    CHECK(max_abs_diff(solution_operator(sys, 2.0, 2.0, 1e-8), identity_mat(2), 2) == 0.0);
    const double rtol = 1e-9;
    for (double t : {10.0, 50.0, 100.0}) CHECK(std::abs(det(solution_operator(sys, 0.0, t, rtol), 2) - 1.0) <= 1e-8);

    const double t0 = 1.0, t1 = 31.0, s = 0.5 * (t0 + t1);
    const Mat full = solution_operator(sys, t0, t1, rtol);
    const Mat split = matmul(solution_operator(sys, s, t1, rtol), solution_operator(sys, t0, s, rtol), 2);
    CHECK(max_abs_diff(full, split, 2) <= 3.0 * rtol * std::max(1.0, max_abs(full, 2)));
}

TEST_CASE("property: trace-free systems keep det = 1 up to t = 1000") {
    Gen g(201);
    const double rtol = 1e-8;
    for (int i = 0; i < 3; ++i) {
        // Keeps the accumulated phase near 1e5 radians so each run stays within a few seconds.
        const Frequency f(g.integer(1, 2), g.uniform(-10.0, 10.0));
        const double M = g.uniform(3.0, 6.0);
        const Mat phi = solution_operator(symmetrized_system(f, M, 0.0), 0.0, 1000.0, rtol);
        CHECK(std::abs(det(phi, 2) - 1.0) <= 10.0 * rtol);
    }
}

TEST_CASE("determinism: repeated runs are bit-identical") {
    const LinearSystem sys = inviscid_ra_system(Frequency(3, 21.0), 1.0, 5.0);
    Vec z0{};
    const std::vector<double> ts = {1.0, 10.0, 100.0};
    const Trajectory a = integrate(sys, z0, 0.0, 100.0, 1e-8, 1e-12, ts);
    const Trajectory b = integrate(sys, z0, 0.0, 100.0, 1e-8, 1e-12, ts);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i)
        for (int j = 0; j < 2; ++j) CHECK(a.states[i][j] == b.states[i][j]);
    CHECK(a.step_stats.accepted == b.step_stats.accepted);
}

TEST_CASE("stream observer can stop the run") {
    const LinearSystem sys = constant_system(rotation_generator(), 2);
    Vec z0{};
    z0[0] = 1.0;
    const StreamResult r = integrate_stream(sys, z0, 0.0, 100.0, IntegratorOptions{}, {}, {},
                                            [](double t, const Vec&) { return t < 3.0; });
    CHECK(r.stopped_early);
    CHECK(r.t_end >= 3.0);
    CHECK(r.t_end < 100.0);
}

TEST_CASE("matrix helpers") {
    Mat a{};
    a[0][0] = 2.0;
    a[0][1] = 1.0;
    a[1][0] = 5.0;
    a[1][1] = 3.0;
    CHECK(det(a, 2) == Approx(1.0).epsilon(1e-14));
    CHECK(max_abs_diff(matmul(a, inverse2(a), 2), identity_mat(2), 2) < 1e-15);
}
