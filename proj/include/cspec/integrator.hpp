#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cspec {

using cplx = std::complex<double>;

constexpr int kMaxDim = 4;
using Vec = std::array<cplx, kMaxDim>;
// Coefficient matrices are real: every system here has real coefficients, which is
// also what keeps conjugate-symmetric fields conjugate-symmetric.
using Mat = std::array<std::array<double, kMaxDim>, kMaxDim>;

struct LinearSystem {
    int dim = 2;
    std::function<void(double t, Mat& a)> matrix_fn;
    // Empty means identically zero.
    std::function<void(double t, Vec& f)> forcing_fn;
    // Characteristic oscillation frequency; empty disables the cap.
    std::function<double(double t)> stiffness_hint;
};

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double max_err = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    StepStats step_stats;
};

struct IntegratorOptions {
    double rtol = 1e-8;
    double atol = 1e-12;
    double c_osc = 0.2;
    std::size_t max_steps = 2'000'000'000;
};

class IntegratorError : public std::runtime_error {
public:
    IntegratorError(const std::string& what, double t, double h)
        : std::runtime_error(what), t_fail(t), h_fail(h) {}
    double t_fail;
    double h_fail;
};

using SampleFn = std::function<void(double t, const Vec& z)>;
// Called after every accepted step; returning false stops the integration.
using StepFn = std::function<bool(double t, const Vec& z)>;

struct StreamResult {
    double t_end = 0.0;
    Vec z_end{};
    StepStats stats;
    bool stopped_early = false;
};

// Samples must be non-decreasing and inside [t0, t1].
StreamResult integrate_stream(const LinearSystem& sys, const Vec& z0, double t0, double t1,
                              const IntegratorOptions& opt, const std::vector<double>& sample_times,
                              const SampleFn& on_sample, const StepFn& on_step = {});

Trajectory integrate(const LinearSystem& sys, const Vec& z0, double t0, double t1, double rtol,
                     double atol, const std::vector<double>& sample_times);

Trajectory integrate(const LinearSystem& sys, const Vec& z0, double t0, double t1,
                     const IntegratorOptions& opt, const std::vector<double>& sample_times);

struct PicardResult {
    Mat phi{};
    double last_term_norm = 0.0;
};

// I + sum_{n=1}^{n_terms} I_n with I_{n+1}(t) = int_{t0}^t A(s) I_n(s) ds.
// quad_points is the total number of Gauss nodes; panels hold 8 nodes each.
PicardResult fundamental_matrix_picard(const LinearSystem& sys, double t0, double t, int n_terms,
                                       int quad_points);

// Phase accumulated by the stiffness hint over [t0, t1].
double accumulated_phase(const LinearSystem& sys, double t0, double t1);

// Below this the per-step tolerance is lost in roundoff.
constexpr double kMinStepRtol = 1e-14;

// rtol is a global target: the step tolerance shrinks with the accumulated phase.
Mat solution_operator(const LinearSystem& sys, double t0, double t, double rtol);

// Phi(s, t0) for every s in sample_times, from one integration per column pair.
std::vector<Mat> solution_operator_samples(const LinearSystem& sys, double t0,
                                           const std::vector<double>& sample_times,
                                           const IntegratorOptions& opt);

Mat identity_mat(int dim);
Mat matmul(const Mat& a, const Mat& b, int dim);
Vec matvec(const Mat& a, const Vec& z, int dim);
double det(const Mat& a, int dim);
// Adjugate over determinant.
Mat inverse2(const Mat& a);
double max_abs_diff(const Mat& a, const Mat& b, int dim);
double max_abs(const Mat& a, int dim);

double vec_norm(const Vec& z, int dim);

}  // namespace cspec
