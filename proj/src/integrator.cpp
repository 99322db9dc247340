#include "cspec/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cspec/integrator_core.hpp"
#include "cspec/quadrature.hpp"

namespace cspec {

namespace {

void check_system(const LinearSystem& sys) {
    if (sys.dim < 1 || sys.dim > kMaxDim) throw std::invalid_argument("LinearSystem: dim must be in 1..4");
    if (!sys.matrix_fn) throw std::invalid_argument("LinearSystem: matrix_fn is required");
}

struct FnSystem {
    const LinearSystem& s;
    void matrix(double t, Mat& a) const { s.matrix_fn(t, a); }
    bool forced() const { return bool(s.forcing_fn); }
    void forcing(double t, Vec& f) const { s.forcing_fn(t, f); }
    double hint(double t) const { return s.stiffness_hint ? s.stiffness_hint(t) : 0.0; }
};

template <int N>
StreamResult run(const LinearSystem& sys, const Vec& z0, double t0, double t1, const IntegratorOptions& opt,
                 const std::vector<double>& samples, const SampleFn& on_sample, const StepFn& on_step) {
    FnSystem fs{sys};
    auto samp = [&](double t, const Vec& z) {
        if (on_sample) on_sample(t, z);
    };
    auto step = [&](double t, const detail::State<N>& s) {
        if (!on_step) return true;
        Vec v{};
        for (int i = 0; i < N; ++i) v[i] = s[i];
        return on_step(t, v);
    };
    return detail::integrate_core<N>(fs, z0, t0, t1, opt, samples, samp, step);
}

}  // namespace

double vec_norm(const Vec& z, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += std::norm(z[i]);
    return std::sqrt(s);
}

StreamResult integrate_stream(const LinearSystem& sys, const Vec& z0, double t0, double t1,
                              const IntegratorOptions& opt, const std::vector<double>& sample_times,
                              const SampleFn& on_sample, const StepFn& on_step) {
    check_system(sys);
    switch (sys.dim) {
        case 1: return run<1>(sys, z0, t0, t1, opt, sample_times, on_sample, on_step);
        case 2: return run<2>(sys, z0, t0, t1, opt, sample_times, on_sample, on_step);
        case 3: return run<3>(sys, z0, t0, t1, opt, sample_times, on_sample, on_step);
        default: return run<4>(sys, z0, t0, t1, opt, sample_times, on_sample, on_step);
    }
}

Trajectory integrate(const LinearSystem& sys, const Vec& z0, double t0, double t1, const IntegratorOptions& opt,
                     const std::vector<double>& sample_times) {
    Trajectory tr;
    tr.times.reserve(sample_times.size());
    tr.states.reserve(sample_times.size());
    auto res = integrate_stream(sys, z0, t0, t1, opt, sample_times, [&](double t, const Vec& z) {
        tr.times.push_back(t);
        tr.states.push_back(z);
    });
    tr.step_stats = res.stats;
    return tr;
}

Trajectory integrate(const LinearSystem& sys, const Vec& z0, double t0, double t1, double rtol, double atol,
                     const std::vector<double>& sample_times) {
    IntegratorOptions opt;
    opt.rtol = rtol;
    opt.atol = atol;
    return integrate(sys, z0, t0, t1, opt, sample_times);
}

Mat identity_mat(int dim) {
    Mat m{};
    for (int i = 0; i < dim; ++i) m[i][i] = 1.0;
    return m;
}

Mat matmul(const Mat& a, const Mat& b, int dim) {
    Mat c{};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (int l = 0; l < dim; ++l) s += a[i][l] * b[l][j];
            c[i][j] = s;
        }
    return c;
}

Vec matvec(const Mat& a, const Vec& z, int dim) {
    Vec out{};
    for (int i = 0; i < dim; ++i) {
        cplx s = 0.0;
        for (int j = 0; j < dim; ++j) s += a[i][j] * z[j];
        out[i] = s;
    }
    return out;
}

double det(const Mat& a, int dim) {
    // Gaussian elimination with partial pivoting on a copy.
    Mat m = a;
    double d = 1.0;
    for (int c = 0; c < dim; ++c) {
        int piv = c;
        for (int r = c + 1; r < dim; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            d = -d;
        }
        d *= m[c][c];
        for (int r = c + 1; r < dim; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int j = c; j < dim; ++j) m[r][j] -= f * m[c][j];
        }
    }
    return d;
}

Mat inverse2(const Mat& a) {
    const double d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if (d == 0.0) throw std::domain_error("inverse2: singular matrix");
    Mat r{};
    r[0][0] = a[1][1] / d;
    r[0][1] = -a[0][1] / d;
    r[1][0] = -a[1][0] / d;
    r[1][1] = a[0][0] / d;
    return r;
}

double max_abs_diff(const Mat& a, const Mat& b, int dim) {
    double m = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

double max_abs(const Mat& a, int dim) {
    double m = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m = std::max(m, std::abs(a[i][j]));
    return m;
}

PicardResult fundamental_matrix_picard(const LinearSystem& sys, double t0, double t, int n_terms, int quad_points) {
    check_system(sys);
    if (n_terms < 0) throw std::invalid_argument("picard: n_terms must be >= 0");
    const int dim = sys.dim;
    PicardResult out;
    out.phi = identity_mat(dim);
    if (n_terms == 0 || t == t0) {
        out.last_term_norm = n_terms == 0 ? 1.0 : 0.0;
        return out;
    }

    constexpr int q = 8;
    const int panels = std::max(1, (quad_points + q - 1) / q);
    const GaussRule g = gauss_legendre(q);
    const auto S = gauss_integration_matrix(g);
    const double hp = (t - t0) / panels;

    // A at every node, checking the forcing on the way.
    std::vector<Mat> a_nodes(std::size_t(panels) * q);
    Vec fv{};
    for (int pnl = 0; pnl < panels; ++pnl)
        for (int i = 0; i < q; ++i) {
            const double s = t0 + hp * (pnl + 0.5 * (g.nodes[i] + 1.0));
            sys.matrix_fn(s, a_nodes[std::size_t(pnl) * q + i]);
            if (sys.forcing_fn) {
                sys.forcing_fn(s, fv);
                for (int d = 0; d < dim; ++d)
                    if (fv[d] != 0.0) throw std::invalid_argument("picard: forcing must vanish identically");
            }
        }

    // Current iterate at the nodes and at the right end.
    std::vector<Mat> cur(a_nodes.size(), identity_mat(dim));
    Mat cur_end = identity_mat(dim);
    for (int term = 1; term <= n_terms; ++term) {
        std::vector<Mat> next(a_nodes.size());
        Mat acc{};  // integral up to the current panel start
        for (int pnl = 0; pnl < panels; ++pnl) {
            std::array<Mat, q> integrand;
            for (int j = 0; j < q; ++j) {
                const std::size_t idx = std::size_t(pnl) * q + j;
                integrand[j] = matmul(a_nodes[idx], cur[idx], dim);
            }
            for (int i = 0; i < q; ++i) {
                Mat v = acc;
                for (int j = 0; j < q; ++j)
                    for (int r = 0; r < dim; ++r)
                        for (int c = 0; c < dim; ++c) v[r][c] += 0.5 * hp * S[i][j] * integrand[j][r][c];
                next[std::size_t(pnl) * q + i] = v;
            }
            for (int j = 0; j < q; ++j)
                for (int r = 0; r < dim; ++r)
                    for (int c = 0; c < dim; ++c) acc[r][c] += 0.5 * hp * g.weights[j] * integrand[j][r][c];
        }
        cur = std::move(next);
        cur_end = acc;
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) out.phi[r][c] += cur_end[r][c];
    }
    out.last_term_norm = max_abs(cur_end, dim);
    return out;
}

std::vector<Mat> solution_operator_samples(const LinearSystem& sys, double t0, const std::vector<double>& sample_times,
                                           const IntegratorOptions& opt) {
    check_system(sys);
    if (sys.forcing_fn) throw std::invalid_argument("solution_operator: system must be homogeneous");
    const int dim = sys.dim;
    std::vector<Mat> out(sample_times.size(), Mat{});
    if (sample_times.empty()) return out;
    const double t1 = sample_times.back();
    // Real coefficients: columns 2c and 2c+1 travel together as e_{2c} + i e_{2c+1}.
    for (int c = 0; c < dim; c += 2) {
        Vec z0{};
        z0[c] = 1.0;
        if (c + 1 < dim) z0[c + 1] = cplx(0.0, 1.0);
        std::size_t idx = 0;
        integrate_stream(sys, z0, t0, t1, opt, sample_times, [&](double, const Vec& z) {
            for (int r = 0; r < dim; ++r) {
                out[idx][r][c] = z[r].real();
                if (c + 1 < dim) out[idx][r][c + 1] = z[r].imag();
            }
            ++idx;
        });
    }
    return out;
}

double accumulated_phase(const LinearSystem& sys, double t0, double t1) {
    if (!sys.stiffness_hint || t1 <= t0) return 0.0;
    const CompositeRule rule = composite_gauss(t0, t1, 64, 8);
    double theta = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) theta += rule.weights[i] * sys.stiffness_hint(rule.nodes[i]);
    return theta;
}

Mat solution_operator(const LinearSystem& sys, double t0, double t, double rtol) {
    if (!(rtol > 0.0)) throw std::invalid_argument("solution_operator: rtol must be > 0");
    // Oscillatory columns pick up about rtol/3 of amplitude error per radian of phase, so the
    // step tolerance is scaled down by the accumulated phase to make rtol a global target.
    const double theta = accumulated_phase(sys, std::min(t0, t), std::max(t0, t));
    IntegratorOptions opt;
    opt.rtol = std::max(rtol / std::max(1.0, theta / 3.0), kMinStepRtol);
    opt.atol = opt.rtol * 1e-4;
    return solution_operator_samples(sys, t0, {t}, opt).front();
}

}  // namespace cspec
