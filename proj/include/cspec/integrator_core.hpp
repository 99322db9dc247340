#pragma once

// Dormand-Prince 5(4) stepping core, templated on the state dimension and on a
// system type providing:
//   void matrix(double t, Mat& a) const;
//   bool forced() const;  void forcing(double t, Vec& f) const;
//   double hint(double t) const;   // <= 0 disables the oscillation cap

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "cspec/integrator.hpp"

namespace cspec::detail {

namespace dp5 {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dp5

// Decayed components are zeroed before they reach the subnormal range, where arithmetic is very slow.
constexpr double kFlushBelow = 1e-250;

inline double cabs(const cplx& z) { return std::sqrt(z.real() * z.real() + z.imag() * z.imag()); }

template <int N>
struct State {
    cplx v[N];
    cplx& operator[](int i) { return v[i]; }
    const cplx& operator[](int i) const { return v[i]; }
};

template <int N, class Sys>
inline void eval_rhs(const Sys& sys, double t, const State<N>& z, State<N>& out) {
    Mat a;
    sys.matrix(t, a);
    if (sys.forced()) {
        Vec f;
        sys.forcing(t, f);
        for (int i = 0; i < N; ++i) {
            cplx acc = f[i];
            for (int j = 0; j < N; ++j) acc += a[i][j] * z[j];
            out[i] = acc;
        }
    } else {
        for (int i = 0; i < N; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < N; ++j) acc += a[i][j] * z[j];
            out[i] = acc;
        }
    }
}

inline void validate_request(double t0, double t1, const IntegratorOptions& opt, const std::vector<double>& samples) {
    if (!(t1 >= t0)) throw std::invalid_argument("integrate: need t1 >= t0");
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw std::invalid_argument("integrate: tolerances must be > 0");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double s = samples[i];
        if (s < t0 || s > t1) throw std::invalid_argument("integrate: sample time outside [t0, t1]");
        if (i > 0 && s < samples[i - 1]) throw std::invalid_argument("integrate: sample times must be sorted");
    }
}

template <int N, class Sys, class OnSample, class OnStep>
StreamResult integrate_core(const Sys& sys, const Vec& z0, double t0, double t1, const IntegratorOptions& opt,
                            const std::vector<double>& samples, OnSample&& on_sample, OnStep&& on_step) {
    using namespace dp5;
    validate_request(t0, t1, opt, samples);
    const double rtol = opt.rtol, atol = opt.atol;

    StreamResult res;
    State<N> y;
    for (int i = 0; i < N; ++i) y[i] = z0[i];
    double t = t0;
    std::size_t next = 0;

    auto to_vec = [](const State<N>& s) {
        Vec v{};
        for (int i = 0; i < N; ++i) v[i] = s[i];
        return v;
    };
    while (next < samples.size() && samples[next] <= t0) {
        on_sample(samples[next], to_vec(y));
        ++next;
    }
    if (t1 == t0) {
        res.t_end = t;
        res.z_end = to_vec(y);
        return res;
    }

    const double span = t1 - t0;
    const double h_min = 1e-14 * span;
    auto cap = [&](double tt, double h) {
        const double w = sys.hint(tt);
        return w > 0.0 ? std::min(h, opt.c_osc / w) : h;
    };

    State<N> k1, k2, k3, k4, k5, k6, k7, ys, y1;
    eval_rhs<N>(sys, t, y, k1);

    double h;
    {
        double d0 = 0.0, d1n = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = atol + rtol * cabs(y[i]);
            d0 += std::norm(y[i]) / (sc * sc);
            d1n += std::norm(k1[i]) / (sc * sc);
        }
        d0 = std::sqrt(d0 / N);
        d1n = std::sqrt(d1n / N);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1n;
        h0 = std::min(cap(t, h0), span);
        for (int i = 0; i < N; ++i) ys[i] = y[i] + h0 * k1[i];
        eval_rhs<N>(sys, t + h0, ys, k2);
        double d2 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double sc = atol + rtol * cabs(y[i]);
            d2 += std::norm(k2[i] - k1[i]) / (sc * sc);
        }
        d2 = std::sqrt(d2 / N) / h0;
        const double dm = std::max(d1n, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6 * span, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
        // Components starting at zero under a tiny atol drive the estimate far below anything the
        // controller needs; it recovers from an optimistic start by rejection.
        h = std::max(std::min(100.0 * h0, h1), 100.0 * h_min);
    }

    bool last_rejected = false;
    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) throw IntegratorError("integrate: step budget exhausted", t, h);
        h = cap(t, h);
        bool final_step = false;
        if (t + 1.01 * h >= t1) {
            h = t1 - t;
            final_step = true;
        }
        if (h < h_min) {
            std::ostringstream os;
            os << "integrate: step size underflow at t=" << t << " (h=" << h << ", limit " << h_min << ")";
            throw IntegratorError(os.str(), t, h);
        }

        for (int i = 0; i < N; ++i) ys[i] = y[i] + h * (a21 * k1[i]);
        eval_rhs<N>(sys, t + c2 * h, ys, k2);
        for (int i = 0; i < N; ++i) ys[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval_rhs<N>(sys, t + c3 * h, ys, k3);
        for (int i = 0; i < N; ++i) ys[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval_rhs<N>(sys, t + c4 * h, ys, k4);
        for (int i = 0; i < N; ++i) ys[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval_rhs<N>(sys, t + c5 * h, ys, k5);
        for (int i = 0; i < N; ++i)
            ys[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        const double t_new = final_step ? t1 : t + h;
        eval_rhs<N>(sys, t_new, ys, k6);
        for (int i = 0; i < N; ++i)
            y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        eval_rhs<N>(sys, t_new, y1, k7);

        double en = 0.0;
        for (int i = 0; i < N; ++i) {
            const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = atol + rtol * std::max(cabs(y[i]), cabs(y1[i]));
            en += std::norm(e) / (sc * sc);
        }
        en = std::sqrt(en / N);
        if (!std::isfinite(en)) throw IntegratorError("integrate: non-finite error estimate", t, h);

        if (en <= 1.0) {
            res.stats.accepted++;
            res.stats.max_err = std::max(res.stats.max_err, en);
            if (next < samples.size() && samples[next] <= t_new) {
                State<N> r2, r3, r4, r5;
                for (int i = 0; i < N; ++i) {
                    const cplx ydiff = y1[i] - y[i];
                    const cplx bspl = h * k1[i] - ydiff;
                    r2[i] = ydiff;
                    r3[i] = bspl;
                    r4[i] = ydiff - h * k7[i] - bspl;
                    r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                while (next < samples.size() && samples[next] <= t_new) {
                    const double th = (samples[next] - t) / h;
                    const double th1 = 1.0 - th;
                    Vec out{};
                    for (int i = 0; i < N; ++i)
                        out[i] = y[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
                    on_sample(samples[next], out);
                    ++next;
                }
            }
            y = y1;
            k1 = k7;
            for (int i = 0; i < N; ++i) {
                if (cabs(y[i]) < kFlushBelow) y[i] = 0.0;
                if (cabs(k1[i]) < kFlushBelow) k1[i] = 0.0;
            }
            t = t_new;
            if (!on_step(t, y)) {
                res.stopped_early = true;
                break;
            }
            double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            h *= fac;
            last_rejected = false;
        } else {
            res.stats.rejected++;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            last_rejected = true;
        }
    }
    res.t_end = t;
    res.z_end = to_vec(y);
    return res;
}

// No-op observers.
struct NoSample {
    void operator()(double, const Vec&) const {}
};
struct AlwaysContinue {
    template <class S>
    bool operator()(double, const S&) const { return true; }
};

// Step observer receives the internal State<N>; this wraps a Vec-based callback.
template <int N, class F>
struct VecStep {
    F& f;
    bool operator()(double t, const State<N>& s) const {
        Vec v{};
        for (int i = 0; i < N; ++i) v[i] = s[i];
        return f(t, v);
    }
};

}  // namespace cspec::detail
