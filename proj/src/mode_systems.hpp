#pragma once

// Inlined per-mode systems for detail::integrate_core.

#include <cmath>

#include "cspec/integrator.hpp"

namespace cspec::detail {

// (R, A) with Omega = Xi_in - R eliminated.
struct InviscidRA {
    double k, eta, M;
    cplx xi;

    void matrix(double t, Mat& a) const {
        const double s = eta - k * t;
        const double pp = k * k + s * s;
        a[0][0] = 0.0;
        a[0][1] = -1.0;
        a[1][0] = pp / (M * M) + 2.0 * k * k / pp;
        a[1][1] = -2.0 * k * s / pp;
    }
    bool forced() const { return xi != 0.0; }
    void forcing(double t, Vec& f) const {
        const double s = eta - k * t;
        const double pp = k * k + s * s;
        f[0] = 0.0;
        f[1] = -2.0 * k * k / pp * xi;
    }
    double hint(double t) const {
        const double s = eta - k * t;
        return std::sqrt(k * k + s * s) / M;
    }
};

// Symmetrized Z = (R/(M p^{1/4}), A/p^{3/4}).
struct Symmetrized {
    double k, eta, M;
    cplx xi;

    void matrix(double t, Mat& a) const {
        const double s = eta - k * t;
        const double pp = k * k + s * s;
        const double sq = std::sqrt(pp);
        const double aa = -2.0 * k * s / (4.0 * pp);
        a[0][0] = -aa;
        a[0][1] = -sq / M;
        a[1][0] = sq / M + 2.0 * M * k * k / (pp * sq);
        a[1][1] = aa;
    }
    bool forced() const { return xi != 0.0; }
    void forcing(double t, Vec& f) const {
        const double s = eta - k * t;
        const double pp = k * k + s * s;
        f[0] = 0.0;
        f[1] = -2.0 * k * k / std::pow(pp, 1.75) * xi;
    }
    double hint(double t) const {
        const double s = eta - k * t;
        return std::sqrt(k * k + s * s) / M;
    }
};

// (R, A, Omega); k = 0 gives the zero-mode system with p = eta^2.
struct ThreeVar {
    double k, eta, M, nu, mu;

    void matrix(double t, Mat& a) const {
        const double s = eta - k * t;
        const double pp = k * k + s * s;
        a[0][0] = 0.0;
        a[0][1] = -1.0;
        a[0][2] = 0.0;
        a[1][0] = pp / (M * M);
        a[1][1] = -2.0 * k * s / pp - mu * pp;
        a[1][2] = -2.0 * k * k / pp;
        a[2][0] = 0.0;
        a[2][1] = 1.0;
        a[2][2] = -nu * pp;
    }
    bool forced() const { return false; }
    void forcing(double, Vec&) const {}
    double hint(double t) const {
        const double s = eta - k * t;
        const double pp = k * k + s * s;
        return std::max(std::sqrt(pp) / M, mu * pp);
    }
};

// (R, A, G) with the good unknown G = R + Omega - nu M^2 A.
struct GoodVar {
    double k, eta, M, nu, mu;

    void matrix(double t, Mat& a) const {
        const double s = eta - k * t;
        const double pp = k * k + s * s;
        const double lp = -2.0 * k * s / pp;  // dt p / p
        const double q = 2.0 * k * k / pp;    // 2k^2/p
        const double m2 = M * M;
        a[0][0] = 0.0;
        a[0][1] = -1.0;
        a[0][2] = 0.0;
        a[1][0] = pp / m2 + q;
        a[1][1] = lp - mu * pp - nu * m2 * q;
        a[1][2] = -q;
        a[2][0] = -nu * m2 * q;
        a[2][1] = nu * (mu - nu) * m2 * pp - nu * m2 * lp + nu * nu * m2 * m2 * q;
        a[2][2] = -nu * pp + nu * m2 * q;
    }
    bool forced() const { return false; }
    void forcing(double, Vec&) const {}
    double hint(double t) const {
        const double s = eta - k * t;
        const double pp = k * k + s * s;
        return std::max(std::sqrt(pp) / M, mu * pp);
    }
};

}  // namespace cspec::detail
