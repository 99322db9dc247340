#include "cspec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cspec {

namespace {

// Vertex of the parabola through three points.
void vertex(double ta, double ya, double tb, double yb, double tc, double yc, double& tv, double& yv) {
    const double d1 = (yb - ya) / (tb - ta);
    const double d2 = (yc - yb) / (tc - tb);
    const double a = (d2 - d1) / (tc - ta);
    if (!(a < 0.0)) {
        tv = tb;
        yv = yb;
        return;
    }
    const double b = d1 - a * (ta + tb);
    tv = std::clamp(-b / (2.0 * a), ta, tc);
    yv = ya + d1 * (tv - ta) + a * (tv - ta) * (tv - tb);
}

}  // namespace

Series local_maxima(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size()) throw std::invalid_argument("local_maxima: size mismatch");
    Series out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            double tv, yv;
            vertex(t[i - 1], y[i - 1], t[i], y[i], t[i + 1], y[i + 1], tv, yv);
            out.t.push_back(tv);
            out.y.push_back(std::max(yv, y[i]));
        }
    }
    return out;
}

void PeakTracker::push(double t, double y) {
    if (y > max_y_) {
        max_y_ = y;
        max_t_ = t;
    }
    if (seen_ >= 2 && y1_ > y0_ && y1_ >= y) {
        double tv, yv;
        vertex(t0_, y0_, t1_, y1_, t, y, tv, yv);
        peaks_.t.push_back(tv);
        peaks_.y.push_back(std::max(yv, y1_));
    }
    t0_ = t1_;
    y0_ = y1_;
    t1_ = t;
    y1_ = y;
    ++seen_;
}

Series window(const Series& s, double t_lo, double t_hi) {
    Series out;
    for (std::size_t i = 0; i < s.t.size(); ++i)
        if (s.t[i] >= t_lo && s.t[i] <= t_hi) {
            out.t.push_back(s.t[i]);
            out.y.push_back(s.y[i]);
        }
    return out;
}

namespace {

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw std::invalid_argument("fit: abscissae are degenerate");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double r = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        r += e * e;
    }
    f.residual = std::sqrt(r / n);
    f.n = n;
    return f;
}

void collect(const Series& s, double t_lo, double t_hi, bool log_t, std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        const double t = s.t[i], v = s.y[i];
        if (t < t_lo || t > t_hi || !(v > 0.0) || !std::isfinite(v)) continue;
        if (log_t && !(t > 0.0)) continue;
        x.push_back(log_t ? std::log(t) : t);
        y.push_back(std::log(v));
    }
}

void need(std::size_t have, std::size_t min_samples) {
    if (have < min_samples)
        throw std::invalid_argument("fit: window holds " + std::to_string(have) + " usable samples, need " +
                                    std::to_string(min_samples));
}

}  // namespace

LineFit fit_loglog(const Series& s, double t_lo, double t_hi, std::size_t min_samples) {
    std::vector<double> x, y;
    collect(s, t_lo, t_hi, true, x, y);
    need(x.size(), std::max<std::size_t>(min_samples, 2));
    return least_squares(x, y);
}

LineFit fit_loglinear(const Series& s, double t_lo, double t_hi, std::size_t min_samples) {
    std::vector<double> x, y;
    collect(s, t_lo, t_hi, false, x, y);
    need(x.size(), std::max<std::size_t>(min_samples, 2));
    return least_squares(x, y);
}

AlgebraicFit fit_one_plus_ct(const Series& s, double t_lo, double t_hi, double c_lo, double c_hi,
                             std::size_t min_samples) {
    if (!(c_lo > 0.0 && c_hi > c_lo)) throw std::invalid_argument("fit_one_plus_ct: need 0 < c_lo < c_hi");
    std::vector<double> t, ly;
    collect(s, t_lo, t_hi, false, t, ly);
    need(t.size(), std::max<std::size_t>(min_samples, 3));
    auto inner = [&](double c) {
        std::vector<double> x(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) x[i] = std::log1p(c * t[i]);
        return least_squares(x, ly);
    };
    double a = std::log(c_lo), b = std::log(c_hi);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = inner(std::exp(x1)).residual, f2 = inner(std::exp(x2)).residual;
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = inner(std::exp(x1)).residual;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = inner(std::exp(x2)).residual;
        }
    }
    const double c = std::exp(0.5 * (a + b));
    const LineFit lf = inner(c);
    return {lf.slope, c, lf.intercept, lf.residual, lf.n};
}

RateReport make_power_report(const std::string& name, const Series& s, double t_lo, double t_hi, double expected,
                             double tol) {
    RateReport r;
    r.quantity = name;
    r.kind = FitKind::POWER;
    r.data = s;
    r.t_lo = t_lo;
    r.t_hi = t_hi;
    r.expected = expected;
    r.tolerance = tol;
    const LineFit f = fit_loglog(s, t_lo, t_hi);
    r.fitted = f.slope;
    r.residual = f.residual;
    r.n_fit = f.n;
    r.pass = std::abs(f.slope - expected) <= tol;
    return r;
}

RateReport make_rate_report(const std::string& name, const Series& s, double t_lo, double t_hi, double min_rate) {
    RateReport r;
    r.quantity = name;
    r.kind = FitKind::EXPONENTIAL;
    r.data = s;
    r.t_lo = t_lo;
    r.t_hi = t_hi;
    r.expected = min_rate;
    r.lower_only = true;
    const LineFit f = fit_loglinear(s, t_lo, t_hi);
    r.fitted = -f.slope;
    r.residual = f.residual;
    r.n_fit = f.n;
    r.pass = r.fitted >= min_rate;
    return r;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 0) return v;
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
    v.back() = b;
    return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("logspace: endpoints must be > 0");
    std::vector<double> v = linspace(std::log(a), std::log(b), n);
    for (auto& x : v) x = std::exp(x);
    if (n > 0) {
        v.front() = a;
        v.back() = b;
    }
    return v;
}

}  // namespace cspec
