#include "cspec/inviscid_mode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "cspec/integrator_core.hpp"
#include "cspec/quadrature.hpp"
#include "mode_systems.hpp"

namespace cspec {

namespace {

void require_mach(double M) {
    if (!(M > 0.0) || !std::isfinite(M)) throw std::invalid_argument("inviscid_mode: mach must be > 0");
}

}  // namespace

double SymState::norm() const { return std::sqrt(std::norm(Z1) + std::norm(Z2)); }

SymState to_sym(cplx R, cplx A, double t, const Frequency& f, double M) {
    const double pp = p(t, f);
    return {R / (M * std::pow(pp, 0.25)), A / std::pow(pp, 0.75)};
}

void from_sym(const SymState& z, double t, const Frequency& f, double M, cplx& R, cplx& A) {
    const double pp = p(t, f);
    R = z.Z1 * (M * std::pow(pp, 0.25));
    A = z.Z2 * std::pow(pp, 0.75);
}

SymmetrizerCoeffs symmetrizer(double t, const Frequency& f, double M) {
    require_mach(M);
    const double pp = p(t, f);
    const double sq = std::sqrt(pp);
    SymmetrizerCoeffs c;
    c.a = dt_p(t, f) / (4.0 * pp);
    c.b = sq / M;
    c.d = sq / M + 2.0 * M * f.k * f.k / (pp * sq);
    c.zeta = std::sqrt(c.d / c.b);
    c.beta_s = std::sqrt(c.b * c.d);
    return c;
}

std::array<cplx, 2> rhs_inviscid(double t, cplx R, cplx A, const Frequency& f, double M, cplx Xi_in) {
    require_mach(M);
    const double pp = p(t, f);
    const double q = 2.0 * f.k * f.k / pp;
    return {-A, (dt_p(t, f) / pp) * A + (pp / (M * M) + q) * R - q * Xi_in};
}

Mat matrix_L(double t, const Frequency& f, double M) {
    require_mach(M);
    Mat a{};
    detail::Symmetrized{double(f.k), f.eta, M, 0.0}.matrix(t, a);
    return a;
}

std::array<double, 2> vector_F(double t, const Frequency& f) {
    return {0.0, -2.0 * f.k * f.k / std::pow(p(t, f), 1.75)};
}

namespace {

template <class S>
LinearSystem wrap(const S& s, int dim) {
    LinearSystem sys;
    sys.dim = dim;
    sys.matrix_fn = [s](double t, Mat& a) { s.matrix(t, a); };
    if (s.forced()) sys.forcing_fn = [s](double t, Vec& v) { s.forcing(t, v); };
    sys.stiffness_hint = [s](double t) { return s.hint(t); };
    return sys;
}

}  // namespace

LinearSystem inviscid_ra_system(const Frequency& f, double M, cplx Xi_in) {
    require_mach(M);
    return wrap(detail::InviscidRA{double(f.k), f.eta, M, Xi_in}, 2);
}

LinearSystem symmetrized_system(const Frequency& f, double M, cplx Xi_in) {
    require_mach(M);
    return wrap(detail::Symmetrized{double(f.k), f.eta, M, Xi_in}, 2);
}

ModeSample make_sample(double t, cplx R, cplx A, cplx Xi_in, const Frequency& f, double M) {
    ModeSample s;
    s.t = t;
    s.R = R;
    s.A = A;
    s.Omega = Xi_in - R;
    s.Z = to_sym(R, A, t, f, M);
    return s;
}

StreamResult solve_mode_stream(const InviscidInit& init, const Frequency& f, double M, double horizon,
                               const IntegratorOptions& opt, const std::vector<double>& sample_times,
                               const ModeSampleFn& on_sample, const ModeStepFn& on_step) {
    require_mach(M);
    if (!(horizon >= 0.0)) throw std::invalid_argument("solve_mode: horizon must be >= 0");
    const cplx xi = init.Xi_in();
    const detail::InviscidRA sys{double(f.k), f.eta, M, xi};
    Vec z0{};
    z0[0] = init.R_in;
    z0[1] = init.A_in;
    auto samp = [&](double t, const Vec& z) {
        if (on_sample) on_sample(make_sample(t, z[0], z[1], xi, f, M));
    };
    auto step = [&](double t, const detail::State<2>& z) { return on_step ? on_step(t, z[0], z[1]) : true; };
    return detail::integrate_core<2>(sys, z0, 0.0, horizon, opt, sample_times, samp, step);
}

ModeTrajectory solve_mode(const InviscidInit& init, const Frequency& f, double M, double horizon, double tol,
                          const std::vector<double>& sample_times) {
    if (!(horizon > 0.0)) throw std::invalid_argument("solve_mode: horizon must be > 0");
    IntegratorOptions opt;
    opt.rtol = tol;
    opt.atol = tol * 1e-4;
    ModeTrajectory out;
    out.samples.reserve(sample_times.size());
    auto res = solve_mode_stream(init, f, M, horizon, opt, sample_times,
                                 [&](const ModeSample& s) { out.samples.push_back(s); });
    out.stats = res.stats;
    return out;
}

namespace {

// Bound on int_T^inf |F(s)| ds with |F| = 2|k|^{-3/2} (1+u^2)^{-7/4}, u = s - eta/k.
double F_tail(double T, const Frequency& f) {
    const double u = T - f.critical_time();
    const double kk = std::abs(double(f.k));
    double integral;
    if (u >= 1.0) {
        integral = 0.4 * std::pow(u, -2.5);
    } else {
        // int_u^1 (1+v^2)^{-7/4} dv <= 1 - u for u >= 0; the full line integral is below 1.75.
        integral = u >= 0.0 ? (1.0 - u) + 0.4 : 1.75;
    }
    return 2.0 * std::pow(kk, -1.5) * integral;
}

// Panel boundaries on [0, T] sized to `theta` radians of local phase, hitting every anchor exactly.
std::vector<double> panel_layout(const Frequency& f, double M, const std::vector<double>& anchors, double theta) {
    std::vector<double> b{0.0};
    const double kk = std::abs(double(f.k));
    std::size_t ai = 0;
    double s = 0.0;
    const double T = anchors.empty() ? 0.0 : anchors.back();
    while (ai < anchors.size() && anchors[ai] <= 0.0) ++ai;
    while (s < T) {
        const double pp = p(s, f);
        const double sq = std::sqrt(pp);
        const double omega = sq / M + 2.0 * M * f.k * f.k / (pp * sq);
        const double smooth = 0.5 * bracket(f.critical_time() - s) / kk;
        double next = s + theta * std::min(1.0 / omega, smooth);
        if (next >= anchors[ai]) {
            next = anchors[ai];
            while (ai < anchors.size() && anchors[ai] <= next) ++ai;
        }
        b.push_back(next);
        s = next;
    }
    return b;
}

struct GTable {
    std::vector<double> t;                      // panel boundaries
    std::vector<std::array<double, 2>> G;       // G at the boundaries
    double phi_inv_max = 1.0;                   // observed sup of ||Phi(0,s)||_F
};

GTable g_table(const Frequency& f, double M, const std::vector<double>& bounds, double ode_rtol) {
    constexpr int q = 8;
    static const GaussRule rule = gauss_legendre(q);
    GTable out;
    out.t = bounds;
    out.G.assign(bounds.size(), {0.0, 0.0});
    const std::size_t panels = bounds.size() - 1;
    if (panels == 0) return out;

    std::vector<double> nodes;
    nodes.reserve(panels * q);
    for (std::size_t j = 0; j < panels; ++j) {
        const double lo = bounds[j], h = bounds[j + 1] - bounds[j];
        for (int i = 0; i < q; ++i) nodes.push_back(lo + 0.5 * h * (rule.nodes[i] + 1.0));
    }

    // Phi(s,0) columns travel together as e_1 + i e_2.
    const detail::Symmetrized sys{double(f.k), f.eta, M, 0.0};
    Vec z0{};
    z0[0] = 1.0;
    z0[1] = cplx(0.0, 1.0);
    IntegratorOptions opt;
    opt.rtol = ode_rtol;
    opt.atol = ode_rtol * 1e-4;

    std::size_t idx = 0;
    std::array<double, 2> panel_sum{0.0, 0.0};
    double phi_max = 1.0;
    auto samp = [&](double s, const Vec& z) {
        const std::size_t j = idx / q;
        const int i = int(idx % q);
        const double p00 = z[0].real(), p01 = z[0].imag(), p10 = z[1].real(), p11 = z[1].imag();
        const double det = p00 * p11 - p01 * p10;
        // Phi(0,s) F(s) with F = (0, F2): the second column of the adjugate over det.
        const double F2 = -2.0 * f.k * f.k / std::pow(p(s, f), 1.75);
        const double w = 0.5 * (bounds[j + 1] - bounds[j]) * rule.weights[i];
        panel_sum[0] += w * (-p01 / det) * F2;
        panel_sum[1] += w * (p00 / det) * F2;
        phi_max = std::max(phi_max, std::sqrt(p00 * p00 + p01 * p01 + p10 * p10 + p11 * p11) / std::abs(det));
        if (i == q - 1) {
            out.G[j + 1] = {out.G[j][0] + panel_sum[0], out.G[j][1] + panel_sum[1]};
            panel_sum = {0.0, 0.0};
        }
        ++idx;
    };
    detail::integrate_core<2>(sys, z0, 0.0, bounds.back(), opt, nodes, samp, detail::AlwaysContinue{});
    out.phi_inv_max = phi_max;
    return out;
}

// Values of the table at the anchors (all of which are boundaries).
std::vector<std::array<double, 2>> at_anchors(const GTable& g, const std::vector<double>& anchors) {
    std::vector<std::array<double, 2>> out;
    out.reserve(anchors.size());
    std::size_t j = 0;
    for (double a : anchors) {
        while (j < g.t.size() && g.t[j] < a) ++j;
        out.push_back(j < g.t.size() ? g.G[j] : g.G.back());
    }
    return out;
}

struct RefinedG {
    GTable table;
    int refinements = 0;
    double last_change = 0.0;
};

RefinedG refined_table(const Frequency& f, double M, const std::vector<double>& anchors, const GammaOptions& opt) {
    RefinedG r;
    double theta = opt.panel_phase;
    r.table = g_table(f, M, panel_layout(f, M, anchors, theta), opt.ode_rtol);
    auto prev = at_anchors(r.table, anchors);
    for (int lvl = 1; lvl <= opt.max_refinements; ++lvl) {
        theta *= 0.5;
        GTable next = g_table(f, M, panel_layout(f, M, anchors, theta), opt.ode_rtol);
        auto cur = at_anchors(next, anchors);
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            diff = std::max(diff, std::hypot(cur[i][0] - prev[i][0], cur[i][1] - prev[i][1]));
            scale = std::max(scale, std::hypot(cur[i][0], cur[i][1]));
        }
        r.table = std::move(next);
        r.refinements = lvl;
        r.last_change = scale > 0.0 ? diff / scale : diff;
        prev = std::move(cur);
        if (r.last_change < opt.tol) break;
    }
    return r;
}

std::array<cplx, 2> combine(const SymState& zin, const std::array<double, 2>& G, cplx xi) {
    return {zin.Z1 + G[0] * xi, zin.Z2 + G[1] * xi};
}

double cnorm2(const std::array<cplx, 2>& v) { return std::sqrt(std::norm(v[0]) + std::norm(v[1])); }

// Time past which the F tail, weighted by a guess of sup||Phi(0,s)||, is below `target`.
double tail_time(const Frequency& f, double M, double target, double t_min, double cap) {
    const double phi_guess = 2.0 * std::sqrt(1.0 + 2.0 * M * M);
    double T = std::max(t_min, f.critical_time() + 1.0);
    while (T < cap && phi_guess * F_tail(T, f) > target) T = f.critical_time() + 2.0 * (T - f.critical_time());
    return std::min(T, cap);
}

}  // namespace

GammaResult gamma_fn(const std::vector<double>& times, const InviscidInit& init, const Frequency& f, double M,
                     const GammaOptions& opt) {
    require_mach(M);
    for (double t : times)
        if (!(t >= 0.0)) throw std::invalid_argument("gamma_fn: times must be >= 0");
    const SymState zin = to_sym(init.R_in, init.A_in, 0.0, f, M);
    const cplx xi = init.Xi_in();

    GammaResult res;
    res.times = times;
    if (xi == 0.0) {
        res.gamma.assign(times.size(), {zin.Z1, zin.Z2});
        res.gamma_inf = {zin.Z1, zin.Z2};
        res.t_tail = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
        return res;
    }

    const double scale = std::max(std::hypot(std::abs(zin.Z1), std::abs(zin.Z2)),
                                  std::abs(xi) * std::pow(std::abs(double(f.k)), -1.5));
    const double t_max = times.empty() ? 0.0 : *std::max_element(times.begin(), times.end());
    res.t_tail = tail_time(f, M, opt.tol * scale / std::abs(xi), t_max, std::max(opt.tail_cap, t_max));

    std::vector<double> anchors = times;
    anchors.push_back(res.t_tail);
    std::sort(anchors.begin(), anchors.end());
    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());

    RefinedG rg = refined_table(f, M, anchors, opt);
    res.refinements = rg.refinements;
    res.last_change = rg.last_change;
    const auto vals = at_anchors(rg.table, anchors);
    auto lookup = [&](double t) {
        const auto it = std::lower_bound(anchors.begin(), anchors.end(), t);
        return vals[std::size_t(it - anchors.begin())];
    };
    res.gamma.reserve(times.size());
    for (double t : times) res.gamma.push_back(combine(zin, lookup(t), xi));
    res.gamma_inf = combine(zin, lookup(res.t_tail), xi);
    res.tail_bound = std::abs(xi) * rg.table.phi_inv_max * F_tail(res.t_tail, f);
    return res;
}

std::array<cplx, 2> gamma_at(double t, const InviscidInit& init, const Frequency& f, double M,
                             const GammaOptions& opt) {
    GammaOptions o = opt;
    o.tail_cap = t;  // no tail extension needed
    return gamma_fn({t}, init, f, M, o).gamma.front();
}

double energy_lemma31(const SymState& z, double t, const Frequency& f, double M) {
    const SymmetrizerCoeffs c = symmetrizer(t, f, M);
    return c.zeta * std::norm(z.Z1) + std::norm(z.Z2) / c.zeta +
           2.0 * (c.a / c.beta_s) * std::real(z.Z1 * std::conj(z.Z2));
}

double energy_lemma31_diag(const SymState& z, double t, const Frequency& f, double M) {
    const SymmetrizerCoeffs c = symmetrizer(t, f, M);
    return c.zeta * std::norm(z.Z1) + std::norm(z.Z2) / c.zeta;
}

double phase_rhs(double theta, double t, const Frequency& f, double M) {
    require_mach(M);
    const double pp = p(t, f);
    const double c = std::cos(theta);
    return std::sqrt(pp) / M + 2.0 * M * f.k * f.k / std::pow(pp, 1.5) * c * c +
           0.25 * dt_p(t, f) / pp * std::sin(2.0 * theta);
}

double wkb_envelope(double t, const Frequency& f) { return std::pow(p(t, f), 0.25); }

PerturbResult perturb_generic(const InviscidInit& init, const Frequency& f, double M, double eps, double horizon,
                              const PerturbOptions& opt) {
    require_mach(M);
    if (!(eps > 0.0)) throw std::invalid_argument("perturb_generic: eps must be > 0");
    if (!(horizon > 0.0)) throw std::invalid_argument("perturb_generic: horizon must be > 0");
    if (opt.directions < 1) throw std::invalid_argument("perturb_generic: need at least one direction");

    const double K = double(f.k) * f.k + f.eta * f.eta;
    const double decay = std::exp(-K);
    const double delta = eps * decay;
    if (delta == 0.0) throw PerturbError("perturb_generic: eps e^{-(k^2+eta^2)} underflows double precision");

    const SymState zin = to_sym(init.R_in, init.A_in, 0.0, f, M);
    const cplx xi = init.Xi_in();

    // Gamma on every panel boundary up to the horizon.
    GammaOptions gopt;
    gopt.tol = opt.gamma_tol;
    std::vector<std::array<cplx, 2>> gam;
    double tail = 0.0;
    if (xi == 0.0) {
        gam.assign(2, {zin.Z1, zin.Z2});
    } else {
        RefinedG rg = refined_table(f, M, {horizon}, gopt);
        gam.reserve(rg.table.t.size());
        for (const auto& G : rg.table.G) gam.push_back(combine(zin, G, xi));
        tail = std::abs(xi) * rg.table.phi_inv_max * F_tail(horizon, f);
    }
    if (tail > 0.25 * eps)
        throw PerturbError("perturb_generic: horizon too short, Gamma tail bound exceeds eps/4");

    PerturbResult out;
    out.delta = delta;
    out.samples = gam.size();
    out.data = init;

    // Gamma_inf = 0 (to within the tail bound): shift alpha alone first.
    const std::array<cplx, 2> g_inf = gam.back();
    if (cnorm2(g_inf) <= std::max(tail, 1e-300)) {
        out.gamma_inf_was_zero = true;
        out.dA += eps * std::pow(K, 0.75) * decay;
        for (auto& g : gam) g[1] += delta;
    }

    auto inf_with = [&](double n1, double n2) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& g : gam) m = std::min(m, std::sqrt(std::norm(g[0] + delta * n1) + std::norm(g[1] + delta * n2)));
        return m;
    };
    auto inf_plain = [&] {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& g : gam) m = std::min(m, cnorm2(g));
        return m;
    };

    if (out.gamma_inf_was_zero && inf_plain() >= 0.5 * delta) {
        out.inf_gamma = inf_plain();
    } else {
        double best = -1.0;
        for (int j = 0; j < opt.directions; ++j) {
            const double ang = 2.0 * std::numbers::pi * j / opt.directions;
            const double v = inf_with(std::cos(ang), std::sin(ang));
            if (v > best) {
                best = v;
                out.direction = {std::cos(ang), std::sin(ang)};
            }
        }
        out.inf_gamma = best;
        const double rshift = eps * M * std::pow(K, 0.25) * decay * out.direction[0];
        out.dR += rshift;
        out.dOmega -= rshift;
        out.dA += eps * std::pow(K, 0.75) * decay * out.direction[1];
    }
    if (!(out.inf_gamma >= 0.5 * delta))
        throw PerturbError("perturb_generic: no direction keeps |Gamma_eps| above eps e^{-(k^2+eta^2)}/2");

    out.data.R_in += out.dR;
    out.data.A_in += out.dA;
    out.data.Omega_in += out.dOmega;
    const double wA = std::pow(bracket(double(f.k)) * bracket(f.eta), -1.5);
    out.norm_displacement = std::abs(out.dR) + std::abs(out.dOmega) + wA * std::abs(out.dA);
    return out;
}

}  // namespace cspec
