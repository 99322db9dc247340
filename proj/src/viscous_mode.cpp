#include "cspec/viscous_mode.hpp"

#include <cmath>
#include <stdexcept>

#include "cspec/integrator_core.hpp"
#include "mode_systems.hpp"

namespace cspec {

namespace {

detail::ThreeVar three_var(const Frequency& f, const FluidParams& fp) {
    return {double(f.k), f.eta, fp.mach, fp.shear_visc, fp.mu};
}

detail::GoodVar good_var(const Frequency& f, const FluidParams& fp) {
    return {double(f.k), f.eta, fp.mach, fp.shear_visc, fp.mu};
}

template <class S>
LinearSystem wrap3(const S& s) {
    LinearSystem sys;
    sys.dim = 3;
    sys.matrix_fn = [s](double t, Mat& a) { s.matrix(t, a); };
    sys.stiffness_hint = [s](double t) { return s.hint(t); };
    return sys;
}

template <class S>
std::array<cplx, 3> apply(const S& s, double t, cplx a0, cplx a1, cplx a2) {
    Mat a{};
    s.matrix(t, a);
    const cplx z[3] = {a0, a1, a2};
    std::array<cplx, 3> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i] += a[i][j] * z[j];
    return out;
}

}  // namespace

GoodState to_good(const ViscousState& v, const FluidParams& fp) {
    const double c = fp.shear_visc * fp.mach * fp.mach;
    return {v.R_hat, v.A_hat, v.R_hat + v.Omega_hat - c * v.A_hat};
}

ViscousState from_good(const GoodState& g, const FluidParams& fp) {
    const double c = fp.shear_visc * fp.mach * fp.mach;
    return {g.R_hat, g.A_hat, g.G_hat + c * g.A_hat - g.R_hat};
}

const char* scheme_label(WeightScheme s) {
    switch (s) {
        case WeightScheme::P_WEIGHT: return "P_WEIGHT";
        case WeightScheme::W_WEIGHT: return "W_WEIGHT";
        case WeightScheme::TILDE_LAMBDA0: return "TILDE_LAMBDA0";
    }
    return "?";
}

WeightedTriple weighted_triple(const GoodState& g, double t, const Frequency& f, const FluidParams& fp,
                               WeightScheme scheme, const WeightOptions& opt) {
    const double M = fp.mach;
    const double nu = fp.shear_visc;
    const double pp = p(t, f);
    const double pre = std::pow(bracket(double(f.k), f.eta), opt.s) / mult_m(t, f, nu);
    WeightedTriple z;
    z.scheme = scheme;
    switch (scheme) {
        case WeightScheme::P_WEIGHT:
        case WeightScheme::TILDE_LAMBDA0: {
            if (scheme == WeightScheme::TILDE_LAMBDA0 && fp.bulk_visc != 0.0)
                throw std::invalid_argument("weighted_triple: TILDE_LAMBDA0 needs lambda = 0");
            const double p34 = std::pow(pp, -0.75);
            z.Z1 = pre * std::pow(pp, -0.25) * g.R_hat / M;
            z.Z2 = pre * p34 * g.A_hat;
            z.Z3 = scheme == WeightScheme::P_WEIGHT ? pre * p34 * g.G_hat : pre * g.G_hat;
            break;
        }
        case WeightScheme::W_WEIGHT: {
            if (!(nu > 0.0)) throw std::invalid_argument("weighted_triple: W_WEIGHT needs nu > 0");
            const double ww = std::pow(mult_w(t, f, nu, opt.wp), -opt.w_exponent);
            z.Z1 = pre * ww * std::sqrt(pp) * g.R_hat / M;
            z.Z2 = pre * ww * g.A_hat;
            z.Z3 = pre * ww * g.G_hat;
            break;
        }
    }
    return z;
}

std::array<cplx, 3> rhs_viscous(double t, const ViscousState& v, const Frequency& f, const FluidParams& fp) {
    return apply(three_var(f, fp), t, v.R_hat, v.A_hat, v.Omega_hat);
}

std::array<cplx, 3> rhs_good(double t, const GoodState& g, const Frequency& f, const FluidParams& fp) {
    return apply(good_var(f, fp), t, g.R_hat, g.A_hat, g.G_hat);
}

LinearSystem viscous_system(const Frequency& f, const FluidParams& fp) { return wrap3(three_var(f, fp)); }
LinearSystem good_system(const Frequency& f, const FluidParams& fp) { return wrap3(good_var(f, fp)); }

double default_gamma(const FluidParams& fp, double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("default_gamma: delta must be in (0, 1]");
    return delta * fp.mach * std::cbrt(fp.shear_visc) / 4.0;
}

namespace {

double energy_core(const WeightedTriple& z, double t, const Frequency& f, double M, double cross) {
    const double pp = p(t, f);
    const double dp = dt_p(t, f);
    const double re12 = std::real(std::conj(z.Z1) * z.Z2);
    return 0.5 * ((1.0 + M * M * dp * dp / (pp * pp * pp)) * std::norm(z.Z1) + std::norm(z.Z2) + std::norm(z.Z3) +
                  (0.5 * M * dp / std::pow(pp, 1.5)) * re12 - cross / std::sqrt(pp) * re12);
}

}  // namespace

double energy_E(const WeightedTriple& z, double t, const Frequency& f, const FluidParams& fp, double gamma) {
    if (z.scheme == WeightScheme::W_WEIGHT) throw std::invalid_argument("energy_E: expects a P_WEIGHT triple");
    if (!(gamma > 0.0 && gamma <= 0.25)) throw std::invalid_argument("energy_E: gamma must be in (0, 1/4]");
    return energy_core(z, t, f, fp.mach, 2.0 * gamma);
}

double energy_Ew(const WeightedTriple& z, double t, const Frequency& f, const FluidParams& fp) {
    if (z.scheme != WeightScheme::W_WEIGHT) throw std::invalid_argument("energy_Ew: expects a W_WEIGHT triple");
    if (!(fp.shear_visc > 0.0)) throw std::invalid_argument("energy_Ew: nu must be > 0");
    return energy_core(z, t, f, fp.mach, 0.5 * fp.mach * std::cbrt(fp.shear_visc));
}

double energy_diag(const WeightedTriple& z, double t, const Frequency& f, const FluidParams& fp) {
    const double pp = p(t, f);
    const double dp = dt_p(t, f);
    const double M = fp.mach;
    return (1.0 + M * M * dp * dp / (pp * pp * pp)) * std::norm(z.Z1) + std::norm(z.Z2) + std::norm(z.Z3);
}

StreamResult solve_viscous_stream(const ViscousState& init, const Frequency& f, const FluidParams& fp,
                                  double horizon, const IntegratorOptions& opt,
                                  const std::vector<double>& sample_times, const ViscousSampleFn& on_sample,
                                  const ViscousStepFn& on_step) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("solve_viscous: horizon must be >= 0");
    Vec z0{};
    z0[0] = init.R_hat;
    z0[1] = init.A_hat;
    z0[2] = init.Omega_hat;
    auto samp = [&](double t, const Vec& z) {
        if (on_sample) on_sample({t, {z[0], z[1], z[2]}});
    };
    auto step = [&](double t, const detail::State<3>& z) {
        return on_step ? on_step(t, ViscousState{z[0], z[1], z[2]}) : true;
    };
    return detail::integrate_core<3>(three_var(f, fp), z0, 0.0, horizon, opt, sample_times, samp, step);
}

std::vector<ViscousSample> solve_viscous(const ViscousState& init, const Frequency& f, const FluidParams& fp,
                                         double horizon, const IntegratorOptions& opt,
                                         const std::vector<double>& sample_times) {
    std::vector<ViscousSample> out;
    out.reserve(sample_times.size());
    solve_viscous_stream(init, f, fp, horizon, opt, sample_times,
                         [&](const ViscousSample& s) { out.push_back(s); });
    return out;
}

std::vector<ViscousSample> solve_good(const ViscousState& init, const Frequency& f, const FluidParams& fp,
                                      double horizon, const IntegratorOptions& opt,
                                      const std::vector<double>& sample_times) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("solve_good: horizon must be >= 0");
    const GoodState g0 = to_good(init, fp);
    Vec z0{};
    z0[0] = g0.R_hat;
    z0[1] = g0.A_hat;
    z0[2] = g0.G_hat;
    std::vector<ViscousSample> out;
    out.reserve(sample_times.size());
    auto samp = [&](double t, const Vec& z) { out.push_back({t, from_good({z[0], z[1], z[2]}, fp)}); };
    detail::integrate_core<3>(good_var(f, fp), z0, 0.0, horizon, opt, sample_times, samp,
                              detail::AlwaysContinue{});
    return out;
}

cplx duhamel_xi(const CompositeRule& rule, const std::vector<cplx>& R_nodes, const Frequency& f, double nu,
                cplx Xi_in, double t) {
    if (R_nodes.size() != rule.nodes.size()) throw std::invalid_argument("duhamel_xi: R_nodes must match the rule");
    const double Lt = L_nu(t, f, nu);
    cplx acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double s = rule.nodes[i];
        acc += rule.weights[i] * std::exp(L_nu(s, f, nu) - Lt) * p(s, f) * R_nodes[i];
    }
    return std::exp(-Lt) * Xi_in + nu * acc;
}

DuhamelCheck duhamel_xi_check(const ViscousState& init, const Frequency& f, const FluidParams& fp, double t,
                              double tol, const IntegratorOptions& opt, int max_panels) {
    if (!(t > 0.0)) throw std::invalid_argument("duhamel_xi_check: t must be > 0");
    constexpr int q = 8;
    // Start at about one panel per radian of the fastest oscillation.
    const double omega = std::sqrt(std::max(p(0.0, f), p(t, f))) / fp.mach;
    int panels = std::max(4, int(std::ceil(omega * t / 8.0)));
    DuhamelCheck out;
    bool have_prev = false;
    cplx prev{};
    while (panels <= max_panels) {
        const CompositeRule rule = composite_gauss(0.0, t, panels, q);
        std::vector<double> times = rule.nodes;
        times.push_back(t);
        std::vector<cplx> R;
        R.reserve(times.size());
        ViscousState end{};
        solve_viscous_stream(init, f, fp, t, opt, times, [&](const ViscousSample& s) {
            if (R.size() < rule.nodes.size())
                R.push_back(s.v.R_hat);
            else
                end = s.v;
        });
        const cplx xi = duhamel_xi(rule, R, f, fp.shear_visc, init.Xi(), t);
        out.xi_duhamel = xi;
        out.xi_evolved = end.Xi();
        out.panels = panels;
        const double scale = std::max(std::abs(xi), 1e-300);
        if (have_prev) {
            out.last_change = std::abs(xi - prev) / scale;
            if (out.last_change < tol) {
                out.rel_err = std::abs(out.xi_duhamel - out.xi_evolved) / std::max(std::abs(out.xi_evolved), 1e-300);
                return out;
            }
        }
        prev = xi;
        have_prev = true;
        panels *= 2;
    }
    throw DuhamelError("duhamel_xi: quadrature did not converge within the panel budget");
}

}  // namespace cspec
