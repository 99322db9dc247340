#include "cspec/zero_mode.hpp"

#include <cmath>
#include <stdexcept>

#include "cspec/integrator_core.hpp"
#include "cspec/parallel.hpp"
#include "mode_systems.hpp"

namespace cspec {

namespace {

detail::ThreeVar zero_sys(double eta, const FluidParams& fp) {
    if (eta == 0.0 || !std::isfinite(eta)) throw std::invalid_argument("zero_mode: eta must be finite and nonzero");
    return {0.0, eta, fp.mach, fp.shear_visc, fp.mu};
}

}  // namespace

cplx ZeroModeState::good(const FluidParams& fp) const {
    return rho0 + omega0 - fp.shear_visc * fp.mach * fp.mach * alpha0;
}

std::array<cplx, 3> rhs_zero(double t, const ZeroModeState& s, const FluidParams& fp) {
    Mat a{};
    zero_sys(s.eta, fp).matrix(t, a);
    const cplx z[3] = {s.rho0, s.alpha0, s.omega0};
    std::array<cplx, 3> out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i] += a[i][j] * z[j];
    return out;
}

cplx rhs_zero_good(const ZeroModeState& s, const FluidParams& fp) {
    const double e2 = s.eta * s.eta;
    return -fp.shear_visc * e2 * s.good(fp) + fp.bulk_visc * fp.shear_visc * fp.mach * fp.mach * e2 * s.alpha0;
}

LinearSystem zero_system(double eta, const FluidParams& fp) {
    const detail::ThreeVar s = zero_sys(eta, fp);
    LinearSystem sys;
    sys.dim = 3;
    sys.matrix_fn = [s](double t, Mat& a) { s.matrix(t, a); };
    sys.stiffness_hint = [s](double t) { return s.hint(t); };
    return sys;
}

std::vector<ZeroSample> solve_zero(const ZeroModeState& init, const FluidParams& fp, double horizon,
                                   const IntegratorOptions& opt, const std::vector<double>& sample_times) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("solve_zero: horizon must be >= 0");
    const detail::ThreeVar sys = zero_sys(init.eta, fp);
    Vec z0{};
    z0[0] = init.rho0;
    z0[1] = init.alpha0;
    z0[2] = init.omega0;
    std::vector<ZeroSample> out;
    out.reserve(sample_times.size());
    auto samp = [&](double t, const Vec& z) { out.push_back({t, {z[0], z[1], z[2], init.eta}}); };
    detail::integrate_core<3>(sys, z0, 0.0, horizon, opt, sample_times, samp, detail::AlwaysContinue{});
    return out;
}

double energy_El(const ZeroModeState& s, int ell, const FluidParams& fp) {
    if (ell < 0) throw std::invalid_argument("energy_El: ell must be >= 0");
    const double e = std::abs(s.eta);
    const double el = std::pow(e, ell);
    const double M2 = fp.mach * fp.mach;
    return el * el * std::norm(s.alpha0) + el * el * std::norm(s.v0y()) + el * el * std::norm(s.good(fp)) +
           (el * el * e * e * std::norm(s.rho0) + el * el * std::norm(s.rho0)) / M2;
}

std::vector<double> energy_El(const std::vector<ZeroSample>& history, int ell, const FluidParams& fp) {
    std::vector<double> out;
    out.reserve(history.size());
    for (const auto& h : history) out.push_back(energy_El(h.state, ell, fp));
    return out;
}

std::vector<double> ZeroField::weights() const {
    std::vector<double> w(modes.size(), d_eta);
    double emax = 0.0;
    for (const auto& m : modes) emax = std::max(emax, std::abs(m.eta));
    for (std::size_t i = 0; i < modes.size(); ++i)
        if (std::abs(std::abs(modes[i].eta) - emax) < 1e-9 * d_eta) w[i] *= 0.5;
    return w;
}

namespace {

template <class Profile>
ZeroField build(double d_eta, double eta_max, Profile&& prof) {
    if (!(d_eta > 0.0) || !(eta_max >= d_eta)) throw std::invalid_argument("zero profile: need 0 < d_eta <= eta_max");
    ZeroField z;
    z.d_eta = d_eta;
    const long n = long(std::floor(eta_max / d_eta + 1e-9));
    for (long j = -n; j <= n; ++j) {
        if (j == 0) continue;
        const double eta = j * d_eta;
        z.modes.push_back(prof(eta));
    }
    return z;
}

}  // namespace

ZeroField zero_profile_extremal(double amp, double eta_c, double d_eta, double eta_max) {
    return build(d_eta, eta_max, [&](double eta) {
        const cplx r = amp / std::sqrt(std::abs(eta)) * std::exp(-eta * eta / (eta_c * eta_c));
        return ZeroModeState{r, 0.0, -r, eta};
    });
}

ZeroField zero_profile_smooth(double amp, double eta_c, double d_eta, double eta_max) {
    return build(d_eta, eta_max, [&](double eta) {
        const cplx r = amp * std::exp(-eta * eta / (eta_c * eta_c));
        return ZeroModeState{r, 0.0, 0.0, eta};
    });
}

ZeroAggregate evolve_zero_field(const ZeroField& field, const FluidParams& fp, double horizon,
                                const IntegratorOptions& opt, const std::vector<double>& sample_times,
                                const std::vector<int>& ells, int jobs) {
    const std::size_t nm = field.modes.size(), nt = sample_times.size(), nl = ells.size();
    std::vector<std::vector<double>> per_mode(nm);
    parallel_for(nm, jobs, [&](std::size_t i) {
        const auto hist = solve_zero(field.modes[i], fp, horizon, opt, sample_times);
        std::vector<double> e(nt * nl);
        for (std::size_t ti = 0; ti < nt; ++ti)
            for (std::size_t li = 0; li < nl; ++li) e[ti * nl + li] = energy_El(hist[ti].state, ells[li], fp);
        per_mode[i] = std::move(e);
    });
    const std::vector<double> w = field.weights();
    ZeroAggregate agg;
    agg.times = sample_times;
    agg.ells = ells;
    agg.E.assign(nt * nl, 0.0);
    for (std::size_t i = 0; i < nm; ++i)
        for (std::size_t j = 0; j < nt * nl; ++j) agg.E[j] += w[i] * per_mode[i][j];
    return agg;
}

}  // namespace cspec
