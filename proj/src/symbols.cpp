#include "cspec/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cspec {

Frequency::Frequency(int k_, double eta_) : k(k_), eta(eta_) {
    if (k == 0) throw std::invalid_argument("Frequency: k must be nonzero (k = 0 belongs to zero_mode)");
    if (!std::isfinite(eta)) throw std::invalid_argument("Frequency: eta must be finite");
}

FluidParams::FluidParams(double mach_, double nu, double lambda)
    : mach(mach_), shear_visc(nu), bulk_visc(lambda), mu(nu + lambda) {
    if (!(mach > 0.0) || !std::isfinite(mach)) throw std::invalid_argument("FluidParams: mach must be > 0");
    if (!(nu >= 0.0)) throw std::invalid_argument("FluidParams: shear viscosity must be >= 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("FluidParams: bulk viscosity must be >= 0");
}

bool FluidParams::in_theorem_regime() const {
    if (mu > 0.5) return false;
    return mach * std::max(std::sqrt(mu), std::cbrt(shear_visc)) <= 1.0;
}

std::string FluidParams::regime_label() const {
    return in_theorem_regime() ? "theorem-regime" : "outside-theorem-regime";
}

WeightParams::WeightParams(double beta_, double delta_beta_) : beta(beta_), delta_beta(delta_beta_) {
    if (!admissible(beta, delta_beta))
        throw std::invalid_argument("WeightParams: need beta > 2 and max{2/(beta(beta^2-1)), 4/beta} < delta_beta <= 1");
}

bool WeightParams::admissible(double beta, double delta_beta) {
    if (!(beta > 2.0)) return false;
    const double lower = std::max(2.0 / (beta * (beta * beta - 1.0)), 4.0 / beta);
    return lower < delta_beta && delta_beta <= 1.0;
}

double bracket(double a) { return std::sqrt(1.0 + a * a); }
double bracket(double k, double eta) { return std::sqrt(1.0 + k * k + eta * eta); }

double p(double t, const Frequency& f) {
    const double s = f.eta - f.k * t;
    return double(f.k) * f.k + s * s;
}

double dt_p(double t, const Frequency& f) { return -2.0 * f.k * (f.eta - f.k * t); }

double mult_m(double t, const Frequency& f, double nu) {
    return std::exp(2.0 * std::atan(std::cbrt(nu) * (t - f.critical_time())));
}

double mult_m_logdt(double t, const Frequency& f, double nu) {
    const double c = std::cbrt(nu);
    const double s = f.critical_time() - t;
    return 2.0 * c / (c * c * s * s + 1.0);
}

namespace {

enum class WBranch { BEFORE, WINDOW, AFTER };

struct WPiece {
    WBranch branch;
    double window_len;
};

WPiece w_piece(double t, const Frequency& f, double nu, const WeightParams& wp) {
    const double tc = f.critical_time();
    const double len = wp.beta / std::cbrt(nu);
    const bool same_sign = f.eta * f.k >= 0.0;
    if (same_sign && t >= 0.0 && t <= tc) return {WBranch::BEFORE, len};
    if (!same_sign && std::abs(tc) >= len && t >= 0.0) return {WBranch::BEFORE, len};
    if (t >= tc && t <= tc + len) return {WBranch::WINDOW, len};
    if (t < tc) return {WBranch::BEFORE, len};
    return {WBranch::AFTER, len};
}

void require_admissible(const WeightParams& wp) {
    if (!WeightParams::admissible(wp.beta, wp.delta_beta))
        throw std::invalid_argument("mult_w: inadmissible WeightParams");
}

}  // namespace

double mult_w(double t, const Frequency& f, double nu, const WeightParams& wp) {
    require_admissible(wp);
    const WPiece piece = w_piece(t, f, nu, wp);
    switch (piece.branch) {
        case WBranch::BEFORE: return 1.0;
        case WBranch::WINDOW: return p(t, f) / (double(f.k) * f.k);
        case WBranch::AFTER: break;
    }
    return 1.0 + piece.window_len * piece.window_len;
}

double mult_w_logdt(double t, const Frequency& f, double nu, const WeightParams& wp) {
    require_admissible(wp);
    if (w_piece(t, f, nu, wp).branch == WBranch::WINDOW) return dt_p(t, f) / p(t, f);
    return 0.0;
}

double L_nu(double t, const Frequency& f, double nu) {
    const double k = f.k;
    const double e = f.eta;
    return nu * (k * k * t + e * e * t - e * k * t * t + k * k * t * t * t / 3.0);
}

const char* ineq_label(MultiplierIneq which) {
    switch (which) {
        case MultiplierIneq::M_FLOOR: return "nu*p + dm/m >= nu^(1/3)";
        case MultiplierIneq::W_BOUNDS: return "1 <= w <= beta^2 nu^(-2/3)";
        case MultiplierIneq::W_OVER_P: return "w/p <= 1/k^2";
        case MultiplierIneq::DISS_P: return "delta(dm/m + nu p) + dw/w - dp/p >= delta nu^(1/3)";
        case MultiplierIneq::DISS_NU13: return "delta(dm/m + nu^(1/3)) + dw/w - dp/p >= delta/2 nu^(1/3)";
    }
    return "?";
}

bool MultiplierReport::all_hold() const {
    for (const auto& s : slack)
        if (s.first_violation) return false;
    return true;
}

namespace {

void record(IneqSlack& s, double slack, double scale, double t, bool first) {
    if (first || slack < s.min_slack) {
        s.min_slack = slack;
        s.t_at_min = t;
    }
    if (slack < -kSlackRoundoff * scale && !s.first_violation) s.first_violation = t;
}

}  // namespace

MultiplierReport check_multiplier_inequalities(const Frequency& f, double nu, const WeightParams& wp,
                                               const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("check_multiplier_inequalities: empty t grid");
    if (!(nu > 0.0)) throw std::invalid_argument("check_multiplier_inequalities: nu must be > 0");
    require_admissible(wp);

    const double c = std::cbrt(nu);
    const double d = wp.delta_beta;
    const double k2 = double(f.k) * f.k;
    const double w_cap = wp.beta * wp.beta / (c * c);

    MultiplierReport rep;
    rep.points = t_grid.size();
    bool first = true;
    for (double t : t_grid) {
        const double pp = p(t, f);
        const double dpp = dt_p(t, f) / pp;
        const double dm = mult_m_logdt(t, f, nu);
        const double w = mult_w(t, f, nu, wp);
        const double dw = mult_w_logdt(t, f, nu, wp);

        const double a = nu * pp + dm;
        record(rep.slack[0], a - c, a + c, t, first);

        const double wb = std::min(w - 1.0, w_cap - w);
        record(rep.slack[1], wb, w, t, first);
        record(rep.w_upper_attained, (1.0 + w_cap) - w, w, t, first);

        record(rep.slack[2], 1.0 / k2 - w / pp, 1.0 / k2, t, first);

        const double l4 = d * (dm + nu * pp) + dw - dpp;
        record(rep.slack[3], l4 - d * c, std::abs(d * (dm + nu * pp)) + std::abs(dw) + std::abs(dpp), t, first);

        const double l5 = d * (dm + c) + dw - dpp;
        record(rep.slack[4], l5 - 0.5 * d * c, std::abs(d * (dm + c)) + std::abs(dw) + std::abs(dpp), t, first);
        first = false;
    }
    return rep;
}

}  // namespace cspec
