#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cspec {

using cplx = std::complex<double>;

struct Frequency {
    int k = 1;
    double eta = 0.0;

    Frequency() = default;
    Frequency(int k_, double eta_);

    double critical_time() const { return eta / k; }
};

struct FluidParams {
    double mach = 1.0;
    double shear_visc = 0.0;
    double bulk_visc = 0.0;
    double mu = 0.0;

    FluidParams() = default;
    FluidParams(double mach_, double nu, double lambda);

    bool inviscid() const { return shear_visc == 0.0 && bulk_visc == 0.0; }
    // mu <= 1/2 and M max{mu^{1/2}, nu^{1/3}} <= 1
    bool in_theorem_regime() const;
    std::string regime_label() const;
};

struct WeightParams {
    double beta = 50.0;
    double delta_beta = 1.0 / 12.0;

    WeightParams() = default;
    WeightParams(double beta_, double delta_beta_);

    static bool admissible(double beta, double delta_beta);
};

// Japanese brackets: <a> = (1+a^2)^{1/2}, <k,eta> = (1+k^2+eta^2)^{1/2}.
double bracket(double a);
double bracket(double k, double eta);

double p(double t, const Frequency& f);
double dt_p(double t, const Frequency& f);

double mult_m(double t, const Frequency& f, double nu);
double mult_m_logdt(double t, const Frequency& f, double nu);

double mult_w(double t, const Frequency& f, double nu, const WeightParams& wp);
double mult_w_logdt(double t, const Frequency& f, double nu, const WeightParams& wp);

double L_nu(double t, const Frequency& f, double nu);

enum class MultiplierIneq { M_FLOOR, W_BOUNDS, W_OVER_P, DISS_P, DISS_NU13 };
constexpr std::size_t kNumMultiplierIneqs = 5;
const char* ineq_label(MultiplierIneq which);

struct IneqSlack {
    double min_slack = 0.0;
    double t_at_min = 0.0;
    // First grid time where the slack went negative.
    std::optional<double> first_violation;
};

struct MultiplierReport {
    IneqSlack slack[kNumMultiplierIneqs];
    // Upper half of W_BOUNDS measured against the attained maximum 1 + beta^2 nu^{-2/3}.
    IneqSlack w_upper_attained;
    std::size_t points = 0;

    bool all_hold() const;
    const IneqSlack& operator[](MultiplierIneq which) const {
        return slack[static_cast<std::size_t>(which)];
    }
};

// Roundoff allowance on slacks that are identically zero in exact arithmetic
// (w/p = 1/k^2 inside the window).
constexpr double kSlackRoundoff = 1e-12;

MultiplierReport check_multiplier_inequalities(const Frequency& f, double nu,
                                               const WeightParams& wp,
                                               const std::vector<double>& t_grid);

}  // namespace cspec
