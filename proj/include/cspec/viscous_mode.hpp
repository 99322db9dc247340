#pragma once

#include <array>
#include <functional>
#include <vector>

#include "cspec/integrator.hpp"
#include "cspec/quadrature.hpp"
#include "cspec/symbols.hpp"

namespace cspec {

struct ViscousState {
    cplx R_hat{};
    cplx A_hat{};
    cplx Omega_hat{};

    cplx Xi() const { return R_hat + Omega_hat; }
};

// G = Xi - nu M^2 A.
struct GoodState {
    cplx R_hat{};
    cplx A_hat{};
    cplx G_hat{};
};

GoodState to_good(const ViscousState& v, const FluidParams& params);
ViscousState from_good(const GoodState& g, const FluidParams& params);

enum class WeightScheme { P_WEIGHT, W_WEIGHT, TILDE_LAMBDA0 };
const char* scheme_label(WeightScheme s);

struct WeightedTriple {
    cplx Z1{}, Z2{}, Z3{};
    WeightScheme scheme = WeightScheme::P_WEIGHT;
};

struct WeightOptions {
    double s = 0.0;                // Sobolev index in <k,eta>^s
    WeightParams wp{};
    double w_exponent = 0.75;      // power of w^{-1} in the W_WEIGHT scheme
};

// TILDE_LAMBDA0 requires lambda = 0 and uses Z3 = <k,eta>^s m^{-1} G.
WeightedTriple weighted_triple(const GoodState& g, double t, const Frequency& f, const FluidParams& params,
                               WeightScheme scheme, const WeightOptions& opt = {});

std::array<cplx, 3> rhs_viscous(double t, const ViscousState& v, const Frequency& f, const FluidParams& params);
std::array<cplx, 3> rhs_good(double t, const GoodState& g, const Frequency& f, const FluidParams& params);

LinearSystem viscous_system(const Frequency& f, const FluidParams& params);
LinearSystem good_system(const Frequency& f, const FluidParams& params);

// gamma = delta M nu^{1/3} / 4.
double default_gamma(const FluidParams& params, double delta = 1.0);

// P_WEIGHT or TILDE_LAMBDA0 triples; gamma in (0, 1/4].
double energy_E(const WeightedTriple& z, double t, const Frequency& f, const FluidParams& params, double gamma);
// W_WEIGHT triples; nu > 0.
double energy_Ew(const WeightedTriple& z, double t, const Frequency& f, const FluidParams& params);
// (1 + M^2 (dt p)^2/p^3)|Z1|^2 + |Z2|^2 + |Z3|^2: the coercivity reference.
double energy_diag(const WeightedTriple& z, double t, const Frequency& f, const FluidParams& params);

struct ViscousSample {
    double t = 0.0;
    ViscousState v;
};

using ViscousSampleFn = std::function<void(const ViscousSample&)>;
using ViscousStepFn = std::function<bool(double t, const ViscousState& v)>;

// Evolves (R, A, Omega). Step observers may stop the run.
StreamResult solve_viscous_stream(const ViscousState& init, const Frequency& f, const FluidParams& params,
                                  double horizon, const IntegratorOptions& opt,
                                  const std::vector<double>& sample_times, const ViscousSampleFn& on_sample,
                                  const ViscousStepFn& on_step = {});

std::vector<ViscousSample> solve_viscous(const ViscousState& init, const Frequency& f, const FluidParams& params,
                                         double horizon, const IntegratorOptions& opt,
                                         const std::vector<double>& sample_times);

// Evolves (R, A, G) and reports samples converted back to (R, A, Omega).
std::vector<ViscousSample> solve_good(const ViscousState& init, const Frequency& f, const FluidParams& params,
                                      double horizon, const IntegratorOptions& opt,
                                      const std::vector<double>& sample_times);

// Xi(t) = e^{-L(t)} Xi_in + nu int_0^t e^{-(L(t)-L(s))} p(s) R(s) ds, with R given on the nodes
// of a composite Gauss rule covering [0, t].
cplx duhamel_xi(const CompositeRule& rule, const std::vector<cplx>& R_nodes, const Frequency& f, double nu,
                cplx Xi_in, double t);

struct DuhamelCheck {
    cplx xi_duhamel{};
    cplx xi_evolved{};
    double rel_err = 0.0;
    int panels = 0;
    double last_change = 0.0;
};

struct DuhamelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evolves the mode with R sampled on refining composite rules until the Duhamel value changes
// by less than tol (relative); throws DuhamelError if that never happens.
DuhamelCheck duhamel_xi_check(const ViscousState& init, const Frequency& f, const FluidParams& params, double t,
                              double tol, const IntegratorOptions& opt, int max_panels = 1 << 16);

}  // namespace cspec
