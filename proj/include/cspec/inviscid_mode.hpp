#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cspec/integrator.hpp"
#include "cspec/symbols.hpp"

namespace cspec {

struct InviscidInit {
    cplx R_in{};
    cplx A_in{};
    cplx Omega_in{};

    cplx Xi_in() const { return R_in + Omega_in; }
};

// Z1 = R / (M p^{1/4}), Z2 = A / p^{3/4}.
struct SymState {
    cplx Z1{};
    cplx Z2{};

    double norm() const;
};

SymState to_sym(cplx R, cplx A, double t, const Frequency& f, double M);
void from_sym(const SymState& z, double t, const Frequency& f, double M, cplx& R, cplx& A);

struct SymmetrizerCoeffs {
    double a = 0.0;       // dt p / (4p)
    double b = 0.0;       // sqrt(p)/M
    double d = 0.0;       // sqrt(p)/M + 2 M k^2 / p^{3/2}
    double zeta = 1.0;    // sqrt(d/b)
    double beta_s = 0.0;  // sqrt(b d)
};

SymmetrizerCoeffs symmetrizer(double t, const Frequency& f, double M);

std::array<cplx, 2> rhs_inviscid(double t, cplx R, cplx A, const Frequency& f, double M, cplx Xi_in);

// L acts on Z; F multiplies Xi_in.
Mat matrix_L(double t, const Frequency& f, double M);
std::array<double, 2> vector_F(double t, const Frequency& f);

// Generic-interface views of the two formulations.
LinearSystem inviscid_ra_system(const Frequency& f, double M, cplx Xi_in);
LinearSystem symmetrized_system(const Frequency& f, double M, cplx Xi_in);

struct ModeSample {
    double t = 0.0;
    cplx R{}, A{}, Omega{};
    SymState Z;
};

struct ModeTrajectory {
    std::vector<ModeSample> samples;
    StepStats stats;
};

ModeSample make_sample(double t, cplx R, cplx A, cplx Xi_in, const Frequency& f, double M);

ModeTrajectory solve_mode(const InviscidInit& init, const Frequency& f, double M, double horizon, double tol,
                          const std::vector<double>& sample_times);

// Streaming variant for long horizons. on_step sees (t, R, A) after every accepted step
// and may stop the run by returning false.
using ModeSampleFn = std::function<void(const ModeSample&)>;
using ModeStepFn = std::function<bool(double t, cplx R, cplx A)>;
StreamResult solve_mode_stream(const InviscidInit& init, const Frequency& f, double M, double horizon,
                               const IntegratorOptions& opt, const std::vector<double>& sample_times,
                               const ModeSampleFn& on_sample, const ModeStepFn& on_step = {});

// Gamma(t) = Z_in + G(t) Xi_in with G(t) = int_0^t Phi_L(0,s) F(s) ds (a real 2-vector).
struct GammaResult {
    std::vector<double> times;
    std::vector<std::array<cplx, 2>> gamma;
    std::array<cplx, 2> gamma_inf{};
    double tail_bound = 0.0;   // bound on |Gamma_inf - Gamma(t_tail)|
    double t_tail = 0.0;
    int refinements = 0;
    double last_change = 0.0;  // relative change at the final refinement
};

struct GammaOptions {
    double tol = 1e-8;
    double panel_phase = 1.0;  // initial panel width in radians of local phase
    int max_refinements = 5;
    double tail_cap = 1e4;     // never extend the Gamma_inf integral past this time
    double ode_rtol = 1e-10;
};

GammaResult gamma_fn(const std::vector<double>& times, const InviscidInit& init, const Frequency& f, double M,
                     const GammaOptions& opt = {});

std::array<cplx, 2> gamma_at(double t, const InviscidInit& init, const Frequency& f, double M,
                             const GammaOptions& opt = {});

double energy_lemma31(const SymState& z, double t, const Frequency& f, double M);
// zeta |Z1|^2 + |Z2|^2 / zeta
double energy_lemma31_diag(const SymState& z, double t, const Frequency& f, double M);

double phase_rhs(double theta, double t, const Frequency& f, double M);

double wkb_envelope(double t, const Frequency& f);

struct PerturbOptions {
    int directions = 16;
    double gamma_tol = 1e-8;
};

struct PerturbResult {
    InviscidInit data;
    // Exact shifts; below double resolution of the base data they vanish from `data` itself.
    cplx dR{}, dA{}, dOmega{};
    double delta = 0.0;                  // eps e^{-(k^2+eta^2)}
    std::array<double, 2> direction{};   // unit vector nu_eps
    bool gamma_inf_was_zero = false;
    double inf_gamma = 0.0;              // sampled inf_t |Gamma_eps(t)|
    // |dR| + |dOmega| + <k>^{-3/2} <eta>^{-3/2} |dA|: the single-mode L2 / H^{-3/2} distance.
    double norm_displacement = 0.0;
    std::size_t samples = 0;
};

struct PerturbError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

PerturbResult perturb_generic(const InviscidInit& init, const Frequency& f, double M, double eps, double horizon,
                              const PerturbOptions& opt = {});

}  // namespace cspec
