#pragma once

#include <array>
#include <vector>

#include "cspec/integrator.hpp"
#include "cspec/symbols.hpp"

namespace cspec {

// One eta-mode of the x-average; d/dy acts as i eta.
struct ZeroModeState {
    cplx rho0{};
    cplx alpha0{};
    cplx omega0{};
    double eta = 1.0;

    cplx v0y() const { return alpha0 / cplx(0.0, eta); }
    // rho0 + omega0 - nu M^2 alpha0
    cplx good(const FluidParams& params) const;
};

std::array<cplx, 3> rhs_zero(double t, const ZeroModeState& s, const FluidParams& params);
// d/dt of the good unknown as predicted by its own equation: -nu eta^2 G + lambda nu M^2 eta^2 alpha0.
cplx rhs_zero_good(const ZeroModeState& s, const FluidParams& params);

LinearSystem zero_system(double eta, const FluidParams& params);

struct ZeroSample {
    double t = 0.0;
    ZeroModeState state;
};

std::vector<ZeroSample> solve_zero(const ZeroModeState& init, const FluidParams& params, double horizon,
                                   const IntegratorOptions& opt, const std::vector<double>& sample_times);

// Per-mode E^l density; the eta^{l-1} alpha0 term is |v0y| eta^l.
double energy_El(const ZeroModeState& s, int ell, const FluidParams& params);
std::vector<double> energy_El(const std::vector<ZeroSample>& history, int ell, const FluidParams& params);

// A set of eta-modes on a uniform grid (eta = j d_eta, j != 0) weighted by the trapezoid rule.
struct ZeroField {
    double d_eta = 0.1;
    std::vector<ZeroModeState> modes;

    // Trapezoid weight: d_eta, halved at the outermost |j|.
    std::vector<double> weights() const;
};

// Low-frequency-heavy profile: rho0 = amp |eta|^{-1/2} e^{-eta^2/eta_c^2}, alpha0 = 0, omega0 = -rho0,
// on 0 < |eta| <= eta_max.
ZeroField zero_profile_extremal(double amp, double eta_c, double d_eta, double eta_max);
// Smooth profile: rho0 = amp e^{-eta^2/eta_c^2}, alpha0 = 0, omega0 = 0.
ZeroField zero_profile_smooth(double amp, double eta_c, double d_eta, double eta_max);

struct ZeroAggregate {
    std::vector<double> times;
    std::vector<double> E;  // aggregate E^l for each requested ell, row-major [time][ell index]
    std::vector<int> ells;

    double at(std::size_t ti, std::size_t li) const { return E[ti * ells.size() + li]; }
};

// Evolves every mode (parallel over `jobs` workers) and folds E^l in mode order.
ZeroAggregate evolve_zero_field(const ZeroField& field, const FluidParams& params, double horizon,
                                const IntegratorOptions& opt, const std::vector<double>& sample_times,
                                const std::vector<int>& ells, int jobs = 1);

}  // namespace cspec
