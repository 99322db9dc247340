#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cspec/integrator.hpp"
#include "cspec/symbols.hpp"

namespace cspec {

struct GridSpec {
    int k_max = 8;
    double eta_max = 64.0;
    double d_eta = 0.5;

    long j_max() const;
    // (0, 0) is never part of a field.
    bool contains(int k, long j) const;
    // Index j with j d_eta == eta up to 1e-9 d_eta; throws if eta is off-grid.
    long index_of(double eta) const;
    void validate() const;
};

// Moving-frame coefficients (R, A, Omega) of one mode.
struct FieldMode {
    int k = 1;
    long j = 0;
    cplx rho{}, alpha{}, omega{};
};

struct SpectralField {
    GridSpec grid;
    double time = 0.0;
    std::vector<FieldMode> modes;  // sorted by (k, j), unique

    double eta(const FieldMode& m) const { return m.j * grid.d_eta; }
    const FieldMode* find(int k, long j) const;
};

// Explicit assembly; modes are placed on the grid by eta value. With conjugate_symmetric the
// partner (-k, -j) receives the conjugate coefficients (a supplied partner must already agree).
struct ModeSpec {
    int k = 1;
    double eta = 0.0;
    cplx rho{}, alpha{}, omega{};
};
SpectralField assemble(const GridSpec& grid, const std::vector<ModeSpec>& modes, bool conjugate_symmetric = true);

struct RandomBand {
    std::uint64_t seed = 1;
    int k_lo = 1, k_hi = 2;
    double eta_lo = -8.0, eta_hi = 8.0;
    double amplitude = 1.0;
    bool xi_zero = false;  // omega = -rho
};

struct SmoothPacket {
    int k_lo = 1, k_hi = 3;
    double eta0 = 8.0;
    double width = 4.0;
    cplx rho = 1.0, alpha = 0.0, omega = 0.0;
};

// Presets: "fig1_forced", "fig1_transient", "zero" (empty field).
SpectralField assemble_preset(const std::string& name, const GridSpec& grid = {});
SpectralField assemble_random_band(const GridSpec& grid, const RandomBand& band);
SpectralField assemble_smooth_packet(const GridSpec& grid, const SmoothPacket& packet);
std::vector<std::string> preset_names();

struct HelmholtzNorms {
    double Q_norm = 0.0;    // || p^{-1/2} A ||
    double Px_norm = 0.0;   // || (eta - k t)/p Omega ||
    double Py_norm = 0.0;   // || k/p Omega ||
    double rho_norm = 0.0;  // || R ||
    // Omega = Xi - R split of the solenoidal parts.
    double px_xi = 0.0, px_r = 0.0;
    double py_xi = 0.0, py_r = 0.0;

    double velocity() const;  // sqrt(Q^2 + Px^2 + Py^2)
};

HelmholtzNorms helmholtz_norms(const SpectralField& field, double t);

enum class NormKind { L2, ANISO, ISO };
enum class NormFrame { STATIC, MOVING };
enum class Quantity { RHO, ALPHA, OMEGA, Q_IRROT, P_SOLENOIDAL };

struct NormSpec {
    NormKind kind = NormKind::L2;
    double s1 = 0.0, s2 = 0.0;  // ANISO
    double s = 0.0;             // ISO
    // MOVING evaluates the bracket at the physical frequency (k, eta - k t).
    NormFrame frame = NormFrame::STATIC;

    static NormSpec l2() { return {}; }
    static NormSpec iso(double s, NormFrame fr = NormFrame::STATIC) { return {NormKind::ISO, 0.0, 0.0, s, fr}; }
    static NormSpec aniso(double s1, double s2, NormFrame fr = NormFrame::STATIC) {
        return {NormKind::ANISO, s1, s2, 0.0, fr};
    }
};

double sobolev_norm(const SpectralField& field, const NormSpec& spec, Quantity q = Quantity::RHO);

struct FieldRunOptions {
    IntegratorOptions integrator{};
    int jobs = 1;
    bool keep_snapshots = true;
};

struct FieldRun {
    std::vector<double> times;
    std::vector<SpectralField> snapshots;  // empty unless keep_snapshots
    std::vector<HelmholtzNorms> norms;
    std::vector<double> energy_E0;         // zero-channel E^0 aggregate (0 without k = 0 modes)
    std::string regime;
    StepStats stats;                       // summed over modes
};

// nu = lambda = 0 routes k != 0 modes through the inviscid solver, otherwise the 3-variable
// viscous one; k = 0 modes go through zero_mode. Half the modes are evolved, the rest mirrored.
FieldRun run_field(const SpectralField& field, const FluidParams& params, double horizon,
                   const std::vector<double>& sample_times, const FieldRunOptions& opt = {});

// Largest |coef(k,j) - conj(coef(-k,-j))| over the field.
double conjugate_defect(const SpectralField& field);

// "cspec-field/1" documents.
std::string field_to_json(const SpectralField& field);
SpectralField field_from_json(const std::string& text);

// Physical-space samples f(x, y) = sum_modes c e^{i(k (x - t y) + eta y)} d_eta on a window;
// the eta-integral is truncated to the grid.
struct PhysicalSample {
    double x, y, value;
};
std::vector<PhysicalSample> physical_samples(const SpectralField& field, Quantity q, int nx, int ny, double y_half);

}  // namespace cspec
