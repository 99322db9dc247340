#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cspec/integrator.hpp"
#include "cspec/symbols.hpp"

namespace cspec {

// Worker count from a --jobs value ("auto", a positive integer, or empty to fall back to
// CSPEC_JOBS, then 1). Throws std::invalid_argument on malformed input.
int resolve_jobs(const std::string& flag);

struct InitialData {
    cplx R{1.0};
    cplx A{};
    cplx Omega{};
};

struct RunPoint {
    int k = 1;
    double eta = 0.0;
    double mach = 1.0;
    double nu = 0.0;
    double lambda = 0.0;
    double horizon = 100.0;
    std::size_t data = 0;  // index into the sweep's data list
};

// |A| + p(0)^{1/2} |R| / M + |Omega|
double data_size(const InitialData& d, const Frequency& f, double M);
// sqrt(Q^2 + Px^2 + Py^2) + |R| / M for a single mode.
double growth_quantity(double t, cplx R, cplx A, cplx Omega, const Frequency& f, double M);

struct PointOptions {
    IntegratorOptions integrator{};
    // Viscous runs stop once t mu^{1/3} > 1 and the growth quantity fell below 1e-3 of its maximum.
    bool early_stop = false;
};

using PointObserver = std::function<void(double t, cplx R, cplx A, cplx Omega)>;

enum class PointError { NONE, INVALID, INTEGRATOR };

struct PointResult {
    RunPoint point;
    bool ok = true;
    PointError error_kind = PointError::NONE;
    std::string error;
    double transient_max = 0.0;  // max_t growth_quantity / data_size
    double t_at_max = 0.0;
    double data_size = 0.0;
    bool stopped_early = false;
    StepStats stats;
};

// Inviscid points use the (R, A) solver, all others the 3-variable one. on_step sees every
// accepted step, on_sample the requested sample times.
PointResult run_point(const RunPoint& pt, const InitialData& d, const PointOptions& opt,
                      const std::vector<double>& sample_times = {}, const PointObserver& on_sample = {},
                      const PointObserver& on_step = {});

struct SweepSpec {
    // Empty axes take the RunPoint defaults.
    std::vector<int> k;
    std::vector<double> eta, mach, nu, lambda, horizon;
    std::vector<InitialData> data;  // empty means {R = 1}
    double rtol = 1e-8;
    std::size_t cap = 100000;

    // Cartesian product, deduplicated and sorted by (k, eta, nu, M, lambda, horizon, data).
    std::vector<RunPoint> points() const;
    const InitialData& data_at(std::size_t i) const;
};

// {"k": [..], "eta": [..], "mach": [..], "nu": [..], "lambda": [..], "horizon": [..],
//  "data": [{"R": [re, im], "A": [re, im], "Omega": [re, im]}], "rtol": x, "cap": n}
SweepSpec sweep_from_json(const std::string& text);

struct NuScaling {
    bool available = false;
    double exponent = 0.0;
    double residual = 0.0;
    std::vector<double> nu;
    std::vector<double> max_transient;  // max over the other axes, per nu
};

struct SweepResult {
    std::vector<PointResult> rows;
    std::size_t failed = 0;
    NuScaling scaling;
};

SweepResult run_sweep(const SweepSpec& spec, int jobs);
// Fit of log max_transient against log nu over the nu > 0 groups.
NuScaling nu_scaling(const std::vector<PointResult>& rows);

// Columns: k,eta,mach,nu,lambda,horizon,data,quantity,value,status
std::string sweep_csv(const SweepResult& res);
std::string sweep_summary_json(const SweepResult& res);

// %.17g, with nan/inf spelled out.
std::string fmt17(double v);

}  // namespace cspec
