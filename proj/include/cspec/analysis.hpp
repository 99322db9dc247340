#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cspec {

struct Series {
    std::vector<double> t;
    std::vector<double> y;
};

// Local maxima of y with a parabolic refinement through each peak and its neighbours.
Series local_maxima(const std::vector<double>& t, const std::vector<double>& y);

// Streaming version fed one point at a time (e.g. from an integrator step observer).
class PeakTracker {
public:
    void push(double t, double y);
    const Series& peaks() const { return peaks_; }
    // Highest value seen so far and its time.
    double max_value() const { return max_y_; }
    double max_time() const { return max_t_; }

private:
    double t0_ = 0, y0_ = 0, t1_ = 0, y1_ = 0;
    int seen_ = 0;
    double max_y_ = -1.0, max_t_ = 0.0;
    Series peaks_;
};

// Points with t in [t_lo, t_hi].
Series window(const Series& s, double t_lo, double t_hi);

constexpr std::size_t kMinFitSamples = 20;

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // RMS of the residuals in the fitted coordinates
    std::size_t n = 0;
};

// Least squares in (log t, log y); throws if fewer than min_samples positive points fall in the window.
LineFit fit_loglog(const Series& s, double t_lo, double t_hi, std::size_t min_samples = kMinFitSamples);
// Least squares in (t, log y); slope is the growth rate (negative for decay).
LineFit fit_loglinear(const Series& s, double t_lo, double t_hi, std::size_t min_samples = kMinFitSamples);

// y ~ C (1 + c t)^q with c > 0 found by a golden-section search on log c.
struct AlgebraicFit {
    double exponent = 0.0;
    double c = 0.0;
    double log_C = 0.0;
    double residual = 0.0;
    std::size_t n = 0;
};
AlgebraicFit fit_one_plus_ct(const Series& s, double t_lo, double t_hi, double c_lo, double c_hi,
                             std::size_t min_samples = kMinFitSamples);

enum class FitKind { POWER, EXPONENTIAL, ALGEBRAIC };

struct RateReport {
    std::string quantity;
    FitKind kind = FitKind::POWER;
    Series data;
    double t_lo = 0.0, t_hi = 0.0;
    double fitted = 0.0;
    double residual = 0.0;
    std::size_t n_fit = 0;
    double expected = 0.0;
    double tolerance = 0.0;
    // For one-sided checks (rates bounded below) set lower_only.
    bool lower_only = false;
    bool pass = false;
};

RateReport make_power_report(const std::string& name, const Series& s, double t_lo, double t_hi, double expected,
                             double tol);
RateReport make_rate_report(const std::string& name, const Series& s, double t_lo, double t_hi,
                            double min_rate);

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);

}  // namespace cspec
