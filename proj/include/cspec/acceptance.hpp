#pragma once

#include <string>
#include <vector>

#include "cspec/viscous_mode.hpp"

namespace cspec {

enum class Level { QUICK, FULL };
const char* level_label(Level l);

struct AcceptanceOptions {
    Level level = Level::FULL;
    int jobs = 1;
    // Weight used by the enhanced-dissipation criterion; tests tamper with w_exponent.
    WeightOptions weight{};
};

struct Metric {
    std::string name;
    double value = 0.0;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool numeric_pass = false;
    bool within_budget = true;
    double budget_s = 0.0;
    double elapsed_s = 0.0;
    std::vector<Metric> metrics;
    std::string detail;

    bool pass() const { return numeric_pass && within_budget; }
    double metric(const std::string& name) const;  // throws if absent
};

std::vector<int> criterion_ids();
const char* criterion_title(int id);
double criterion_budget(int id);

// Runs one criterion; errors inside a criterion are reported as a failure with the message in `detail`.
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, const std::vector<int>& ids = {});

// "[PASS] 1 ..." style line with the key metrics.
std::string summary_line(const CriterionResult& r);

// "cspec-report/1" document. Elapsed times are left out so that repeated runs differ only in
// `timestamp`; the budget verdict is kept.
std::string report_json(const std::vector<CriterionResult>& results, Level level, const std::string& timestamp);

}  // namespace cspec
