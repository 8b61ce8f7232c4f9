#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ripple/engine.hpp"
#include "ripple/scenario.hpp"

namespace ripple {

/// Burst-length quantiles reported in summaries.
inline constexpr double kSummaryQuantiles[] = {0.5, 0.9, 0.99, 0.999};

/// Runs every seed of the scenario, in parallel across at most `jobs` threads
/// (0 = hardware concurrency). Reports come back in seed order.
std::vector<MetricsReport> run_seeds(const Scenario& scenario, unsigned jobs = 0);

/// Writes one `seed_<n>/` directory per report plus `summary.csv`.
void write_batch(const Scenario& scenario, const std::vector<MetricsReport>& reports,
                 const std::filesystem::path& dir);

/// Reportable bursts (>= 1 ms) pooled over reports.
std::vector<double> pooled_bursts(const std::vector<MetricsReport>& reports);
double mean_unsuccessful_ratio(const std::vector<MetricsReport>& reports);

enum class SweepAxis { Horizon, Alpha };

SweepAxis parse_axis(const std::string& name);
const char* to_string(SweepAxis a);

/// Copy of `base` with the swept parameter set. Throws InvalidScenario on an
/// out-of-range value.
Scenario with_axis_value(const Scenario& base, SweepAxis axis, double value);

/// One subdirectory per value plus `sweep_summary.csv`. Throws
/// InvalidScenario on an empty value list.
void run_sweep(const Scenario& base, SweepAxis axis, const std::vector<double>& values,
               const std::filesystem::path& dir, unsigned jobs = 0);

}  // namespace ripple
