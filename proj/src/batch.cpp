#include "ripple/batch.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

namespace ripple {

std::vector<MetricsReport> run_seeds(const Scenario& scenario, unsigned jobs) {
    scenario.validate();
    std::vector<MetricsReport> reports(scenario.seeds.size());
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(reports.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(reports.size());
    auto worker = [&] {
        for (std::size_t i = next++; i < reports.size(); i = next++) {
            try {
                reports[i] = run(scenario, scenario.seeds[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return reports;
}

std::vector<double> pooled_bursts(const std::vector<MetricsReport>& reports) {
    std::vector<double> out;
    for (const auto& r : reports) {
        auto b = r.reportable_bursts();
        out.insert(out.end(), b.begin(), b.end());
    }
    return out;
}

double mean_unsuccessful_ratio(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : reports) sum += r.mean_unsuccessful_ratio();
    return sum / static_cast<double>(reports.size());
}

namespace {

std::string num(double x) { return fmt::format("{}", x); }

void write_quantiles(std::ostream& os, const std::vector<double>& bursts) {
    for (double q : kSummaryQuantiles) os << ',' << num(quantile(bursts, q));
}

std::string quantile_header() {
    std::string h;
    for (double q : kSummaryQuantiles) h += fmt::format(",burst_q{}", q);
    return h;
}

}  // namespace

void write_batch(const Scenario& scenario, const std::vector<MetricsReport>& reports,
                 const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& r : reports) write_report(r, dir / fmt::format("seed_{}", r.seed), scenario.write_packets);
    std::ofstream f(dir / "summary.csv");
    if (!f) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
    f << "seed,policy,mean_unsuccessful_ratio,objective_per_s,bursts" << quantile_header() << ",constraint_violations\n";
    std::size_t violations = 0;
    double objective = 0.0;
    for (const auto& r : reports) {
        const auto b = r.reportable_bursts();
        f << r.seed << ',' << to_string(r.policy) << ',' << num(r.mean_unsuccessful_ratio()) << ','
          << num(r.objective()) << ',' << b.size();
        write_quantiles(f, b);
        f << ',' << r.constraints.total() << '\n';
        violations += r.constraints.total();
        objective += r.objective();
    }
    const auto pooled = pooled_bursts(reports);
    f << "mean," << to_string(scenario.policy) << ',' << num(mean_unsuccessful_ratio(reports)) << ','
      << num(reports.empty() ? 0.0 : objective / static_cast<double>(reports.size())) << ',' << pooled.size();
    write_quantiles(f, pooled);
    f << ',' << violations << '\n';
}

SweepAxis parse_axis(const std::string& name) {
    if (name == "horizon") return SweepAxis::Horizon;
    if (name == "alpha") return SweepAxis::Alpha;
    throw std::invalid_argument("unknown sweep axis '" + name + "' (expected horizon or alpha)");
}

const char* to_string(SweepAxis a) { return a == SweepAxis::Horizon ? "horizon" : "alpha"; }

Scenario with_axis_value(const Scenario& base, SweepAxis axis, double value) {
    Scenario s = base;
    if (axis == SweepAxis::Horizon) {
        if (!(value >= 0)) throw InvalidScenario("horizon values must be >= 0");
        s.horizon_s = value;
    } else {
        if (!(value >= 0 && value <= 1)) throw InvalidScenario("alpha values must lie in [0, 1]");
        s.mobility.alpha = value;
    }
    s.validate();
    return s;
}

void run_sweep(const Scenario& base, SweepAxis axis, const std::vector<double>& values,
               const std::filesystem::path& dir, unsigned jobs) {
    if (values.empty()) throw InvalidScenario("sweep needs at least one value");
    std::vector<Scenario> scenarios;
    for (double v : values) scenarios.push_back(with_axis_value(base, axis, v));
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "sweep_summary.csv");
    if (!f) throw std::runtime_error("cannot write " + (dir / "sweep_summary.csv").string());
    f << "axis,value,mean_unsuccessful_ratio,bursts" << quantile_header() << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto reports = run_seeds(scenarios[i], jobs);
        write_batch(scenarios[i], reports, dir / fmt::format("{}_{}", to_string(axis), values[i]));
        const auto pooled = pooled_bursts(reports);
        f << to_string(axis) << ',' << num(values[i]) << ',' << num(mean_unsuccessful_ratio(reports)) << ','
          << pooled.size();
        write_quantiles(f, pooled);
        f << '\n';
    }
}

}  // namespace ripple
