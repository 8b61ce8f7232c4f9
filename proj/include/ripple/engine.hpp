#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "ripple/linkmap.hpp"
#include "ripple/scenario.hpp"

namespace ripple {

enum class Outcome { Success, LateDelay, NotRunning };

const char* to_string(Outcome o);

struct PacketRecord {
    UserId user = 0;
    double time = 0.0;
    Outcome outcome = Outcome::Success;
    double delay = 0.0;  // +inf when the chain could not be traversed
};

struct Burst {
    UserId user = 0;
    double start = 0.0;
    double length = 0.0;
};

/// Counts of broken model constraints observed during a run. All zero in a
/// correct simulation.
struct ConstraintCounters {
    std::size_t capacity_violations = 0;     // cloud usage over capacity or out of sync with instance holdings
    std::size_t interrupted_transitions = 0; // a transition started or landed out of turn
    std::size_t non_running_references = 0;  // a packet's embedding pointed at a non-serving instance
    std::size_t inconsistent_causes = 0;     // an outcome disagreeing with its delay / missing-VNF evidence

    std::size_t total() const {
        return capacity_violations + interrupted_transitions + non_running_references + inconsistent_causes;
    }
};

struct UserMetrics {
    UserId user = 0;
    std::size_t packets = 0;
    std::size_t late_delay = 0;
    std::size_t not_running = 0;

    std::size_t unsuccessful() const { return late_delay + not_running; }
    double unsuccessful_ratio() const {
        return packets ? static_cast<double>(unsuccessful()) / static_cast<double>(packets) : 0.0;
    }
};

using TransitionCounts = std::map<std::pair<LifecycleState, LifecycleState>, std::size_t>;

struct MetricsReport {
    std::uint64_t seed = 0;
    PolicyKind policy = PolicyKind::Ripple;
    double duration = 0.0;
    std::vector<PacketRecord> packets;  // time-ordered
    std::vector<UserMetrics> users;
    std::vector<Burst> bursts;          // unfiltered, by user then time
    TransitionCounts transitions;       // completed FSM edges
    ConstraintCounters constraints;
    std::size_t handovers = 0;
    std::size_t plans = 0;

    double mean_unsuccessful_ratio() const;
    /// Unsuccessful packets per second, summed over users.
    double objective() const;
    /// Burst lengths at or above `min_length` seconds.
    std::vector<double> reportable_bursts(double min_length = 1e-3) const;
};

/// Packet outcome against the current deployment. A missing VNF or a hop on a
/// non-serving instance makes it NotRunning; otherwise the loaded delay is
/// compared with the chain limit. `stale` is set when the embedding named an
/// instance that is no longer serving.
PacketRecord classify_packet(UserId user, double time, const EmbedResult& embedding, const SfcRequest& sfc,
                             const SubstrateNetwork& net, const Deployment& deployment, double wireless_lambda,
                             double wireless_mu, const DelayParams& params, bool* stale = nullptr);

/// Maximal runs of unsuccessful packets in one user's time-ordered log. A run
/// lasts from its first to its last packet plus one mean inter-arrival.
std::vector<Burst> burst_lengths(std::span<const PacketRecord> log, double mean_interarrival);

/// Linear-interpolation quantile of an unsorted sample; 0 for an empty sample.
double quantile(std::vector<double> values, double q);

/// Simulates [0, duration) for one seed. Throws InvalidScenario.
MetricsReport run(const Scenario& scenario, std::uint64_t seed);

/// packets.csv (optional), bursts.csv, metrics.csv, constraints.csv,
/// vnf_transitions.csv, burst_ccdf.csv and ratio_cdf.csv.
void write_report(const MetricsReport& report, const std::filesystem::path& dir, bool packets);

}  // namespace ripple
