#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ripple/forecast.hpp"
#include "ripple/lifecycle.hpp"
#include "ripple/linkmap.hpp"
#include "ripple/mobility.hpp"
#include "ripple/policy.hpp"
#include "ripple/queueing.hpp"
#include "ripple/topology.hpp"

namespace ripple {

struct InvalidScenario : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class PolicyKind { Ripple, Ideal, Reactive };

const char* to_string(PolicyKind k);
PolicyKind parse_policy(const std::string& name);

struct TopologySpec {
    std::string kind = "tree";  // tree | city | file
    int rows = 4;               // base-station grid
    int cols = 4;
    int mux = 4;                // tree only
    double spacing_m = 200.0;
    ResourceVector capacity{5, 8, 10};
    double wired_mu = 10000.0;
    std::string file;           // kind == file
};

struct Scenario {
    TopologySpec topology;

    int users = 4;
    double lambda = 100.0;  // packets/s per user

    // SFC i uses VNF types i*length .. i*length+length-1; user u requests SFC u % count.
    int sfc_count = 4;
    int sfc_length = 4;
    double vnf_processing_s = 1e-4;
    double e2e_limit_s = 1e-3;
    ResourceVector vnf_demand{1, 1, 1};

    PolicyKind policy = PolicyKind::Ripple;
    LifecycleThresholds thresholds;
    DemotionRule demotion = DemotionRule::Auto;
    bool attachment_floor = true;

    PredictorKind predictor = PredictorKind::Oracle;
    int history_k = 5;
    double horizon_s = 12.63;
    double estimator_softness_m = 10.0;

    GaussMarkovParams mobility;  // bounds are derived from the topology
    double connection_softness_m = 10.0;
    std::string trace_file;      // replay instead of generating

    DelayParams delay;

    double duration_s = 300.0;
    std::vector<std::uint64_t> seeds{1};
    bool warm_start = true;
    bool write_packets = true;

    std::vector<Edge> transitions;  // overrides on top of the default table

    /// Throws InvalidScenario naming the offending field.
    void validate() const;

    std::vector<SfcRequest> sfc_catalog() const;
    TransitionTable transition_table() const;
};

/// Flat `key=value` lines plus `transition <from> <to> <seconds>` lines;
/// `#` starts a comment. Relative file paths resolve against `base_dir`.
/// Errors carry the line number.
Scenario parse_scenario(std::istream& is, const std::string& base_dir = "");
Scenario load_scenario(const std::string& path);

/// Writes every field so that parse_scenario reproduces the same scenario.
void emit_scenario(std::ostream& os, const Scenario& s);

/// Substrate described by the topology section.
SubstrateNetwork build_network(const TopologySpec& spec);

}  // namespace ripple
