#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ripple/topology.hpp"

namespace ripple {

using VnfType = std::uint32_t;

enum class LifecycleState { Descriptor, Source, Image, Stopped, Running, Paused };

inline constexpr std::array<LifecycleState, 6> kAllStates{
    LifecycleState::Descriptor, LifecycleState::Source,  LifecycleState::Image,
    LifecycleState::Stopped,    LifecycleState::Running, LifecycleState::Paused};

const char* to_string(LifecycleState s);
std::optional<LifecycleState> parse_state(const std::string& name);

/// Readiness order used when comparing a current state against a target:
/// Descriptor < Source < Image < Stopped < Paused < Running.
int readiness(LifecycleState s);

struct TransitionInFlight : std::logic_error {
    using std::logic_error::logic_error;
};
struct IllegalEdge : std::logic_error {
    using std::logic_error::logic_error;
};
struct PrematureCompletion : std::logic_error {
    using std::logic_error::logic_error;
};

struct Edge {
    LifecycleState from;
    LifecycleState to;
    double seconds;
};

/// Durations of the FSM edges and the per-state resource mask.
class TransitionTable {
public:
    TransitionTable();  // no edges

    void set(LifecycleState from, LifecycleState to, double seconds);
    std::optional<double> duration(LifecycleState from, LifecycleState to) const;
    bool has_edge(LifecycleState from, LifecycleState to) const { return duration(from, to).has_value(); }
    std::vector<Edge> edges() const;

    /// Shortest-duration edge sequence; empty when from == to. Among equal
    /// durations the route with fewer edges wins.
    std::vector<Edge> route_to(LifecycleState from, LifecycleState to) const;
    double route_seconds(LifecycleState from, LifecycleState to) const;
    double time_to_running(LifecycleState from) const { return route_seconds(from, LifecycleState::Running); }

    /// Same edges with every duration set to zero.
    TransitionTable instantaneous() const;

    /// Resources held in `state` by a VNF needing `demand` to run.
    static ResourceVector footprint(LifecycleState state, const ResourceVector& demand);

private:
    std::array<std::array<double, 6>, 6> seconds_{};  // negative = no edge
};

/// Forward download/deploy/start chain, pause/resume, stop, and the
/// instantaneous delete edges back down to Descriptor.
TransitionTable default_transition_table();

struct InFlight {
    LifecycleState target;
    double completion_time;
};

struct VnfInstance {
    VnfType vnf_type = 0;
    NodeId location = 0;
    LifecycleState state = LifecycleState::Descriptor;
    std::optional<InFlight> in_flight;
    /// State the owner is driving it toward, possibly several edges away.
    std::optional<LifecycleState> goal;

    bool serving() const { return state == LifecycleState::Running && !in_flight; }
    /// Where the instance ends up once the pending goal (or in-flight edge) is reached.
    LifecycleState settled_state() const {
        if (goal) return *goal;
        return in_flight ? in_flight->target : state;
    }
    /// Resources currently reserved on its edge cloud.
    ResourceVector held(const ResourceVector& demand) const;
};

/// One VnfInstance per (VNF type, edge cloud) pair. A pair that was never
/// touched sits in Descriptor, which costs nothing.
class Deployment {
public:
    Deployment() = default;
    Deployment(std::vector<ResourceVector> demand_per_type, std::size_t num_clouds);

    std::size_t num_types() const { return demand_.size(); }
    std::size_t num_clouds() const { return num_clouds_; }
    const ResourceVector& demand(VnfType v) const { return demand_.at(v); }

    VnfInstance& at(VnfType v, NodeId e) { return instances_.at(v * num_clouds_ + e); }
    const VnfInstance& at(VnfType v, NodeId e) const { return instances_.at(v * num_clouds_ + e); }

    /// Clouds where v is Running with nothing in flight, ascending.
    std::vector<NodeId> serving_locations(VnfType v) const;
    /// Sum of held() over every instance on cloud e.
    ResourceVector held_on(NodeId e) const;

    std::vector<VnfInstance>& instances() { return instances_; }
    const std::vector<VnfInstance>& instances() const { return instances_; }

private:
    std::vector<ResourceVector> demand_;
    std::size_t num_clouds_ = 0;
    std::vector<VnfInstance> instances_;
};

/// Starts a single FSM edge. Reserves the componentwise max of the current and
/// target footprints and returns the completion time.
double begin_transition(VnfInstance& inst, LifecycleState target, double now, const TransitionTable& table,
                        EdgeCloud& ec, const ResourceVector& demand);

/// Lands the in-flight transition and releases whatever the new state no
/// longer needs.
void complete_transition(VnfInstance& inst, double now, EdgeCloud& ec, const ResourceVector& demand);

}  // namespace ripple
