#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ripple/forecast.hpp"
#include "ripple/lifecycle.hpp"
#include "ripple/linkmap.hpp"
#include "ripple/queueing.hpp"
#include "ripple/topology.hpp"

namespace ripple {

/// Probability cutpoints run > stage > fetch.
struct LifecycleThresholds {
    double run = 0.6;
    double stage = 0.3;
    double fetch = 0.1;

    void validate() const;  // throws std::invalid_argument
};

/// Running at p >= run, Stopped at p >= stage, Image at p >= fetch, else Descriptor.
LifecycleState target_state(double p, const LifecycleThresholds& t);

struct MissingForecast : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 1 - prod(no_connect).
double demand_from_no_connect(std::span<const double> no_connect);

/// P_{v,b}: chance that at least one user needing v attaches to the BS at
/// bs_index, from each user's no-connect probability there.
double vnf_demand_prob(std::size_t bs_index, std::span<const Forecast> forecasts,
                       std::span<const UserId> users_requiring);

/// P_e = 1 - prod over the BSs behind a multiplexing node of (1 - P_{v,b}).
double mux_demand_prob(std::span<const double> per_bs);

enum class DemotionRule { Auto, Paused, Stopped };

const char* to_string(DemotionRule r);
DemotionRule parse_demotion(const std::string& name);

struct PlanTarget {
    VnfType vnf = 0;
    NodeId cloud = 0;
    LifecycleState state = LifecycleState::Descriptor;
    double probability = 0.0;  // driving probability
    bool wanted = false;       // false for demotions and evictions
};

struct InfeasibleChain {
    UserId user = 0;
    SfcId sfc = 0;
    std::size_t layer = 0;
    NodeId bs = 0;
};

/// Lifecycle targets for one decision epoch. Demotions and evictions come
/// first, then wanted targets in placement order. A pair absent from the plan
/// keeps its current state.
struct PlacementPlan {
    std::vector<PlanTarget> targets;
    std::vector<InfeasibleChain> infeasible;

    const PlanTarget* find(VnfType v, NodeId e) const;
};

/// One user's placement input: which chain, where it is attached, and the
/// likelihood of attaching to each BS (aligned with net.base_stations()).
struct UserDemand {
    UserId user = 0;
    SfcId sfc = 0;
    NodeId attached_bs = 0;
    std::vector<double> connect;
};

/// Likelihood vector from a forecast. With `attachment_floor` the BS the user
/// is attached to right now counts as certain.
UserDemand demand_from_forecast(UserId user, SfcId sfc, NodeId attached_bs, const Forecast& f,
                                const SubstrateNetwork& net, bool attachment_floor);

/// Certainty at the attached BS, zero elsewhere.
UserDemand realized_demand(UserId user, SfcId sfc, NodeId attached_bs, const SubstrateNetwork& net);

struct PlanningContext {
    const SubstrateNetwork& net;
    const std::vector<SfcRequest>& sfcs;  // indexed by SfcId
    const Deployment& deployment;
    DelayParams delay;
    LifecycleThresholds thresholds;
    DemotionRule demotion = DemotionRule::Auto;
    /// Upper bound on Running placements the exact fallback may enumerate.
    std::size_t exact_search_limit = std::size_t{1} << 20;
};

/// Lifecycle-aware distance-first-fit. Chains are placed tail first and
/// layer-wise across chains, each layer on the furthest clouds that keep the
/// zero-load budget; heads go to base stations. Each (vnf, cloud) target
/// follows target_state of its driving probability: P_{v,b} on base stations,
/// P_e on multiplexing nodes and the root.
PlacementPlan ripple_plan(const PlanningContext& ctx, std::span<const UserDemand> users);

/// The same placement rule driven by realized attachments. If it leaves a user
/// uncovered and the instance is small enough, an exhaustive search over
/// Running placements takes over.
PlacementPlan ideal_plan(const PlanningContext& ctx, std::span<const UserDemand> users);

/// Identical decision to ideal_plan; the engine applies it with real
/// transition times and only on handovers.
PlacementPlan reactive_plan(const PlanningContext& ctx, std::span<const UserDemand> users);

/// Clouds ending up Running for each VNF type if `plan` is carried out.
RunningSets planned_running(const PlacementPlan& plan, const Deployment& d);

/// Steady-state holdings per cloud once `plan` is carried out.
std::vector<ResourceVector> projected_occupancy(const PlacementPlan& plan, const Deployment& d);

/// Re-checks a plan: one target per pair, projected holdings within capacity,
/// and only chain heads on base-station clouds. Returns one message per
/// violation.
std::vector<std::string> check_plan(const PlanningContext& ctx, const PlacementPlan& plan);

}  // namespace ripple
