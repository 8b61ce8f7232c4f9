#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracle.hpp"
#include "ripple/policy.hpp"

using namespace ripple;
using S = LifecycleState;

namespace {

Deployment fresh(std::size_t types, const SubstrateNetwork& net, ResourceVector demand = {1, 1, 1}) {
    return Deployment(std::vector<ResourceVector>(types, demand), net.size());
}

UserDemand user_at(UserId u, SfcId sfc, NodeId bs, const SubstrateNetwork& net, std::vector<double> connect = {}) {
    auto d = realized_demand(u, sfc, bs, net);
    if (!connect.empty()) d.connect = std::move(connect);
    return d;
}

std::vector<std::vector<bool>> as_flags(const RunningSets& rs, std::size_t n) {
    std::vector<std::vector<bool>> out(rs.size(), std::vector<bool>(n, false));
    for (std::size_t v = 0; v < rs.size(); ++v)
        for (NodeId e : rs[v]) out[v][e] = true;
    return out;
}

std::vector<std::vector<bool>> running_flags(const std::vector<std::vector<S>>& fin) {
    std::vector<std::vector<bool>> out(fin.size());
    for (std::size_t v = 0; v < fin.size(); ++v)
        for (auto s : fin[v]) out[v].push_back(s == S::Running);
    return out;
}

}  // namespace

TEST_SUITE("policy") {

TEST_CASE("per-BS demand probability") {
    std::vector<Forecast> fc(2);
    fc[0].user = 4;
    fc[0].no_connect = {0.3, 0.5};
    fc[1].user = 9;
    fc[1].no_connect = {1.0, 0.5};
    const std::vector<UserId> one{4}, both{4, 9}, none{};
    CHECK(vnf_demand_prob(0, fc, one) == doctest::Approx(0.7));
    CHECK(vnf_demand_prob(1, fc, both) == doctest::Approx(0.75));
    CHECK(vnf_demand_prob(1, fc, none) == 0.0);
    const std::vector<UserId> missing{5};
    CHECK_THROWS_AS(vnf_demand_prob(0, fc, missing), MissingForecast);
    CHECK_THROWS_AS(vnf_demand_prob(2, fc, one), MissingForecast);
    const std::vector<double> q{0.5, 0.5};
    CHECK(demand_from_no_connect(q) == doctest::Approx(0.75));
}

TEST_CASE("aggregation-node demand probability") {
    CHECK(mux_demand_prob(std::vector<double>{0.6}) == doctest::Approx(0.6));
    CHECK(mux_demand_prob(std::vector<double>{0.75, 0.5}) == doctest::Approx(0.875));
    CHECK(mux_demand_prob(std::vector<double>{0, 0, 0}) == 0.0);
    CHECK(mux_demand_prob(std::vector<double>{}) == 0.0);
}

TEST_CASE("lifecycle targets from probability") {
    LifecycleThresholds t;
    CHECK(target_state(1.0, t) == S::Running);
    CHECK(target_state(0.0, t) == S::Descriptor);
    CHECK(target_state(t.run, t) == S::Running);
    CHECK(target_state(t.stage, t) == S::Stopped);
    CHECK(target_state(t.fetch, t) == S::Image);
    CHECK(target_state(0.59, t) == S::Stopped);
    CHECK(target_state(0.09, t) == S::Descriptor);
    CHECK_NOTHROW(t.validate());
    CHECK_THROWS_AS((LifecycleThresholds{0.3, 0.3, 0.1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((LifecycleThresholds{0.6, 0.3, 0.0}.validate()), std::invalid_argument);
}

TEST_CASE("preparation is monotone in connection probability") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1);
    LifecycleThresholds t;
    for (int i = 0; i < 2000; ++i) {
        std::vector<Forecast> fc(3);
        for (UserId k = 0; k < 3; ++k) {
            fc[k].user = k;
            fc[k].no_connect = {u(rng)};
        }
        const std::vector<UserId> users{0, 1, 2};
        const double before = vnf_demand_prob(0, fc, users);
        fc[1].no_connect[0] *= u(rng);  // user 1 more likely to attach
        const double after = vnf_demand_prob(0, fc, users);
        REQUIRE(after >= before - 1e-15);
        REQUIRE(readiness(target_state(after, t)) >= readiness(target_state(before, t)));
    }
}

TEST_CASE("forecast demand honours the attachment floor") {
    auto net = build_tree(2, 1, {{0, 0}, {200, 0}}, {1, 1, 1});
    Forecast f;
    f.no_connect = {0.9, 0.2};
    auto soft = demand_from_forecast(0, 0, 0, f, net, false);
    CHECK(soft.connect[0] == doctest::Approx(0.1));
    CHECK(soft.connect[1] == doctest::Approx(0.8));
    auto floored = demand_from_forecast(0, 0, 0, f, net, true);
    CHECK(floored.connect[0] == 1.0);
    CHECK(floored.connect[1] == doctest::Approx(0.8));
    CHECK_THROWS_AS(realized_demand(0, 0, 2, net), std::invalid_argument);
}

TEST_CASE("single one-VNF chain goes to the most likely BS") {
    auto net = build_tree(4, 2, grid_positions(2, 2, 200), {5, 8, 10});
    std::vector<SfcRequest> sfcs{{0, {0}, 1e-3, {1e-4}}};
    auto dep = fresh(1, net);
    PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
    std::vector<UserDemand> users{user_at(0, 0, 1, net, {0.2, 0.9, 0.3, 0.0})};
    auto plan = ripple_plan(ctx, users);
    REQUIRE(plan.find(0, 1));
    CHECK(plan.find(0, 1)->state == S::Running);
    CHECK(plan.find(0, 2)->state == S::Stopped);
    CHECK(plan.find(0, 0)->state == S::Image);
    CHECK_FALSE(plan.find(0, 3));
    CHECK(plan.infeasible.empty());
    CHECK(check_plan(ctx, plan).empty());
}

TEST_CASE("users converging on one BS share deeper tails") {
    auto net = build_tree(4, 2, grid_positions(2, 2, 200), {5, 8, 10});
    std::vector<SfcRequest> sfcs{{0, {0, 2}, 1e-3, {1e-4, 1e-4}}, {1, {1, 2}, 1e-3, {1e-4, 1e-4}}};
    auto dep = fresh(3, net);
    PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
    std::vector<UserDemand> users{user_at(0, 0, 3, net), user_at(1, 1, 3, net)};
    auto plan = ripple_plan(ctx, users);
    auto running = planned_running(plan, dep);
    CHECK(running[0] == std::vector<NodeId>{3});
    CHECK(running[1] == std::vector<NodeId>{3});
    REQUIRE(running[2].size() == 1);
    CHECK_FALSE(net.is_base_station(running[2][0]));
    CHECK(check_plan(ctx, plan).empty());
}

TEST_CASE("four-VNF chain: head at the BS, tails deeper, confirmed by enumeration") {
    auto net = build_tree(16, 4, grid_positions(4, 4, 200), {5, 8, 10});
    std::vector<SfcRequest> sfcs{{0, {0, 1, 2, 3}, 1e-3, {1e-4, 1e-4, 1e-4, 1e-4}}};
    auto dep = fresh(4, net);
    PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
    std::vector<UserDemand> users{user_at(0, 0, 5, net)};
    auto plan = ripple_plan(ctx, users);
    CHECK(plan.infeasible.empty());
    CHECK(check_plan(ctx, plan).empty());

    const auto running = planned_running(plan, dep);
    auto emb = embed_links(0, 5, sfcs[0], net, running);
    REQUIRE(std::holds_alternative<Embedding>(emb));
    const auto& hops = std::get<Embedding>(emb).hops;
    CHECK(hops[0].cloud == 5);
    for (std::size_t l = 1; l < 4; ++l) CHECK_FALSE(net.is_base_station(hops[l].cloud));

    // Every assignment of the four layers to clouds, checked against the budget.
    const auto h = oracle::hop_matrix(net);
    const auto n = static_cast<NodeId>(net.size());
    std::size_t feasible = 0;
    bool plan_found = false;
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = 0; b < n; ++b)
            for (NodeId c = 0; c < n; ++c)
                for (NodeId d = 0; d < n; ++d) {
                    const int total = h[5][a] + h[a][b] + h[b][c] + h[c][d];
                    if (oracle::zero_load(total, 10000, sfcs[0], ctx.delay) > 1e-3 + 1e-12) continue;
                    ++feasible;
                    if (a == hops[0].cloud && b == hops[1].cloud && c == hops[2].cloud && d == hops[3].cloud)
                        plan_found = true;
                }
    CHECK(feasible > 0);
    CHECK(plan_found);
}

TEST_CASE("ideal matches ripple under a perfect forecast on an empty network") {
    auto net = build_tree(16, 4, grid_positions(4, 4, 200), {5, 8, 10});
    std::vector<SfcRequest> sfcs{{0, {0, 1, 2, 3}, 1e-3, {1e-4, 1e-4, 1e-4, 1e-4}}};
    auto dep = fresh(4, net);
    PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
    for (NodeId bs = 0; bs < 16; ++bs) {
        std::vector<UserDemand> users{user_at(0, 0, bs, net)};
        CHECK(planned_running(ideal_plan(ctx, users), dep) == planned_running(ripple_plan(ctx, users), dep));
        auto a = reactive_plan(ctx, users);
        auto b = ideal_plan(ctx, users);
        REQUIRE(a.targets.size() == b.targets.size());
        for (std::size_t i = 0; i < a.targets.size(); ++i) {
            CHECK(a.targets[i].vnf == b.targets[i].vnf);
            CHECK(a.targets[i].cloud == b.targets[i].cloud);
            CHECK(a.targets[i].state == b.targets[i].state);
        }
    }
}

TEST_CASE("a saturated cloud pushes the overflow to the next candidate") {
    // BS 0 - mux 1 - root 2 in a line; the root has room for one copy.
    std::vector<SubstrateNode> nodes{{0, NodeKind::BaseStation, Point{0, 0}, EdgeCloud({5, 5, 5})},
                                     {1, NodeKind::Multiplexing, std::nullopt, EdgeCloud({5, 5, 5})},
                                     {2, NodeKind::Root, std::nullopt, EdgeCloud({1, 5, 5})}};
    SubstrateNetwork net(nodes, {{0, 1, LinkKind::Wired, 10000, 0}, {1, 2, LinkKind::Wired, 10000, 0}});
    std::vector<SfcRequest> sfcs{{0, {0, 1, 2}, 1e-3, {1e-4, 1e-4, 1e-4}}};
    auto dep = fresh(3, net);
    PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
    std::vector<UserDemand> users{user_at(0, 0, 0, net)};
    auto running = planned_running(ideal_plan(ctx, users), dep);
    CHECK(running[2] == std::vector<NodeId>{2});
    CHECK(running[1] == std::vector<NodeId>{1});
    CHECK(running[0] == std::vector<NodeId>{0});
}

TEST_CASE("a running copy in reach is kept rather than duplicated") {
    auto net = build_tree(4, 2, grid_positions(2, 2, 200), {5, 8, 10});
    std::vector<SfcRequest> sfcs{{0, {0, 1}, 1e-3, {1e-4, 1e-4}}};
    auto dep = fresh(2, net);
    dep.at(1, 4).state = S::Running;  // tail on the user's own mux
    PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
    std::vector<UserDemand> users{user_at(0, 0, 1, net)};
    auto running = planned_running(ripple_plan(ctx, users), dep);
    CHECK(running[1] == std::vector<NodeId>{4});
}

TEST_CASE("abandoned running copies are demoted by the configured rule") {
    auto net = build_tree(2, 1, {{0, 0}, {200, 0}}, {2, 2, 2});
    std::vector<SfcRequest> sfcs{{0, {0}, 1e-3, {1e-4}}};
    std::vector<UserDemand> users{user_at(0, 0, 1, net)};
    {
        auto dep = fresh(1, net);
        dep.at(0, 0).state = S::Running;
        PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
        auto plan = ideal_plan(ctx, users);
        REQUIRE(plan.find(0, 0));
        CHECK(plan.find(0, 0)->state == S::Paused);
        CHECK_FALSE(plan.find(0, 0)->wanted);
        CHECK(plan.find(0, 1)->state == S::Running);
        // Demotions are listed before wanted targets.
        CHECK(plan.targets.front().cloud == 0);
    }
    {
        auto dep = fresh(1, net);
        dep.at(0, 0).state = S::Running;
        auto tight = build_tree(2, 1, {{0, 0}, {200, 0}}, {2, 1, 2});
        PlanningContext ctx{tight, sfcs, dep, {}, {}, DemotionRule::Auto};
        auto plan = ripple_plan(ctx, users);
        CHECK(plan.find(0, 0)->state == S::Stopped);  // no memory to stay paused
    }
    {
        auto dep = fresh(1, net);
        dep.at(0, 0).state = S::Running;
        PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Stopped};
        CHECK(ripple_plan(ctx, users).find(0, 0)->state == S::Stopped);
    }
    CHECK(parse_demotion("paused") == DemotionRule::Paused);
    CHECK(parse_demotion(to_string(DemotionRule::Auto)) == DemotionRule::Auto);
    CHECK_THROWS_AS(parse_demotion("sleep"), std::invalid_argument);
}

TEST_CASE("chains that cannot meet the budget are reported") {
    auto net = build_tree(2, 1, {{0, 0}, {200, 0}}, {0, 0, 0});
    std::vector<SfcRequest> sfcs{{0, {0}, 1e-3, {1e-4}}};
    auto dep = fresh(1, net);
    PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
    std::vector<UserDemand> users{user_at(3, 0, 1, net)};
    for (const auto& plan : {ripple_plan(ctx, users), ideal_plan(ctx, users)}) {
        REQUIRE(plan.infeasible.size() == 1);
        CHECK(plan.infeasible[0].user == 3);
        CHECK(plan.infeasible[0].bs == 1);
        CHECK(plan.infeasible[0].layer == 0);
    }
}

TEST_CASE("plan checker flags illegal plans") {
    auto net = build_tree(2, 1, {{0, 0}, {200, 0}}, {1, 1, 1});
    std::vector<SfcRequest> sfcs{{0, {0, 1}, 1e-3, {1e-4, 1e-4}}};
    auto dep = fresh(2, net);
    PlanningContext ctx{net, sfcs, dep, {}, {}, DemotionRule::Auto};
    PlacementPlan dup;
    dup.targets = {{0, 0, S::Running, 1, true}, {0, 0, S::Stopped, 1, true}};
    CHECK(check_plan(ctx, dup).size() == 1);
    PlacementPlan over;
    over.targets = {{0, 2, S::Running, 1, true}, {1, 2, S::Running, 1, true}};
    CHECK(check_plan(ctx, over).size() == 1);
    PlacementPlan tail_at_bs;
    tail_at_bs.targets = {{1, 0, S::Running, 1, true}};
    CHECK(check_plan(ctx, tail_at_bs).size() == 1);
    PlacementPlan ok;
    ok.targets = {{0, 0, S::Running, 1, true}, {1, 2, S::Running, 1, true}};
    CHECK(check_plan(ctx, ok).empty());
    CHECK(projected_occupancy(ok, dep)[2] == ResourceVector{1, 1, 1});
    CHECK(planned_running(ok, dep)[1] == std::vector<NodeId>{2});
}

TEST_CASE("small instances: plans are legal and ideal is optimal") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 150; ++trial) {
        CAPTURE(trial);
        auto inst = oracle::make_small_instance(rng, trial % 2 == 1);
        PlanningContext ctx{inst.net, inst.sfcs, inst.deployment, {}, {}, DemotionRule::Auto};

        auto rp = ripple_plan(ctx, inst.forecast_users);
        CHECK(check_plan(ctx, rp).empty());
        const auto fin = oracle::final_states(rp, inst.deployment);
        for (NodeId e = 0; e < inst.net.size(); ++e) {
            ResourceVector held;
            for (VnfType v = 0; v < inst.deployment.num_types(); ++v)
                held += oracle::held_in(fin[v][e], inst.deployment.demand(v));
            CHECK(held.fits_within(inst.net.edge_cloud(e).capacity()));
        }
        std::vector<UserDemand> claimed;
        for (const auto& u : inst.forecast_users) {
            const bool listed = std::any_of(rp.infeasible.begin(), rp.infeasible.end(),
                                            [&](const InfeasibleChain& c) { return c.user == u.user; });
            if (!listed) claimed.push_back(u);
        }
        CHECK(oracle::stranded(inst.net, inst.sfcs, claimed, running_flags(fin), ctx.delay) == 0);

        if (trial % 2 == 0) {
            auto ip = ideal_plan(ctx, inst.realized_users);
            const auto ifin = oracle::final_states(ip, inst.deployment);
            const int got = oracle::stranded(inst.net, inst.sfcs, inst.realized_users, running_flags(ifin), ctx.delay);
            std::vector<ResourceVector> demand;
            for (VnfType v = 0; v < inst.deployment.num_types(); ++v) demand.push_back(inst.deployment.demand(v));
            CHECK(got == oracle::min_stranded(inst.net, inst.sfcs, demand, inst.realized_users, ctx.delay));
            CHECK(as_flags(planned_running(ip, inst.deployment), inst.net.size()) == running_flags(ifin));
        }
    }
}

TEST_CASE("planning is deterministic") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = oracle::make_small_instance(rng, true);
        PlanningContext ctx{inst.net, inst.sfcs, inst.deployment, {}, {}, DemotionRule::Auto};
        auto a = ripple_plan(ctx, inst.forecast_users);
        auto b = ripple_plan(ctx, inst.forecast_users);
        REQUIRE(a.targets.size() == b.targets.size());
        for (std::size_t i = 0; i < a.targets.size(); ++i) {
            CHECK(a.targets[i].vnf == b.targets[i].vnf);
            CHECK(a.targets[i].cloud == b.targets[i].cloud);
            CHECK(a.targets[i].state == b.targets[i].state);
        }
    }
}

}
