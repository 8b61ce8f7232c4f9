#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "ripple/linkmap.hpp"

using namespace ripple;

TEST_SUITE("linkmap") {

TEST_CASE("greedy embedding picks the closest running copy per layer") {
    auto net = build_tree(4, 2, grid_positions(2, 2, 200), {1, 1, 1});  // BS 0-3, mux 4,5, root 6
    SfcRequest sfc{0, {0, 1}, 1e-3, {1e-4, 1e-4}};
    RunningSets running{{1, 4}, {5, 6}};
    auto r = embed_links(7, 0, sfc, net, running);
    REQUIRE(std::holds_alternative<Embedding>(r));
    const auto& e = std::get<Embedding>(r);
    CHECK(e.user == 7);
    REQUIRE(e.hops.size() == 2);
    CHECK(e.hops[0].cloud == 4);
    CHECK(e.hops[1].cloud == 6);
    CHECK(e.total_path == std::vector<NodeId>{0, 4, 6});
}

TEST_CASE("ties go to the lowest id and co-location adds no hops") {
    auto net = build_tree(4, 2, grid_positions(2, 2, 200), {1, 1, 1});
    SfcRequest sfc{0, {0, 1}, 1e-3, {1e-4, 1e-4}};
    auto r = embed_links(0, 4, sfc, net, {{0, 1}, {0}});  // 4 is a mux; 0 and 1 both one hop away
    const auto& e = std::get<Embedding>(r);
    CHECK(e.hops[0].cloud == 0);
    CHECK(e.hops[1].cloud == 0);
    CHECK(e.hops[1].segment.empty());
    CHECK(e.total_path == std::vector<NodeId>{4, 0});
}

TEST_CASE("a layer without a running copy is reported") {
    auto net = build_tree(2, 1, {{0, 0}, {1, 0}}, {1, 1, 1});
    SfcRequest sfc{0, {0, 1, 2}, 1e-3, {0, 0, 0}};
    auto r = embed_links(0, 0, sfc, net, {{0}, {}, {1}});
    REQUIRE(std::holds_alternative<MissingVnf>(r));
    CHECK(std::get<MissingVnf>(r).layer == 1);
    CHECK(std::get<MissingVnf>(r).vnf == 1);
}

TEST_CASE("embedding length matches the reference greedy walk") {
    std::mt19937_64 rng(5);
    auto net = build_tree(16, 4, grid_positions(4, 4, 200), {1, 1, 1});
    const auto hops = oracle::hop_matrix(net);
    SfcRequest sfc{0, {0, 1, 2, 3}, 1e-3, {0, 0, 0, 0}};
    for (int trial = 0; trial < 500; ++trial) {
        RunningSets running(4);
        std::vector<std::vector<bool>> flags(4, std::vector<bool>(net.size(), false));
        for (VnfType v = 0; v < 4; ++v)
            for (NodeId e = 0; e < net.size(); ++e)
                if (rng() % 6 == 0) {
                    running[v].push_back(e);
                    flags[v][e] = true;
                }
        const NodeId bs = static_cast<NodeId>(rng() % 16);
        auto r = embed_links(0, bs, sfc, net, running);
        auto ref = oracle::greedy_hops(hops, bs, sfc, flags);
        REQUIRE(std::holds_alternative<Embedding>(r) == ref.has_value());
        if (ref) CHECK(std::get<Embedding>(r).total_path.size() == static_cast<std::size_t>(*ref) + 1);
    }
}

TEST_CASE("running sets skip instances in flight") {
    Deployment d(std::vector<ResourceVector>(2, {1, 1, 1}), 3);
    d.at(0, 2).state = LifecycleState::Running;
    d.at(1, 0).state = LifecycleState::Running;
    d.at(1, 0).in_flight = InFlight{LifecycleState::Paused, 1.0};
    d.at(1, 1).state = LifecycleState::Paused;
    auto rs = running_sets(d);
    CHECK(rs[0] == std::vector<NodeId>{2});
    CHECK(rs[1].empty());
}

TEST_CASE("chain validation") {
    CHECK_THROWS_AS((SfcRequest{0, {}, 1e-3, {}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SfcRequest{0, {0}, 0.0, {0}}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SfcRequest{0, {0}, 1e-3, {}}.validate()), std::invalid_argument);
    CHECK_NOTHROW((SfcRequest{0, {0, 1}, 1e-3, {0, 1e-4}}.validate()));
}

}
