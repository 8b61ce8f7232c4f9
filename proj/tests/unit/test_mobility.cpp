#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "ripple/mobility.hpp"

using namespace ripple;

namespace {

GaussMarkovParams box(double alpha) {
    GaussMarkovParams p;
    p.alpha = alpha;
    p.lo = {0, 0};
    p.hi = {400, 300};
    return p;
}

}  // namespace

TEST_SUITE("mobility") {

TEST_CASE("Gauss-Markov step at the extremes of alpha") {
    auto p = box(1.0);
    GmVelocity v{7.0, 0.3};
    auto same = gm_step(v, p, 2.0, -1.0);
    CHECK(same.speed == 7.0);
    CHECK(same.direction == 0.3);

    p = box(0.0);
    p.mean_speed = 10;
    p.mean_direction = 1.0;
    p.sigma_speed = 2;
    p.sigma_direction = 0.5;
    auto fresh = gm_step(v, p, 1.5, -2.0);
    CHECK(fresh.speed == doctest::Approx(10 + 2 * 1.5));
    CHECK(fresh.direction == doctest::Approx(1.0 - 0.5 * 2.0));
}

TEST_CASE("Gauss-Markov step for intermediate alpha") {
    auto p = box(0.6);
    p.mean_speed = 10;
    p.sigma_speed = 1;
    p.sigma_direction = 0;
    auto next = gm_step({4, 0}, p, 1.0, 0.0);
    CHECK(next.speed == doctest::Approx(0.6 * 4 + 0.4 * 10 + 0.8));
}

TEST_CASE("walkers stay inside the bounds") {
    auto p = box(0.8);
    p.mean_speed = 40;
    MotionState s{{200, 150}, {40, 0.7}, 0.7};
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20000; ++i) {
        advance(s, p, rng);
        REQUIRE(s.position.x >= 0);
        REQUIRE(s.position.x <= 400);
        REQUIRE(s.position.y >= 0);
        REQUIRE(s.position.y <= 300);
    }
}

TEST_CASE("traces are reproducible") {
    auto p = box(0.9);
    MotionState s{{100, 100}, {10, 0}, 0};
    CHECK(generate_trace(s, p, 50, 5) == generate_trace(s, p, 50, 5));
    CHECK(generate_trace(s, p, 50, 5) != generate_trace(s, p, 50, 6));
    CHECK(generate_trace(s, p, 0, 5).empty());
}

TEST_CASE("step lengths follow the speed when nothing reflects") {
    auto p = box(1.0);
    p.hi = {1e6, 1e6};
    MotionState s{{1000, 1000}, {12, 0.4}, 0.4};
    auto trace = generate_trace(s, p, 10, 1);
    Point prev = s.position;
    for (const auto& q : trace) {
        CHECK(distance(prev, q) == doctest::Approx(12.0));
        prev = q;
    }
}

TEST_CASE("parameter validation") {
    auto p = box(0.5);
    CHECK_NOTHROW(p.validate());
    p.alpha = 1.5;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = box(0.5);
    p.hi = p.lo;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = box(0.5);
    p.tick = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("connection distribution is a softmax over distance") {
    auto net = build_tree(2, 1, {{0, 0}, {100, 0}}, {1, 1, 1});
    auto p = connection_distribution({20, 0}, net, 10);
    REQUIRE(p.size() == 2);
    CHECK(p[0] + p[1] == doctest::Approx(1.0));
    CHECK(p[1] / p[0] == doctest::Approx(std::exp(-6.0)));
    auto hard = connection_distribution({60, 0}, net, 0);
    CHECK(hard == std::vector<double>{0.0, 1.0});
}

TEST_CASE("sampled attachments follow the distribution") {
    auto net = build_tree(3, 1, {{0, 0}, {30, 0}, {60, 0}}, {1, 1, 1});
    auto p = connection_distribution({25, 0}, net, 20);
    std::mt19937_64 rng(1);
    std::vector<int> hits(3, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto b = realize_connection({25, 0}, net, ConnectionModel{20}, rng);
        ++hits[b];
    }
    for (int b = 0; b < 3; ++b) CHECK(hits[b] / double(n) == doctest::Approx(p[b]).epsilon(0.02));
    CHECK(sample_index({0.0, 0.0, 1.0}, rng) == 2);
}

TEST_CASE("trace CSV round-trip") {
    std::vector<TraceRow> rows{{0, 0, 1.5, 2.25, 3}, {1, 4, 0.1, 1e-7, 0}};
    std::stringstream ss;
    write_trace_csv(ss, rows);
    CHECK(ss.str().rfind("user_id,tick,x,y,attached_bs\n", 0) == 0);
    CHECK(read_trace_csv(ss) == rows);
    std::istringstream bad("user_id,tick,x,y,attached_bs\n0,1,2\n");
    CHECK_THROWS_AS(read_trace_csv(bad), std::runtime_error);
}

}
