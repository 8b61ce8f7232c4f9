#include <doctest.h>

#include "ripple/forecast.hpp"

using namespace ripple;

TEST_SUITE("forecast") {

TEST_CASE("horizon ticks round up") {
    CHECK(horizon_ticks(0, 1) == 0);
    CHECK(horizon_ticks(12.63, 1) == 13);
    CHECK(horizon_ticks(12, 1) == 12);
    CHECK(horizon_ticks(2.5, 0.5) == 5);
    CHECK_THROWS_AS(horizon_ticks(-1, 1), std::invalid_argument);
}

TEST_CASE("constant velocity extrapolates a straight line exactly") {
    std::vector<Point> hist{{0, 0}, {2, 1}, {4, 2}, {6, 3}};
    auto out = predict_positions(hist, 3, 1, PredictorKind::ConstantVelocity);
    REQUIRE(out.size() == 3);
    CHECK(out[0].x == doctest::Approx(8));
    CHECK(out[0].y == doctest::Approx(4));
    CHECK(out[2].x == doctest::Approx(12));
    CHECK(out[2].y == doctest::Approx(6));
}

TEST_CASE("constant velocity uses the least-squares slope") {
    std::vector<Point> hist{{0, 0}, {1, 0}, {3, 0}};  // slope 1.5
    auto out = predict_positions(hist, 1, 1, PredictorKind::ConstantVelocity);
    CHECK(out[0].x == doctest::Approx(4.5));
    CHECK_THROWS_AS(predict_positions(std::vector<Point>{{0, 0}}, 1, 1, PredictorKind::ConstantVelocity),
                    InsufficientHistory);
}

TEST_CASE("oracle copies the future and pads with its last point") {
    std::vector<Point> fut{{1, 1}, {2, 2}};
    auto out = predict_positions({}, 4, 1, PredictorKind::Oracle, fut);
    REQUIRE(out.size() == 4);
    CHECK(out[1] == Point{2, 2});
    CHECK(out[3] == Point{2, 2});
    CHECK_THROWS_AS(predict_positions({}, 1, 1, PredictorKind::Oracle, {}), InsufficientHistory);
    CHECK(predict_positions({}, 0, 1, PredictorKind::Oracle, {}).empty());
}

TEST_CASE("no-connect probability multiplies over ticks") {
    auto net = build_tree(2, 1, {{0, 0}, {100, 0}}, {1, 1, 1});
    std::vector<Point> fut{{40, 0}, {100, 0}};
    std::vector<Point> hist{{0, 0}};
    ForecastInputs in{{0, 0}, hist, fut};
    auto f = no_connect_over_horizon(3, in, net, 2, 1, PredictorKind::Oracle, 10);
    CHECK(f.user == 3);
    CHECK(f.predicted_positions.size() == 2);
    double expected0 = 1.0;
    for (const auto& p : {Point{0, 0}, Point{40, 0}, Point{100, 0}})
        expected0 *= 1.0 - estimate_connection_prob(p, net, 10)[0];
    CHECK(f.no_connect[0] == doctest::Approx(expected0));
    CHECK(f.no_connect[0] < 1.0);
    CHECK(f.no_connect[1] < 0.01);  // it ends on top of BS 1

    auto now_only = no_connect_over_horizon(3, in, net, 0, 1, PredictorKind::Oracle, 10);
    CHECK(now_only.no_connect[0] == doctest::Approx(1.0 - estimate_connection_prob({0, 0}, net, 10)[0]));
}

TEST_CASE("predictor names") {
    CHECK(parse_predictor("oracle") == PredictorKind::Oracle);
    CHECK(parse_predictor(to_string(PredictorKind::ConstantVelocity)) == PredictorKind::ConstantVelocity);
    CHECK_THROWS_AS(parse_predictor("lstm"), std::invalid_argument);
}

}
