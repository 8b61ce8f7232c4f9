#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ripple/mobility.hpp"
#include "ripple/topology.hpp"

namespace ripple {

enum class PredictorKind { Oracle, ConstantVelocity };

const char* to_string(PredictorKind k);
PredictorKind parse_predictor(const std::string& name);

struct InsufficientHistory : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Number of predicted positions for a horizon of h seconds at the given tick.
int horizon_ticks(double h, double tick);

/// Future positions over horizon h. ConstantVelocity fits one velocity by least
/// squares over `history` (oldest first, one sample per tick) and extrapolates
/// from the last sample. Oracle copies the true future from `future`, repeating
/// its last element if it is too short.
std::vector<Point> predict_positions(std::span<const Point> history, double h, double tick, PredictorKind kind,
                                     std::span<const Point> future = {});

/// Estimated P(b|l) over net.base_stations(). The surrogate classifier is a
/// distance softmax with its own softness, which may differ from the one that
/// drives real handovers.
std::vector<double> estimate_connection_prob(const Point& where, const SubstrateNetwork& net, double softness);

struct Forecast {
    UserId user = 0;
    double horizon = 0.0;
    std::vector<double> no_connect;  // aligned with net.base_stations()
    std::vector<Point> predicted_positions;
};

struct ForecastInputs {
    Point current;
    std::span<const Point> history;  // last k positions including current, oldest first
    std::span<const Point> future;   // Oracle only
};

/// Probability that the user attaches to none of the ticks' BS b over
/// [now, now + h], treating ticks as independent: the product of
/// (1 - P(b|l_t)) over the current and predicted positions.
Forecast no_connect_over_horizon(UserId user, const ForecastInputs& in, const SubstrateNetwork& net, double h,
                                 double tick, PredictorKind predictor, double estimator_softness);

}  // namespace ripple
