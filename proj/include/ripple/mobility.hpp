#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "ripple/topology.hpp"

namespace ripple {

using UserId = std::uint32_t;

struct GaussMarkovParams {
    double alpha = 0.9;
    double mean_speed = 10.0;       // m/s
    double mean_direction = 0.0;    // radians
    double sigma_speed = 1.0;       // m/s
    double sigma_direction = 0.5;   // radians
    double tick = 1.0;              // seconds
    Point lo{0.0, 0.0};
    Point hi{800.0, 800.0};

    void validate() const;  // throws std::invalid_argument
};

struct GmVelocity {
    double speed = 0.0;
    double direction = 0.0;
};

/// One Gauss-Markov update of speed and direction given two unit-normal draws.
GmVelocity gm_step(const GmVelocity& v, const GaussMarkovParams& p, double w_speed, double w_direction);

/// Position plus Gauss-Markov velocity. Each walker keeps its own mean
/// direction so that reflections at the boundary do not pull it back into the
/// wall.
struct MotionState {
    Point position;
    GmVelocity velocity;
    double mean_direction = 0.0;
};

/// Advances one tick: gm_step, move, reflect at the bounds.
void advance(MotionState& s, const GaussMarkovParams& p, std::mt19937_64& rng);

/// Positions after each of `ticks` steps, starting from `start`. Same seed,
/// same sequence.
std::vector<Point> generate_trace(const MotionState& start, const GaussMarkovParams& p, int ticks,
                                  std::uint64_t seed);

/// Softmax over negative distance, P(b|l) proportional to exp(-d(l,b)/softness),
/// aligned with net.base_stations(). softness <= 0 selects the nearest BS.
std::vector<double> connection_distribution(const Point& where, const SubstrateNetwork& net, double softness);

struct ConnectionModel {
    double softness = 10.0;  // meters
};

/// Samples the base station a user at `where` attaches to.
NodeId realize_connection(const Point& where, const SubstrateNetwork& net, const ConnectionModel& model,
                          std::mt19937_64& rng);

/// Index drawn from a discrete distribution using one uniform variate.
std::size_t sample_index(const std::vector<double>& probs, std::mt19937_64& rng);

struct TraceRow {
    UserId user = 0;
    long tick = 0;
    double x = 0.0;
    double y = 0.0;
    NodeId attached_bs = 0;
    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

/// CSV with header `user_id,tick,x,y,attached_bs`.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows);
std::vector<TraceRow> read_trace_csv(std::istream& is);

}  // namespace ripple
