#include "ripple/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ripple {

void GaussMarkovParams::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("mobility.alpha must be in [0,1]");
    if (!(tick > 0.0)) throw std::invalid_argument("mobility.tick_s must be positive");
    if (!(sigma_speed >= 0.0 && sigma_direction >= 0.0))
        throw std::invalid_argument("mobility sigmas must be nonnegative");
    if (!(hi.x > lo.x && hi.y > lo.y)) throw std::invalid_argument("mobility bounds are empty");
}

GmVelocity gm_step(const GmVelocity& v, const GaussMarkovParams& p, double w_speed, double w_direction) {
    const double a = p.alpha;
    const double noise = std::sqrt(1.0 - a * a);
    return {a * v.speed + (1.0 - a) * p.mean_speed + noise * p.sigma_speed * w_speed,
            a * v.direction + (1.0 - a) * p.mean_direction + noise * p.sigma_direction * w_direction};
}

namespace {

// Mirror a coordinate into [lo, hi]; returns true when an odd number of
// reflections happened.
bool reflect(double& x, double lo, double hi) {
    bool flipped = false;
    while (x < lo || x > hi) {
        if (x < lo) x = 2 * lo - x;
        if (x > hi) x = 2 * hi - x;
        flipped = !flipped;
    }
    return flipped;
}

}  // namespace

void advance(MotionState& s, const GaussMarkovParams& p, std::mt19937_64& rng) {
    std::normal_distribution<double> unit(0.0, 1.0);
    const double w1 = unit(rng);
    const double w2 = unit(rng);
    GaussMarkovParams local = p;
    local.mean_direction = s.mean_direction;
    s.velocity = gm_step(s.velocity, local, w1, w2);

    s.position.x += p.tick * s.velocity.speed * std::cos(s.velocity.direction);
    s.position.y += p.tick * s.velocity.speed * std::sin(s.velocity.direction);
    if (reflect(s.position.x, p.lo.x, p.hi.x)) {
        s.velocity.direction = std::numbers::pi - s.velocity.direction;
        s.mean_direction = std::numbers::pi - s.mean_direction;
    }
    if (reflect(s.position.y, p.lo.y, p.hi.y)) {
        s.velocity.direction = -s.velocity.direction;
        s.mean_direction = -s.mean_direction;
    }
    // Keep both angles near the origin without changing their difference.
    const double wraps = std::floor(s.mean_direction / (2 * std::numbers::pi));
    s.mean_direction -= wraps * 2 * std::numbers::pi;
    s.velocity.direction -= wraps * 2 * std::numbers::pi;
}

std::vector<Point> generate_trace(const MotionState& start, const GaussMarkovParams& p, int ticks,
                                  std::uint64_t seed) {
    p.validate();
    std::vector<Point> out;
    if (ticks <= 0) return out;
    out.reserve(static_cast<std::size_t>(ticks));
    std::mt19937_64 rng(seed);
    MotionState s = start;
    for (int i = 0; i < ticks; ++i) {
        advance(s, p, rng);
        out.push_back(s.position);
    }
    return out;
}

std::vector<double> connection_distribution(const Point& where, const SubstrateNetwork& net, double softness) {
    const auto& bss = net.base_stations();
    std::vector<double> d(bss.size());
    for (std::size_t i = 0; i < bss.size(); ++i) d[i] = distance(where, *net.node(bss[i]).position);
    const double dmin = *std::min_element(d.begin(), d.end());
    std::vector<double> p(bss.size(), 0.0);
    if (!(softness > 0.0)) {
        auto it = std::min_element(d.begin(), d.end());
        p[static_cast<std::size_t>(it - d.begin())] = 1.0;
        return p;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        p[i] = std::exp(-(d[i] - dmin) / softness);
        total += p[i];
    }
    for (auto& x : p) x /= total;
    return p;
}

std::size_t sample_index(const std::vector<double>& probs, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double r = u(rng);
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        acc += probs[i];
        last_positive = i;
        if (r < acc) return i;
    }
    return last_positive;
}

NodeId realize_connection(const Point& where, const SubstrateNetwork& net, const ConnectionModel& model,
                          std::mt19937_64& rng) {
    auto probs = connection_distribution(where, net, model.softness);
    return net.base_stations()[sample_index(probs, rng)];
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
    os << "user_id,tick,x,y,attached_bs\n";
    auto old = os.precision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : rows) os << r.user << ',' << r.tick << ',' << r.x << ',' << r.y << ',' << r.attached_bs << '\n';
    os.precision(old);
}

std::vector<TraceRow> read_trace_csv(std::istream& is) {
    std::vector<TraceRow> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || (lineno == 1 && line.rfind("user_id", 0) == 0)) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        TraceRow r;
        if (!(ls >> r.user >> r.tick >> r.x >> r.y >> r.attached_bs))
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": expected user_id,tick,x,y,attached_bs");
        rows.push_back(r);
    }
    return rows;
}

}  // namespace ripple
