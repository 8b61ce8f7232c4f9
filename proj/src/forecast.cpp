#include "ripple/forecast.hpp"

#include <cmath>

namespace ripple {

const char* to_string(PredictorKind k) { return k == PredictorKind::Oracle ? "oracle" : "constant_velocity"; }

PredictorKind parse_predictor(const std::string& name) {
    if (name == "oracle") return PredictorKind::Oracle;
    if (name == "constant_velocity" || name == "cv") return PredictorKind::ConstantVelocity;
    throw std::invalid_argument("unknown predictor '" + name + "'");
}

int horizon_ticks(double h, double tick) {
    if (!(h >= 0.0) || !(tick > 0.0)) throw std::invalid_argument("horizon must be >= 0 and tick > 0");
    return static_cast<int>(std::ceil(h / tick - 1e-9));
}

std::vector<Point> predict_positions(std::span<const Point> history, double h, double tick, PredictorKind kind,
                                     std::span<const Point> future) {
    const int n = horizon_ticks(h, tick);
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(n));
    if (kind == PredictorKind::Oracle) {
        if (n > 0 && future.empty()) throw InsufficientHistory("oracle predictor needs the future trace");
        for (int i = 0; i < n; ++i) out.push_back(future[std::min<std::size_t>(i, future.size() - 1)]);
        return out;
    }
    if (n == 0) return out;
    if (history.size() < 2) throw InsufficientHistory("constant-velocity predictor needs at least 2 positions");
    // Least-squares slope of x(t) and y(t) against t = 0..k-1.
    const auto k = static_cast<double>(history.size());
    const double t_mean = (k - 1) / 2.0;
    double sxx = 0, sxy_x = 0, sxy_y = 0, x_mean = 0, y_mean = 0;
    for (const auto& p : history) {
        x_mean += p.x;
        y_mean += p.y;
    }
    x_mean /= k;
    y_mean /= k;
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double dt = static_cast<double>(i) - t_mean;
        sxx += dt * dt;
        sxy_x += dt * (history[i].x - x_mean);
        sxy_y += dt * (history[i].y - y_mean);
    }
    const double vx = sxy_x / sxx;  // per tick
    const double vy = sxy_y / sxx;
    const Point last = history.back();
    for (int i = 1; i <= n; ++i) out.push_back({last.x + vx * i, last.y + vy * i});
    return out;
}

std::vector<double> estimate_connection_prob(const Point& where, const SubstrateNetwork& net, double softness) {
    return connection_distribution(where, net, softness);
}

Forecast no_connect_over_horizon(UserId user, const ForecastInputs& in, const SubstrateNetwork& net, double h,
                                 double tick, PredictorKind predictor, double estimator_softness) {
    Forecast f;
    f.user = user;
    f.horizon = h;
    f.predicted_positions = predict_positions(in.history, h, tick, predictor, in.future);
    f.no_connect.assign(net.base_stations().size(), 1.0);
    auto fold = [&](const Point& where) {
        const auto p = estimate_connection_prob(where, net, estimator_softness);
        for (std::size_t i = 0; i < p.size(); ++i) f.no_connect[i] *= 1.0 - p[i];
    };
    fold(in.current);
    for (const auto& where : f.predicted_positions) fold(where);
    return f;
}

}  // namespace ripple
