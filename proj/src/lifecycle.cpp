#include "ripple/lifecycle.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace ripple {

namespace {

std::size_t idx(LifecycleState s) { return static_cast<std::size_t>(s); }

}  // namespace

const char* to_string(LifecycleState s) {
    switch (s) {
        case LifecycleState::Descriptor: return "Descriptor";
        case LifecycleState::Source: return "Source";
        case LifecycleState::Image: return "Image";
        case LifecycleState::Stopped: return "Stopped";
        case LifecycleState::Running: return "Running";
        case LifecycleState::Paused: return "Paused";
    }
    return "?";
}

std::optional<LifecycleState> parse_state(const std::string& name) {
    for (auto s : kAllStates) {
        std::string a = to_string(s), b = name;
        for (auto& c : a) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        for (auto& c : b) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (a == b) return s;
    }
    return std::nullopt;
}

int readiness(LifecycleState s) {
    switch (s) {
        case LifecycleState::Descriptor: return 0;
        case LifecycleState::Source: return 1;
        case LifecycleState::Image: return 2;
        case LifecycleState::Stopped: return 3;
        case LifecycleState::Paused: return 4;
        case LifecycleState::Running: return 5;
    }
    return 0;
}

TransitionTable::TransitionTable() {
    for (auto& row : seconds_) row.fill(-1.0);
}

void TransitionTable::set(LifecycleState from, LifecycleState to, double seconds) {
    if (from == to) throw IllegalEdge("self-loop transitions are not allowed");
    if (!(seconds >= 0.0)) throw std::invalid_argument("transition durations must be >= 0");
    seconds_[idx(from)][idx(to)] = seconds;
}

std::optional<double> TransitionTable::duration(LifecycleState from, LifecycleState to) const {
    double s = seconds_[idx(from)][idx(to)];
    if (s < 0.0) return std::nullopt;
    return s;
}

std::vector<Edge> TransitionTable::edges() const {
    std::vector<Edge> out;
    for (auto f : kAllStates)
        for (auto t : kAllStates)
            if (auto d = duration(f, t)) out.push_back({f, t, *d});
    return out;
}

std::vector<Edge> TransitionTable::route_to(LifecycleState from, LifecycleState to) const {
    if (from == to) return {};
    // Dijkstra over six states keyed on (seconds, edge count).
    using Key = std::pair<double, int>;
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::array<Key, 6> best;
    best.fill({inf, 0});
    std::array<int, 6> prev;
    prev.fill(-1);
    std::array<bool, 6> done{};
    best[idx(from)] = {0.0, 0};
    for (int iter = 0; iter < 6; ++iter) {
        int u = -1;
        for (int s = 0; s < 6; ++s)
            if (!done[s] && best[s].first < inf && (u < 0 || best[s] < best[u])) u = s;
        if (u < 0) break;
        done[u] = true;
        for (int w = 0; w < 6; ++w) {
            double d = seconds_[u][w];
            if (d < 0.0 || done[w]) continue;
            Key cand{best[u].first + d, best[u].second + 1};
            if (cand < best[w]) {
                best[w] = cand;
                prev[w] = u;
            }
        }
    }
    if (prev[idx(to)] < 0) {
        std::ostringstream msg;
        msg << "no route from " << to_string(from) << " to " << to_string(to);
        throw IllegalEdge(msg.str());
    }
    std::vector<Edge> route;
    for (int s = static_cast<int>(idx(to)); s != static_cast<int>(idx(from)); s = prev[s]) {
        auto f = static_cast<LifecycleState>(prev[s]);
        auto t = static_cast<LifecycleState>(s);
        route.insert(route.begin(), Edge{f, t, seconds_[prev[s]][s]});
    }
    return route;
}

double TransitionTable::route_seconds(LifecycleState from, LifecycleState to) const {
    // Neumaier summation so that e.g. 12 + 0 + 0.1 + 0.53 lands on the double 12.63.
    double sum = 0.0, comp = 0.0;
    for (const auto& e : route_to(from, to)) {
        double t = sum + e.seconds;
        comp += std::abs(sum) >= std::abs(e.seconds) ? (sum - t) + e.seconds : (e.seconds - t) + sum;
        sum = t;
    }
    return sum + comp;
}

TransitionTable TransitionTable::instantaneous() const {
    TransitionTable t;
    for (const auto& e : edges()) t.set(e.from, e.to, 0.0);
    return t;
}

ResourceVector TransitionTable::footprint(LifecycleState state, const ResourceVector& demand) {
    switch (state) {
        case LifecycleState::Descriptor: return {};
        case LifecycleState::Source:
        case LifecycleState::Image:
        case LifecycleState::Stopped: return {0, 0, demand.disk};
        case LifecycleState::Paused: return {0, demand.memory, demand.disk};
        case LifecycleState::Running: return demand;
    }
    return {};
}

TransitionTable default_transition_table() {
    using S = LifecycleState;
    TransitionTable t;
    t.set(S::Descriptor, S::Source, 12.0);  // download
    t.set(S::Source, S::Image, 0.0);        // build, folded into the download
    t.set(S::Image, S::Stopped, 0.1);       // deploy
    t.set(S::Stopped, S::Running, 0.53);    // start
    t.set(S::Running, S::Paused, 0.096);    // pause
    t.set(S::Paused, S::Running, 0.096);    // resume, taken equal to pause
    t.set(S::Running, S::Stopped, 0.53);    // stop, taken equal to start
    t.set(S::Stopped, S::Image, 0.0);
    t.set(S::Image, S::Source, 0.0);
    t.set(S::Source, S::Descriptor, 0.0);
    return t;
}

ResourceVector VnfInstance::held(const ResourceVector& demand) const {
    auto fp = TransitionTable::footprint(state, demand);
    if (in_flight) fp = ResourceVector::max(fp, TransitionTable::footprint(in_flight->target, demand));
    return fp;
}

double begin_transition(VnfInstance& inst, LifecycleState target, double now, const TransitionTable& table,
                        EdgeCloud& ec, const ResourceVector& demand) {
    if (inst.in_flight) throw TransitionInFlight("instance already has a transition in flight");
    auto d = table.duration(inst.state, target);
    if (!d) {
        std::ostringstream msg;
        msg << "no FSM edge " << to_string(inst.state) << " -> " << to_string(target);
        throw IllegalEdge(msg.str());
    }
    const auto current = TransitionTable::footprint(inst.state, demand);
    const auto peak = ResourceVector::max(current, TransitionTable::footprint(target, demand));
    ec.reserve(peak - current);  // throws InsufficientResources before any mutation
    inst.in_flight = InFlight{target, now + *d};
    return now + *d;
}

void complete_transition(VnfInstance& inst, double now, EdgeCloud& ec, const ResourceVector& demand) {
    if (!inst.in_flight) throw PrematureCompletion("no transition in flight");
    if (now < inst.in_flight->completion_time) throw PrematureCompletion("transition completed before its scheduled time");
    const auto before = inst.held(demand);
    inst.state = inst.in_flight->target;
    inst.in_flight.reset();
    ec.release(before - TransitionTable::footprint(inst.state, demand));
}

}  // namespace ripple

namespace ripple {

Deployment::Deployment(std::vector<ResourceVector> demand_per_type, std::size_t num_clouds)
    : demand_(std::move(demand_per_type)), num_clouds_(num_clouds) {
    instances_.resize(demand_.size() * num_clouds_);
    for (std::size_t v = 0; v < demand_.size(); ++v)
        for (std::size_t e = 0; e < num_clouds_; ++e) {
            auto& inst = instances_[v * num_clouds_ + e];
            inst.vnf_type = static_cast<VnfType>(v);
            inst.location = static_cast<NodeId>(e);
        }
}

std::vector<NodeId> Deployment::serving_locations(VnfType v) const {
    std::vector<NodeId> out;
    for (std::size_t e = 0; e < num_clouds_; ++e)
        if (at(v, static_cast<NodeId>(e)).serving()) out.push_back(static_cast<NodeId>(e));
    return out;
}

ResourceVector Deployment::held_on(NodeId e) const {
    ResourceVector total;
    for (std::size_t v = 0; v < demand_.size(); ++v) total += at(static_cast<VnfType>(v), e).held(demand_[v]);
    return total;
}

}  // namespace ripple
