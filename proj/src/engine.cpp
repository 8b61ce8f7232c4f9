#include "ripple/engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <numbers>
#include <queue>
#include <random>
#include <tuple>

#include "ripple/forecast.hpp"
#include "ripple/policy.hpp"

namespace ripple {

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::Success: return "success";
        case Outcome::LateDelay: return "late_delay";
        case Outcome::NotRunning: return "not_running";
    }
    return "?";
}

double MetricsReport::mean_unsuccessful_ratio() const {
    if (users.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& u : users) sum += u.unsuccessful_ratio();
    return sum / static_cast<double>(users.size());
}

double MetricsReport::objective() const {
    if (!(duration > 0)) return 0.0;
    std::size_t bad = 0;
    for (const auto& u : users) bad += u.unsuccessful();
    return static_cast<double>(bad) / duration;
}

std::vector<double> MetricsReport::reportable_bursts(double min_length) const {
    std::vector<double> out;
    for (const auto& b : bursts)
        if (b.length >= min_length) out.push_back(b.length);
    return out;
}

PacketRecord classify_packet(UserId user, double time, const EmbedResult& embedding, const SfcRequest& sfc,
                             const SubstrateNetwork& net, const Deployment& deployment, double wireless_lambda,
                             double wireless_mu, const DelayParams& params, bool* stale) {
    if (stale) *stale = false;
    PacketRecord rec{user, time, Outcome::NotRunning, kSaturated};
    const auto* emb = std::get_if<Embedding>(&embedding);
    if (!emb) return rec;
    for (const auto& hop : emb->hops)
        if (!deployment.at(hop.vnf, hop.cloud).serving()) {
            if (stale) *stale = true;
            return rec;
        }
    ChainPath path;
    path.nodes = emb->total_path;
    for (std::size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        const auto& link = net.links()[net.link_index(path.nodes[i], path.nodes[i + 1]).value()];
        path.wired_hops.push_back({link.current_lambda, link.service_rate});
    }
    path.wireless_lambda = wireless_lambda;
    path.wireless_mu = wireless_mu;
    path.vnf_processing = sfc.processing;
    rec.delay = e2e_delay(path, params);
    rec.outcome = rec.delay > sfc.e2e_limit ? Outcome::LateDelay : Outcome::Success;
    return rec;
}

std::vector<Burst> burst_lengths(std::span<const PacketRecord> log, double mean_interarrival) {
    std::vector<Burst> out;
    std::size_t i = 0;
    while (i < log.size()) {
        if (log[i].outcome == Outcome::Success) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < log.size() && log[j + 1].outcome != Outcome::Success) ++j;
        out.push_back({log[i].user, log[i].time, log[j].time - log[i].time + mean_interarrival});
        i = j + 1;
    }
    return out;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

enum class EventKind : int { LifecycleComplete = 0, MobilityTick = 1, DecisionEpoch = 2, PacketArrival = 3 };

struct Event {
    double time;
    EventKind kind;
    std::uint64_t seq;
    std::uint32_t subject;  // instance index, tick index or user id

    bool operator>(const Event& o) const {
        return std::tie(time, kind, seq) > std::tie(o.time, o.kind, o.seq);
    }
};

enum Stream : std::uint32_t { kPlacement = 1, kMotion = 2, kConnection = 3, kPackets = 4 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream purpose, std::uint32_t index = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(purpose), index};
    return std::mt19937_64(seq);
}

struct UserState {
    UserId id = 0;
    SfcId sfc = 0;
    std::vector<Point> positions;         // one per tick, long enough for the forecast horizon
    std::vector<NodeId> replay_attached;  // empty unless replaying a trace
    NodeId attached = 0;
    EmbedResult embedding = MissingVnf{};
    std::mt19937_64 packet_rng;
    std::vector<PacketRecord> log;
};

class Simulation {
public:
    Simulation(const Scenario& sc, std::uint64_t seed)
        : sc_(sc),
          seed_(seed),
          net_(build_network(sc.topology)),
          sfcs_(sc.sfc_catalog()),
          table_(sc.policy == PolicyKind::Ideal ? sc.transition_table().instantaneous() : sc.transition_table()),
          warm_table_(sc.transition_table().instantaneous()),
          connection_rng_(make_stream(seed, kConnection)) {
        num_ticks_ = sc.duration_s > 0 ? horizon_ticks(sc.duration_s, sc.mobility.tick) : 0;
        horizon_ = horizon_ticks(sc.horizon_s, sc.mobility.tick);
        const auto types = static_cast<std::size_t>(sc.sfc_count * sc.sfc_length);
        deployment_ = Deployment(std::vector<ResourceVector>(types, sc.vnf_demand), net_.size());
        for (std::size_t i = 0; i < deployment_.instances().size(); ++i) {
            auto& inst = deployment_.instances()[i];
            inst.vnf_type = static_cast<VnfType>(i / net_.size());
            inst.location = static_cast<NodeId>(i % net_.size());
        }
        if (sc.trace_file.empty())
            generate_users();
        else
            load_trace();
    }

    MetricsReport run() {
        MetricsReport rep;
        rep.seed = seed_;
        rep.policy = sc_.policy;
        rep.duration = sc_.duration_s;
        for (const auto& u : users_) rep.users.push_back({u.id, 0, 0, 0});
        if (num_ticks_ == 0) return rep;

        push(0.0, EventKind::MobilityTick, 0);
        for (auto& u : users_) schedule_packet(u, 0.0);

        [[maybe_unused]] double last_time = 0.0;
        [[maybe_unused]] EventKind last_kind = EventKind::LifecycleComplete;
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            queue_.pop();
            assert(ev.time > last_time || (ev.time == last_time && ev.kind >= last_kind));
            last_time = ev.time;
            last_kind = ev.kind;
            switch (ev.kind) {
                case EventKind::LifecycleComplete: on_complete(ev); break;
                case EventKind::MobilityTick: on_tick(ev); break;
                case EventKind::DecisionEpoch: on_epoch(ev); break;
                case EventKind::PacketArrival: on_packet(ev, rep); break;
            }
            if (ev.kind != EventKind::PacketArrival) sweep_capacity();
        }

        for (auto& u : users_) {
            auto& m = rep.users[u.id];
            for (const auto& p : u.log) {
                ++m.packets;
                if (p.outcome == Outcome::LateDelay) ++m.late_delay;
                if (p.outcome == Outcome::NotRunning) ++m.not_running;
            }
            auto b = burst_lengths(u.log, 1.0 / sc_.lambda);
            rep.bursts.insert(rep.bursts.end(), b.begin(), b.end());
        }
        // Interleave per-user logs back into one time-ordered log.
        for (auto& u : users_) rep.packets.insert(rep.packets.end(), u.log.begin(), u.log.end());
        std::stable_sort(rep.packets.begin(), rep.packets.end(),
                         [](const PacketRecord& a, const PacketRecord& b) { return a.time < b.time; });
        rep.transitions = transitions_;
        rep.constraints = counters_;
        rep.handovers = handovers_;
        rep.plans = plans_;
        return rep;
    }

private:
    double tick_time(std::size_t k) const { return static_cast<double>(k) * sc_.mobility.tick; }

    void push(double time, EventKind kind, std::uint32_t subject) { queue_.push({time, kind, seq_++, subject}); }

    void generate_users() {
        const auto box = net_.bounds(sc_.topology.spacing_m / 2.0);
        GaussMarkovParams gm = sc_.mobility;
        gm.lo = box.first;
        gm.hi = box.second;
        auto placement = make_stream(seed_, kPlacement);
        std::uniform_real_distribution<double> ux(gm.lo.x, gm.hi.x), uy(gm.lo.y, gm.hi.y),
            uth(-std::numbers::pi, std::numbers::pi);
        const std::size_t len = static_cast<std::size_t>(num_ticks_ + horizon_) + 1;
        for (int i = 0; i < sc_.users; ++i) {
            UserState u;
            u.id = static_cast<UserId>(i);
            u.sfc = static_cast<SfcId>(i % sc_.sfc_count);
            MotionState start;
            start.position = {ux(placement), uy(placement)};
            start.velocity = {gm.mean_speed, uth(placement)};
            start.mean_direction = start.velocity.direction;
            u.positions.push_back(start.position);
            auto motion = make_stream(seed_, kMotion, static_cast<std::uint32_t>(i));
            auto trace = generate_trace(start, gm, static_cast<int>(len) - 1, motion());
            u.positions.insert(u.positions.end(), trace.begin(), trace.end());
            u.packet_rng = make_stream(seed_, kPackets, static_cast<std::uint32_t>(i));
            users_.push_back(std::move(u));
        }
    }

    void load_trace() {
        std::ifstream in(sc_.trace_file);
        if (!in) throw InvalidScenario("mobility.trace_file: cannot open '" + sc_.trace_file + "'");
        auto rows = read_trace_csv(in);
        if (rows.empty()) throw InvalidScenario("mobility.trace_file: no rows");
        UserId max_user = 0;
        for (const auto& r : rows) {
            max_user = std::max(max_user, r.user);
            if (!net_.is_base_station(r.attached_bs))
                throw InvalidScenario("mobility.trace_file: attached_bs " + std::to_string(r.attached_bs) +
                                      " is not a base station");
        }
        std::stable_sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) {
            return std::tie(a.user, a.tick) < std::tie(b.user, b.tick);
        });
        const std::size_t len = static_cast<std::size_t>(num_ticks_ + horizon_) + 1;
        for (UserId id = 0; id <= max_user; ++id) {
            UserState u;
            u.id = id;
            u.sfc = static_cast<SfcId>(id % static_cast<UserId>(sc_.sfc_count));
            u.packet_rng = make_stream(seed_, kPackets, id);
            std::optional<TraceRow> held;
            auto it = std::find_if(rows.begin(), rows.end(), [&](const TraceRow& r) { return r.user == id; });
            if (it == rows.end()) throw InvalidScenario("mobility.trace_file: no rows for user " + std::to_string(id));
            for (std::size_t k = 0; k < len; ++k) {
                while (it != rows.end() && it->user == id && it->tick <= static_cast<long>(k)) held = *it++;
                const auto& r = held ? *held : *std::find_if(rows.begin(), rows.end(),
                                                             [&](const TraceRow& x) { return x.user == id; });
                u.positions.push_back({r.x, r.y});
                u.replay_attached.push_back(r.attached_bs);
            }
            users_.push_back(std::move(u));
        }
    }

    void schedule_packet(UserState& u, double now) {
        std::exponential_distribution<double> gap(sc_.lambda);
        const double t = now + gap(u.packet_rng);
        if (t < sc_.duration_s) push(t, EventKind::PacketArrival, u.id);
    }

    void on_tick(const Event& ev) {
        tick_ = ev.subject;
        bool handover = false;
        for (auto& u : users_) {
            NodeId next;
            if (!u.replay_attached.empty())
                next = u.replay_attached[tick_];
            else
                next = realize_connection(u.positions[tick_], net_, ConnectionModel{sc_.connection_softness_m},
                                          connection_rng_);
            if (tick_ > 0 && next != u.attached) {
                handover = true;
                ++handovers_;
            }
            u.attached = next;
        }
        dirty_ = true;
        const bool plan = tick_ == 0 || sc_.policy != PolicyKind::Reactive || handover;
        if (plan) push(ev.time, EventKind::DecisionEpoch, tick_);
        retry_deferred(ev.time);
        if (static_cast<int>(tick_) + 1 < num_ticks_) push(tick_time(tick_ + 1), EventKind::MobilityTick, tick_ + 1);
    }

    void on_epoch(const Event& ev) {
        PlanningContext ctx{net_, sfcs_, deployment_, sc_.delay, sc_.thresholds, sc_.demotion};
        std::vector<UserDemand> demand;
        PlacementPlan plan;
        if (sc_.policy == PolicyKind::Ripple) {
            const auto k = static_cast<std::size_t>(sc_.history_k);
            for (const auto& u : users_) {
                const std::size_t first = tick_ + 1 > k ? tick_ + 1 - k : 0;
                std::vector<Point> history(u.positions.begin() + static_cast<long>(first),
                                           u.positions.begin() + static_cast<long>(tick_) + 1);
                if (history.size() < 2) history.push_back(history.back());  // stationary until a second sample
                ForecastInputs in{u.positions[tick_], history,
                                  std::span<const Point>(u.positions).subspan(tick_ + 1)};
                auto f = no_connect_over_horizon(u.id, in, net_, sc_.horizon_s, sc_.mobility.tick, sc_.predictor,
                                                 sc_.estimator_softness_m);
                demand.push_back(demand_from_forecast(u.id, u.sfc, u.attached, f, net_, sc_.attachment_floor));
            }
            plan = ripple_plan(ctx, demand);
        } else {
            for (const auto& u : users_) demand.push_back(realized_demand(u.id, u.sfc, u.attached, net_));
            plan = sc_.policy == PolicyKind::Ideal ? ideal_plan(ctx, demand) : reactive_plan(ctx, demand);
        }
        ++plans_;
        const bool warm = ev.subject == 0 && sc_.warm_start;
        apply(plan, ev.time, warm ? warm_table_ : table_);
    }

    void apply(const PlacementPlan& plan, double now, const TransitionTable& table) {
        for (const auto& t : plan.targets) {
            auto& inst = deployment_.at(t.vnf, t.cloud);
            inst.goal = t.state;
        }
        for (const auto& t : plan.targets) drive(index(t.vnf, t.cloud), now, table);
        retry_deferred(now, table);
    }

    std::size_t index(VnfType v, NodeId e) const { return static_cast<std::size_t>(v) * net_.size() + e; }

    void defer(std::size_t idx) {
        if (std::find(deferred_.begin(), deferred_.end(), idx) == deferred_.end()) deferred_.push_back(idx);
    }
    void undefer(std::size_t idx) { deferred_.erase(std::remove(deferred_.begin(), deferred_.end(), idx), deferred_.end()); }

    // Walks an instance toward its goal one FSM edge at a time. Zero-length
    // edges land immediately; a lack of room parks the instance until
    // something is released.
    void drive(std::size_t idx, double now, const TransitionTable& table) {
        auto& inst = deployment_.instances()[idx];
        while (true) {
            if (inst.in_flight) return;
            if (!inst.goal || *inst.goal == inst.state) {
                inst.goal.reset();
                undefer(idx);
                return;
            }
            const auto route = table.route_to(inst.state, *inst.goal);
            const auto& demand = deployment_.demand(inst.vnf_type);
            double done = 0.0;
            try {
                done = begin_transition(inst, route.front().to, now, table, net_.edge_cloud(inst.location), demand);
            } catch (const InsufficientResources&) {
                defer(idx);
                return;
            } catch (const TransitionInFlight&) {
                ++counters_.interrupted_transitions;
                return;
            }
            undefer(idx);
            dirty_ = true;
            if (done > now) {
                push(done, EventKind::LifecycleComplete, static_cast<std::uint32_t>(idx));
                return;
            }
            land(idx, now);
        }
    }

    void land(std::size_t idx, double now) {
        auto& inst = deployment_.instances()[idx];
        const auto from = inst.state;
        const auto to = inst.in_flight->target;
        complete_transition(inst, now, net_.edge_cloud(inst.location), deployment_.demand(inst.vnf_type));
        ++transitions_[{from, to}];
        dirty_ = true;
    }

    void retry_deferred(double now) { retry_deferred(now, table_); }
    void retry_deferred(double now, const TransitionTable& table) {
        bool progress = true;
        while (progress && !deferred_.empty()) {
            progress = false;
            const auto pending = deferred_;
            for (auto idx : pending) {
                const auto before = deployment_.instances()[idx].state;
                const bool was_flying = deployment_.instances()[idx].in_flight.has_value();
                drive(idx, now, table);
                const auto& inst = deployment_.instances()[idx];
                if (inst.state != before || inst.in_flight.has_value() != was_flying) progress = true;
            }
        }
    }

    void on_complete(const Event& ev) {
        auto& inst = deployment_.instances()[ev.subject];
        if (!inst.in_flight || inst.in_flight->completion_time != ev.time) {
            ++counters_.interrupted_transitions;
            return;
        }
        land(ev.subject, ev.time);
        drive(ev.subject, ev.time, table_);
        retry_deferred(ev.time);
    }

    void refresh_embeddings() {
        if (!dirty_) return;
        const auto running = running_sets(deployment_);
        for (auto& link : net_.links()) link.current_lambda = 0.0;
        for (auto& u : users_) {
            u.embedding = embed_links(u.id, u.attached, sfcs_[u.sfc], net_, running);
            if (const auto* emb = std::get_if<Embedding>(&u.embedding))
                for (std::size_t i = 0; i + 1 < emb->total_path.size(); ++i)
                    net_.links()[*net_.link_index(emb->total_path[i], emb->total_path[i + 1])].current_lambda +=
                        sc_.lambda;
        }
        dirty_ = false;
    }

    void on_packet(const Event& ev, MetricsReport&) {
        refresh_embeddings();
        auto& u = users_[ev.subject];
        const auto& sfc = sfcs_[u.sfc];
        const double mu = wireless_rate(distance(u.positions[tick_], *net_.node(u.attached).position), sc_.delay);
        bool stale = false;
        auto rec = classify_packet(u.id, ev.time, u.embedding, sfc, net_, deployment_, sc_.lambda, mu, sc_.delay, &stale);
        if (stale) ++counters_.non_running_references;

        // Exactly one cause per unsuccessful packet, none for a success.
        const bool not_running = std::holds_alternative<MissingVnf>(u.embedding) || stale;
        const bool late = !not_running && rec.delay > sfc.e2e_limit;
        const auto expected = not_running ? Outcome::NotRunning : late ? Outcome::LateDelay : Outcome::Success;
        if (rec.outcome != expected || (not_running && late)) ++counters_.inconsistent_causes;

        u.log.push_back(rec);
        schedule_packet(u, ev.time);
    }

    void sweep_capacity() {
        for (NodeId e = 0; e < net_.size(); ++e) {
            const auto& ec = net_.edge_cloud(e);
            if (!(deployment_.held_on(e) == ec.in_use()) || !ec.in_use().fits_within(ec.capacity()) ||
                !ec.in_use().nonnegative())
                ++counters_.capacity_violations;
        }
    }

    const Scenario& sc_;
    std::uint64_t seed_;
    SubstrateNetwork net_;
    std::vector<SfcRequest> sfcs_;
    TransitionTable table_;
    TransitionTable warm_table_;
    Deployment deployment_;
    std::vector<UserState> users_;
    std::mt19937_64 connection_rng_;
    int num_ticks_ = 0;
    int horizon_ = 0;
    std::uint32_t tick_ = 0;
    bool dirty_ = true;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::uint64_t seq_ = 0;
    std::vector<std::size_t> deferred_;
    TransitionCounts transitions_;
    ConstraintCounters counters_;
    std::size_t handovers_ = 0;
    std::size_t plans_ = 0;
};

std::string num(double x) { return fmt::format("{}", x); }

}  // namespace

MetricsReport run(const Scenario& scenario, std::uint64_t seed) {
    scenario.validate();
    return Simulation(scenario, seed).run();
}

void write_report(const MetricsReport& report, const std::filesystem::path& dir, bool packets) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    if (packets) {
        auto f = open("packets.csv");
        f << "user,time,outcome,delay\n";
        for (const auto& p : report.packets)
            f << p.user << ',' << num(p.time) << ',' << to_string(p.outcome) << ',' << num(p.delay) << '\n';
    }
    {
        auto f = open("bursts.csv");
        f << "user,start,length\n";
        for (const auto& b : report.bursts) f << b.user << ',' << num(b.start) << ',' << num(b.length) << '\n';
    }
    {
        auto f = open("metrics.csv");
        f << "user,packets,unsuccessful,late_delay,not_running,unsuccessful_ratio\n";
        std::size_t packets_total = 0, late = 0, missing = 0;
        for (const auto& u : report.users) {
            f << u.user << ',' << u.packets << ',' << u.unsuccessful() << ',' << u.late_delay << ',' << u.not_running
              << ',' << num(u.unsuccessful_ratio()) << '\n';
            packets_total += u.packets;
            late += u.late_delay;
            missing += u.not_running;
        }
        f << "all," << packets_total << ',' << late + missing << ',' << late << ',' << missing << ','
          << num(report.mean_unsuccessful_ratio()) << '\n';
    }
    {
        auto f = open("constraints.csv");
        const auto& c = report.constraints;
        f << "check,count\n"
          << "capacity_violations," << c.capacity_violations << '\n'
          << "interrupted_transitions," << c.interrupted_transitions << '\n'
          << "non_running_references," << c.non_running_references << '\n'
          << "inconsistent_causes," << c.inconsistent_causes << '\n'
          << "handovers," << report.handovers << '\n'
          << "plans," << report.plans << '\n'
          << "objective_unsuccessful_per_s," << num(report.objective()) << '\n';
    }
    {
        auto f = open("vnf_transitions.csv");
        f << "from,to,count\n";
        for (const auto& [edge, count] : report.transitions)
            f << to_string(edge.first) << ',' << to_string(edge.second) << ',' << count << '\n';
    }
    {
        auto f = open("burst_ccdf.csv");
        f << "length,ccdf\n";
        auto lengths = report.reportable_bursts();
        std::sort(lengths.begin(), lengths.end());
        for (std::size_t i = 0; i < lengths.size(); ++i) {
            if (i + 1 < lengths.size() && lengths[i + 1] == lengths[i]) continue;
            const auto at_least = static_cast<double>(lengths.size() - (std::lower_bound(lengths.begin(), lengths.end(), lengths[i]) - lengths.begin()));
            f << num(lengths[i]) << ',' << num(at_least / static_cast<double>(lengths.size())) << '\n';
        }
    }
    {
        auto f = open("ratio_cdf.csv");
        f << "ratio,cdf\n";
        std::vector<double> ratios;
        for (const auto& u : report.users) ratios.push_back(u.unsuccessful_ratio());
        std::sort(ratios.begin(), ratios.end());
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            if (i + 1 < ratios.size() && ratios[i + 1] == ratios[i]) continue;
            f << num(ratios[i]) << ',' << num(static_cast<double>(i + 1) / static_cast<double>(ratios.size())) << '\n';
        }
    }
}

}  // namespace ripple
