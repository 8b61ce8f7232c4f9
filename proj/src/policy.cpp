#include "ripple/policy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <variant>

namespace ripple {

void LifecycleThresholds::validate() const {
    if (!(run < 1.0 + 1e-12 && run > stage && stage > fetch && fetch > 0.0))
        throw std::invalid_argument("thresholds must satisfy 1 >= run > stage > fetch > 0");
}

LifecycleState target_state(double p, const LifecycleThresholds& t) {
    if (p >= t.run) return LifecycleState::Running;
    if (p >= t.stage) return LifecycleState::Stopped;
    if (p >= t.fetch) return LifecycleState::Image;
    return LifecycleState::Descriptor;
}

double demand_from_no_connect(std::span<const double> no_connect) {
    double none = 1.0;
    for (double q : no_connect) none *= q;
    return 1.0 - none;
}

double vnf_demand_prob(std::size_t bs_index, std::span<const Forecast> forecasts,
                       std::span<const UserId> users_requiring) {
    std::vector<double> factors;
    for (UserId u : users_requiring) {
        auto it = std::find_if(forecasts.begin(), forecasts.end(), [&](const Forecast& f) { return f.user == u; });
        if (it == forecasts.end() || bs_index >= it->no_connect.size())
            throw MissingForecast("no forecast for user " + std::to_string(u));
        factors.push_back(it->no_connect[bs_index]);
    }
    return demand_from_no_connect(factors);
}

double mux_demand_prob(std::span<const double> per_bs) {
    double none = 1.0;
    for (double p : per_bs) none *= 1.0 - p;
    return 1.0 - none;
}

const char* to_string(DemotionRule r) {
    switch (r) {
        case DemotionRule::Auto: return "auto";
        case DemotionRule::Paused: return "paused";
        case DemotionRule::Stopped: return "stopped";
    }
    return "?";
}

DemotionRule parse_demotion(const std::string& name) {
    if (name == "auto") return DemotionRule::Auto;
    if (name == "paused") return DemotionRule::Paused;
    if (name == "stopped") return DemotionRule::Stopped;
    throw std::invalid_argument("unknown demotion rule '" + name + "'");
}

const PlanTarget* PlacementPlan::find(VnfType v, NodeId e) const {
    for (const auto& t : targets)
        if (t.vnf == v && t.cloud == e) return &t;
    return nullptr;
}

UserDemand demand_from_forecast(UserId user, SfcId sfc, NodeId attached_bs, const Forecast& f,
                                const SubstrateNetwork& net, bool attachment_floor) {
    UserDemand d{user, sfc, attached_bs, {}};
    d.connect.resize(f.no_connect.size());
    for (std::size_t i = 0; i < d.connect.size(); ++i) d.connect[i] = 1.0 - f.no_connect[i];
    if (attachment_floor) {
        const auto& bss = net.base_stations();
        auto it = std::find(bss.begin(), bss.end(), attached_bs);
        if (it != bss.end()) d.connect[static_cast<std::size_t>(it - bss.begin())] = 1.0;
    }
    return d;
}

UserDemand realized_demand(UserId user, SfcId sfc, NodeId attached_bs, const SubstrateNetwork& net) {
    UserDemand d{user, sfc, attached_bs, std::vector<double>(net.base_stations().size(), 0.0)};
    const auto& bss = net.base_stations();
    auto it = std::find(bss.begin(), bss.end(), attached_bs);
    if (it == bss.end()) throw std::invalid_argument("attached node is not a base station");
    d.connect[static_cast<std::size_t>(it - bss.begin())] = 1.0;
    return d;
}

namespace {

constexpr double kEps = 1e-12;

/// Distance-first-fit planner state for one decision epoch.
class DffPlanner {
public:
    DffPlanner(const PlanningContext& ctx, std::span<const UserDemand> users, bool prepare_ahead)
        : ctx_(ctx),
          users_(users.begin(), users.end()),
          n_(ctx.net.size()),
          types_(ctx.deployment.num_types()),
          prepare_ahead_(prepare_ahead) {
        final_.resize(types_ * n_);
        wanted_.assign(types_ * n_, false);
        prob_.assign(types_ * n_, 0.0);
        occupancy_.assign(n_, {});
        running_final_.assign(types_, {});
        for (VnfType v = 0; v < types_; ++v)
            for (NodeId e = 0; e < n_; ++e) {
                const auto eff = ctx_.deployment.at(v, e).settled_state();
                auto f = LifecycleState::Descriptor;
                if (eff == LifecycleState::Running || eff == LifecycleState::Paused) f = LifecycleState::Paused;
                final_[slot(v, e)] = f;
                occupancy_[e] += TransitionTable::footprint(f, ctx_.deployment.demand(v));
            }
        compute_probabilities();
    }

    PlacementPlan run() {
        PlacementPlan plan;
        // (layer, vnf, chain) in placement order: deepest layer first, chains
        // by id within a layer, a VNF shared by several chains only once.
        std::size_t max_len = 0;
        for (const auto& s : ctx_.sfcs) max_len = std::max(max_len, s.vnfs.size());
        std::vector<bool> seen(types_, false);
        for (std::size_t layer = max_len; layer-- > 0;)
            for (const auto& s : ctx_.sfcs) {
                if (layer >= s.vnfs.size() || seen[s.vnfs[layer]]) continue;
                seen[s.vnfs[layer]] = true;
                if (!users_of_[s.vnfs[layer]].empty()) work_.push_back({s.vnfs[layer], &s, layer, likely_bs(s.vnfs[layer]), {}});
            }
        for (auto& w : work_) w.uncovered = w.likely;

        // Copies that are already running keep their seat before anything new
        // competes for the room; then the open distance-first-fit pass; then
        // spare room warms further copies.
        for (auto& w : work_) cover(w, true);
        for (auto& w : work_) cover(w, false);
        if (prepare_ahead_) {
            for (const auto& w : work_)
                if (w.layer > 0) prepare(w, true);
            for (const auto& w : work_)
                if (w.layer > 0) prepare(w, false);
        }

        for (const auto& w : work_)
            for (auto i : users_of_[w.v]) {
                const auto& u = users_[i];
                if (std::find(w.uncovered.begin(), w.uncovered.end(), u.attached_bs) != w.uncovered.end() ||
                    std::find(w.likely.begin(), w.likely.end(), u.attached_bs) == w.likely.end())
                    plan.infeasible.push_back({u.user, u.sfc, w.layer, u.attached_bs});
            }
        // Later passes can reroute a walk that was covered when it was
        // planned; whatever the greedy walk cannot serve is reported too.
        for (const auto& u : users_) {
            if (std::any_of(plan.infeasible.begin(), plan.infeasible.end(),
                            [&](const InfeasibleChain& c) { return c.user == u.user; }))
                continue;
            if (auto layer = walk_fails(u)) plan.infeasible.push_back({u.user, u.sfc, *layer, u.attached_bs});
        }
        finish(plan);
        return plan;
    }

private:
    struct Work {
        VnfType v;
        const SfcRequest* sfc;
        std::size_t layer;
        std::vector<NodeId> likely;     // BSs with P_{v,b} >= fetch threshold
        std::vector<NodeId> uncovered;  // likely BSs without a planned Running copy in reach
    };

    std::vector<NodeId> likely_bs(VnfType v) const {
        std::vector<NodeId> out;
        const auto& bss = ctx_.net.base_stations();
        for (std::size_t b = 0; b < bss.size(); ++b)
            if (p_bs_[v][b] >= ctx_.thresholds.fetch) out.push_back(bss[b]);
        return out;
    }

    // Serving right now; a copy still on its way up does not count.
    bool incumbent(VnfType v, NodeId e) const {
        const auto& in = ctx_.deployment.at(v, e);
        return in.state == LifecycleState::Running && !in.in_flight &&
               (!in.goal || *in.goal == LifecycleState::Running);
    }

    // Deeper clouds, furthest first by probability-weighted hop distance from
    // the likely base stations, then most free resources, then id.
    std::vector<NodeId> dff_order(const Work& w) const {
        std::vector<NodeId> candidates;
        for (NodeId e = 0; e < n_; ++e)
            if (!ctx_.net.is_base_station(e)) candidates.push_back(e);
        std::vector<double> reach(n_, 0.0);
        std::vector<int> free_units(n_, 0);
        for (NodeId e : candidates) {
            double num = 0.0, den = 0.0;
            for (NodeId b : w.likely) {
                const double p = p_bs_[w.v][bs_index(b)];
                num += p * ctx_.net.hop_distance(b, e);
                den += p;
            }
            reach[e] = den > 0 ? num / den : 0.0;
            free_units[e] = (ctx_.net.edge_cloud(e).capacity() - occupancy_[e]).total();
        }
        std::sort(candidates.begin(), candidates.end(), [&](NodeId a, NodeId b) {
            if (std::abs(reach[a] - reach[b]) > 1e-9) return reach[a] > reach[b];
            if (free_units[a] != free_units[b]) return free_units[a] > free_units[b];
            return a < b;
        });
        return candidates;
    }

    void mark_covered(Work& w, const std::vector<NodeId>& served) {
        for (NodeId b : served) w.uncovered.erase(std::remove(w.uncovered.begin(), w.uncovered.end(), b), w.uncovered.end());
    }

    void cover(Work& w, bool incumbents_only) {
        const auto& th = ctx_.thresholds;
        if (w.layer == 0) {
            auto by_prob = w.uncovered;
            std::stable_sort(by_prob.begin(), by_prob.end(), [&](NodeId a, NodeId b) {
                return p_bs_[w.v][bs_index(a)] > p_bs_[w.v][bs_index(b)];
            });
            for (NodeId b : by_prob) {
                if (incumbents_only && !incumbent(w.v, b)) continue;
                const double p = p_bs_[w.v][bs_index(b)];
                if (!feasible(b, *w.sfc, w.layer, b)) continue;
                if (assign(w.v, b, target_state(p, th), p) && final_[slot(w.v, b)] == LifecycleState::Running)
                    mark_covered(w, {b});
            }
        }
        for (NodeId e : dff_order(w)) {
            if (w.uncovered.empty()) break;
            if (incumbents_only && !incumbent(w.v, e)) continue;
            if (wanted_[slot(w.v, e)] && final_[slot(w.v, e)] != LifecycleState::Running) continue;
            std::vector<NodeId> served;
            for (NodeId b : w.uncovered)
                if (feasible(b, *w.sfc, w.layer, e) && (w.layer > 0 || picks(b, w.v, e) == e)) served.push_back(b);
            if (served.empty()) continue;
            const double p = serving_prob(w.v, e, served);
            const auto target = target_state(p, th);
            if (target == LifecycleState::Descriptor) continue;
            if (w.layer == 0 && ends_running(w.v, e, target) && !harmless(w, e)) continue;
            if (assign(w.v, e, target, p) && final_[slot(w.v, e)] == LifecycleState::Running) mark_covered(w, served);
        }
    }

    // Clouds that could serve a likely BS but are not needed for coverage are
    // staged toward their own lifecycle target, stopping short of Running so
    // they hold no CPU.
    void prepare(const Work& w, bool incumbents_only) {
        for (NodeId e : dff_order(w)) {
            if (wanted_[slot(w.v, e)]) continue;
            if (incumbents_only && !incumbent(w.v, e)) continue;
            if (ctx_.deployment.at(w.v, e).settled_state() == LifecycleState::Running) continue;
            const double p = p_cloud_[slot(w.v, e)];
            auto target = target_state(p, ctx_.thresholds);
            if (target == LifecycleState::Descriptor) continue;
            if (target == LifecycleState::Running) target = LifecycleState::Stopped;
            const bool useful = std::any_of(w.likely.begin(), w.likely.end(),
                                            [&](NodeId b) { return feasible(b, *w.sfc, w.layer, e); });
            if (useful) assign(w.v, e, target, p);
        }
    }

    // Copy of v the greedy walk from bs would use if e also ran v: nearest,
    // lowest id on ties.
    NodeId picks(NodeId bs, VnfType v, NodeId e) const {
        NodeId best = e;
        for (NodeId x : running_final_[v])
            if (ctx_.net.hop_distance(bs, x) < ctx_.net.hop_distance(bs, best) ||
                (ctx_.net.hop_distance(bs, x) == ctx_.net.hop_distance(bs, best) && x < best))
                best = x;
        return best;
    }

    bool ends_running(VnfType v, NodeId e, LifecycleState target) const {
        return target == LifecycleState::Running ||
               ctx_.deployment.at(v, e).settled_state() == LifecycleState::Running;
    }

    // A new head copy at e must not pull an already covered BS onto a chain
    // that misses its budget.
    bool harmless(const Work& w, NodeId e) const {
        for (NodeId b : w.likely) {
            if (std::find(w.uncovered.begin(), w.uncovered.end(), b) != w.uncovered.end()) continue;
            if (picks(b, w.v, e) == e && !feasible(b, *w.sfc, w.layer, e)) return false;
        }
        return true;
    }

    // Demand probability at e over its catchment plus the BSs it would serve
    // from outside it.
    double serving_prob(VnfType v, NodeId e, const std::vector<NodeId>& served) const {
        const auto& own = ctx_.net.catchment(e);
        double none = 1.0 - p_cloud_[slot(v, e)];
        for (NodeId b : served)
            if (std::find(own.begin(), own.end(), b) == own.end()) none *= 1.0 - p_bs_[v][bs_index(b)];
        return 1.0 - none;
    }

    std::size_t slot(VnfType v, NodeId e) const { return static_cast<std::size_t>(v) * n_ + e; }

    void compute_probabilities() {
        const auto& bss = ctx_.net.base_stations();
        users_of_.assign(types_, {});
        for (std::size_t i = 0; i < users_.size(); ++i) {
            const auto& sfc = ctx_.sfcs.at(users_[i].sfc);
            for (VnfType v : sfc.vnfs)
                if (std::find(users_of_[v].begin(), users_of_[v].end(), i) == users_of_[v].end())
                    users_of_[v].push_back(i);
        }
        p_bs_.assign(types_, std::vector<double>(bss.size(), 0.0));
        p_cloud_.assign(types_ * n_, 0.0);
        for (VnfType v = 0; v < types_; ++v) {
            for (std::size_t b = 0; b < bss.size(); ++b) {
                double none = 1.0;
                for (auto i : users_of_[v]) none *= 1.0 - users_[i].connect.at(b);
                p_bs_[v][b] = 1.0 - none;
            }
            for (NodeId e = 0; e < n_; ++e) {
                std::vector<double> behind;
                for (NodeId b : ctx_.net.catchment(e)) behind.push_back(p_bs_[v][bs_index(b)]);
                p_cloud_[slot(v, e)] = ctx_.net.is_base_station(e) ? behind.front() : mux_demand_prob(behind);
            }
        }
    }

    std::size_t bs_index(NodeId b) const {
        const auto& bss = ctx_.net.base_stations();
        return static_cast<std::size_t>(std::lower_bound(bss.begin(), bss.end(), b) - bss.begin());
    }

    // Zero-load budget check for a user at `bs` when layer `layer` of `sfc`
    // sits on `cloud`; deeper layers follow the nearest planned Running copy.
    bool feasible(NodeId bs, const SfcRequest& sfc, std::size_t layer, NodeId cloud) const {
        auto nodes = ctx_.net.hop_path(bs, cloud);
        NodeId cur = cloud;
        for (std::size_t l = layer + 1; l < sfc.vnfs.size(); ++l) {
            const auto& locs = running_final_[sfc.vnfs[l]];
            if (locs.empty()) continue;
            NodeId best = locs.front();
            for (NodeId e : locs)
                if (ctx_.net.hop_distance(cur, e) < ctx_.net.hop_distance(cur, best)) best = e;
            auto seg = ctx_.net.hop_path(cur, best);
            nodes.insert(nodes.end(), seg.begin() + 1, seg.end());
            cur = best;
        }
        return zero_load_delay(ctx_.net, nodes, sfc.processing, ctx_.delay) <= sfc.e2e_limit + kEps;
    }

    // Layer at which the user's greedy walk over the planned Running copies
    // breaks down, if it does.
    std::optional<std::size_t> walk_fails(const UserDemand& u) const {
        const auto& sfc = ctx_.sfcs.at(u.sfc);
        auto res = embed_links(u.user, u.attached_bs, sfc, ctx_.net, running_final_);
        if (const auto* miss = std::get_if<MissingVnf>(&res)) return miss->layer;
        const auto& emb = std::get<Embedding>(res);
        if (zero_load_delay(ctx_.net, emb.total_path, sfc.processing, ctx_.delay) > sfc.e2e_limit + kEps)
            return std::size_t{0};
        return std::nullopt;
    }

    bool fits(NodeId e) const { return occupancy_[e].fits_within(ctx_.net.edge_cloud(e).capacity()); }

    void set_final(VnfType v, NodeId e, LifecycleState s) {
        const auto& demand = ctx_.deployment.demand(v);
        occupancy_[e] -= TransitionTable::footprint(final_[slot(v, e)], demand);
        occupancy_[e] += TransitionTable::footprint(s, demand);
        final_[slot(v, e)] = s;
    }

    // Tries to make (v, e) wanted at `target` or better. Unwanted Paused
    // copies on e are evicted, lowest probability first, if that makes room.
    bool assign(VnfType v, NodeId e, LifecycleState target, double p) {
        const auto eff = ctx_.deployment.at(v, e).settled_state();
        const auto fin = readiness(eff) >= readiness(target) ? eff : target;
        const auto previous = final_[slot(v, e)];
        set_final(v, e, fin);
        std::vector<VnfType> evicted;
        if (!fits(e)) {
            std::vector<VnfType> victims;
            for (VnfType w = 0; w < types_; ++w)
                if (w != v && !wanted_[slot(w, e)] && final_[slot(w, e)] == LifecycleState::Paused) victims.push_back(w);
            std::sort(victims.begin(), victims.end(), [&](VnfType a, VnfType b) {
                if (p_cloud_[slot(a, e)] != p_cloud_[slot(b, e)]) return p_cloud_[slot(a, e)] < p_cloud_[slot(b, e)];
                return a > b;
            });
            for (VnfType w : victims) {
                if (fits(e)) break;
                set_final(w, e, LifecycleState::Descriptor);
                evicted.push_back(w);
            }
        }
        if (!fits(e)) {
            for (VnfType w : evicted) set_final(w, e, LifecycleState::Paused);
            set_final(v, e, previous);
            return false;
        }
        wanted_[slot(v, e)] = true;
        prob_[slot(v, e)] = p;
        order_.push_back(slot(v, e));
        if (fin == LifecycleState::Running) {
            auto& locs = running_final_[v];
            locs.insert(std::lower_bound(locs.begin(), locs.end(), e), e);
        }
        return true;
    }

    void finish(PlacementPlan& plan) {
        // Unwanted copies that were Running park as Paused or fall back to
        // Stopped; everything else unwanted heads for Descriptor.
        std::vector<std::size_t> parked;
        for (VnfType v = 0; v < types_; ++v)
            for (NodeId e = 0; e < n_; ++e)
                if (!wanted_[slot(v, e)] && final_[slot(v, e)] == LifecycleState::Paused &&
                    ctx_.deployment.at(v, e).settled_state() == LifecycleState::Running)
                    parked.push_back(slot(v, e));
        std::sort(parked.begin(), parked.end(), [&](std::size_t a, std::size_t b) {
            if (p_cloud_[a] != p_cloud_[b]) return p_cloud_[a] < p_cloud_[b];
            return a > b;
        });
        for (auto s : parked) {
            const auto v = static_cast<VnfType>(s / n_);
            const auto e = static_cast<NodeId>(s % n_);
            bool stop = ctx_.demotion == DemotionRule::Stopped;
            if (ctx_.demotion == DemotionRule::Auto) {
                const int free_mem = ctx_.net.edge_cloud(e).capacity().memory - occupancy_[e].memory;
                stop = free_mem < ctx_.deployment.demand(v).memory;
            }
            if (stop) set_final(v, e, LifecycleState::Stopped);
        }

        for (VnfType v = 0; v < types_; ++v)
            for (NodeId e = 0; e < n_; ++e) {
                const auto s = slot(v, e);
                if (wanted_[s] || final_[s] == ctx_.deployment.at(v, e).settled_state()) continue;
                plan.targets.push_back({v, e, final_[s], p_cloud_[s], false});
            }
        for (auto s : order_) {
            const auto v = static_cast<VnfType>(s / n_);
            const auto e = static_cast<NodeId>(s % n_);
            plan.targets.push_back({v, e, final_[s], prob_[s], true});
        }
    }

    const PlanningContext& ctx_;
    std::vector<UserDemand> users_;
    std::size_t n_;
    std::size_t types_;
    std::vector<LifecycleState> final_;
    std::vector<bool> wanted_;
    std::vector<double> prob_;
    std::vector<ResourceVector> occupancy_;
    std::vector<std::vector<NodeId>> running_final_;
    std::vector<std::vector<std::size_t>> users_of_;
    std::vector<std::vector<double>> p_bs_;
    std::vector<double> p_cloud_;
    std::vector<std::size_t> order_;
    bool prepare_ahead_;
    std::vector<Work> work_;
};

// Zero-load budget check of a greedy embedding over the given Running sets.
bool chain_fits(const PlanningContext& ctx, const UserDemand& u, const RunningSets& running) {
    const auto& sfc = ctx.sfcs.at(u.sfc);
    auto res = embed_links(u.user, u.attached_bs, sfc, ctx.net, running);
    const auto* emb = std::get_if<Embedding>(&res);
    if (!emb) return false;
    return zero_load_delay(ctx.net, emb->total_path, sfc.processing, ctx.delay) <= sfc.e2e_limit + kEps;
}

// Exhaustive search over Running placements (one subset of clouds per VNF
// type in use) maximizing the number of users whose chain fits, then
// minimizing the number of Running copies.
std::optional<RunningSets> exact_running_sets(const PlanningContext& ctx, std::span<const UserDemand> users) {
    const auto n = ctx.net.size();
    std::vector<VnfType> types;
    for (const auto& u : users)
        for (VnfType v : ctx.sfcs.at(u.sfc).vnfs)
            if (std::find(types.begin(), types.end(), v) == types.end()) types.push_back(v);
    const std::size_t bits = types.size() * n;
    if (bits >= 63 || (std::size_t{1} << bits) > ctx.exact_search_limit) return std::nullopt;

    RunningSets running(ctx.deployment.num_types());
    std::vector<ResourceVector> used(n);
    std::optional<RunningSets> best;
    int best_cover = -1;
    std::size_t best_count = 0;
    std::size_t count = 0;

    auto evaluate = [&] {
        int cover = 0;
        for (const auto& u : users) cover += chain_fits(ctx, u, running) ? 1 : 0;
        if (cover > best_cover || (cover == best_cover && count < best_count)) {
            best_cover = cover;
            best_count = count;
            best = running;
        }
    };
    // Depth-first over (type, cloud) bits with capacity pruning.
    auto recurse = [&](auto&& self, std::size_t bit) -> void {
        if (bit == bits) {
            evaluate();
            return;
        }
        const VnfType v = types[bit / n];
        const auto e = static_cast<NodeId>(bit % n);
        self(self, bit + 1);
        const auto& demand = ctx.deployment.demand(v);
        if (!(used[e] + demand).fits_within(ctx.net.edge_cloud(e).capacity())) return;
        used[e] += demand;
        running[v].push_back(e);
        ++count;
        self(self, bit + 1);
        --count;
        running[v].pop_back();
        used[e] -= demand;
    };
    recurse(recurse, 0);
    return best;
}

PlacementPlan plan_from_running(const PlanningContext& ctx, std::span<const UserDemand> users,
                                const RunningSets& running) {
    const auto n = ctx.net.size();
    const auto& d = ctx.deployment;
    PlacementPlan plan;
    std::vector<ResourceVector> occupancy(n);
    std::vector<LifecycleState> fin(d.num_types() * n, LifecycleState::Descriptor);
    for (VnfType v = 0; v < d.num_types(); ++v)
        for (NodeId e = 0; e < n; ++e) {
            const auto eff = d.at(v, e).settled_state();
            const bool keep = std::find(running[v].begin(), running[v].end(), e) != running[v].end();
            auto f = keep ? LifecycleState::Running
                          : (eff == LifecycleState::Running || eff == LifecycleState::Paused ? LifecycleState::Paused
                                                                                               : LifecycleState::Descriptor);
            if (!keep && f == LifecycleState::Paused && ctx.demotion == DemotionRule::Stopped &&
                eff == LifecycleState::Running)
                f = LifecycleState::Stopped;
            fin[v * n + e] = f;
            occupancy[e] += TransitionTable::footprint(f, d.demand(v));
        }
    // Evict parked copies until every cloud fits.
    for (NodeId e = 0; e < n; ++e)
        for (VnfType v = d.num_types(); v-- > 0;) {
            if (occupancy[e].fits_within(ctx.net.edge_cloud(e).capacity())) break;
            if (fin[v * n + e] != LifecycleState::Paused) continue;
            occupancy[e] -= TransitionTable::footprint(LifecycleState::Paused, d.demand(v));
            fin[v * n + e] = LifecycleState::Descriptor;
        }
    for (VnfType v = 0; v < d.num_types(); ++v)
        for (NodeId e = 0; e < n; ++e)
            if (fin[v * n + e] != LifecycleState::Running && fin[v * n + e] != d.at(v, e).settled_state())
                plan.targets.push_back({v, e, fin[v * n + e], 0.0, false});
    for (VnfType v = 0; v < d.num_types(); ++v)
        for (NodeId e : running[v]) plan.targets.push_back({v, e, LifecycleState::Running, 1.0, true});
    for (const auto& u : users)
        if (!chain_fits(ctx, u, running)) {
            const auto& sfc = ctx.sfcs.at(u.sfc);
            auto res = embed_links(u.user, u.attached_bs, sfc, ctx.net, running);
            std::size_t layer = 0;
            if (const auto* miss = std::get_if<MissingVnf>(&res)) layer = miss->layer;
            plan.infeasible.push_back({u.user, u.sfc, layer, u.attached_bs});
        }
    return plan;
}

std::size_t uncovered_users(const PlacementPlan& plan) {
    std::vector<UserId> users;
    for (const auto& c : plan.infeasible)
        if (std::find(users.begin(), users.end(), c.user) == users.end()) users.push_back(c.user);
    return users.size();
}

}  // namespace

PlacementPlan ripple_plan(const PlanningContext& ctx, std::span<const UserDemand> users) {
    return DffPlanner(ctx, users, true).run();
}

PlacementPlan ideal_plan(const PlanningContext& ctx, std::span<const UserDemand> users) {
    std::vector<UserDemand> realized;
    realized.reserve(users.size());
    for (const auto& u : users) realized.push_back(realized_demand(u.user, u.sfc, u.attached_bs, ctx.net));
    auto plan = DffPlanner(ctx, realized, false).run();

    // The greedy may strand a user that a different placement would serve.
    const auto running = planned_running(plan, ctx.deployment);
    std::size_t stranded = 0;
    for (const auto& u : realized) stranded += chain_fits(ctx, u, running) ? 0 : 1;
    if (stranded == 0) return plan;
    if (auto exact = exact_running_sets(ctx, realized)) {
        auto alt = plan_from_running(ctx, realized, *exact);
        if (uncovered_users(alt) < stranded) return alt;
    }
    return plan;
}

PlacementPlan reactive_plan(const PlanningContext& ctx, std::span<const UserDemand> users) {
    return ideal_plan(ctx, users);
}

RunningSets planned_running(const PlacementPlan& plan, const Deployment& d) {
    RunningSets out(d.num_types());
    for (VnfType v = 0; v < d.num_types(); ++v)
        for (NodeId e = 0; e < d.num_clouds(); ++e) {
            const auto* t = plan.find(v, e);
            const auto s = t ? t->state : d.at(v, e).settled_state();
            if (s == LifecycleState::Running) out[v].push_back(e);
        }
    return out;
}

std::vector<ResourceVector> projected_occupancy(const PlacementPlan& plan, const Deployment& d) {
    std::vector<ResourceVector> occ(d.num_clouds());
    for (VnfType v = 0; v < d.num_types(); ++v)
        for (NodeId e = 0; e < d.num_clouds(); ++e) {
            const auto* t = plan.find(v, e);
            const auto s = t ? t->state : d.at(v, e).settled_state();
            occ[e] += TransitionTable::footprint(s, d.demand(v));
        }
    return occ;
}

std::vector<std::string> check_plan(const PlanningContext& ctx, const PlacementPlan& plan) {
    std::vector<std::string> problems;
    const auto& d = ctx.deployment;
    std::vector<int> seen(d.num_types() * d.num_clouds(), 0);
    for (const auto& t : plan.targets) {
        if (t.vnf >= d.num_types() || t.cloud >= d.num_clouds()) {
            problems.push_back("target outside the deployment table");
            continue;
        }
        if (++seen[t.vnf * d.num_clouds() + t.cloud] == 2) {
            std::ostringstream m;
            m << "vnf " << t.vnf << " has more than one target on cloud " << t.cloud;
            problems.push_back(m.str());
        }
    }
    const auto occ = projected_occupancy(plan, d);
    for (NodeId e = 0; e < d.num_clouds(); ++e)
        if (!occ[e].fits_within(ctx.net.edge_cloud(e).capacity())) {
            std::ostringstream m;
            m << "cloud " << e << " projected at " << occ[e] << " over capacity " << ctx.net.edge_cloud(e).capacity();
            problems.push_back(m.str());
        }
    std::vector<bool> head(d.num_types(), false), tail(d.num_types(), false);
    for (const auto& s : ctx.sfcs)
        for (std::size_t i = 0; i < s.vnfs.size(); ++i) (i == 0 ? head : tail)[s.vnfs[i]] = true;
    for (const auto& t : plan.targets)
        if (t.wanted && t.state != LifecycleState::Descriptor && ctx.net.is_base_station(t.cloud) && !head[t.vnf]) {
            std::ostringstream m;
            m << "non-head vnf " << t.vnf << " targeted at base station " << t.cloud;
            problems.push_back(m.str());
        }
    return problems;
}

}  // namespace ripple
