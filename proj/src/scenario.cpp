#include "ripple/scenario.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace ripple {

const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::Ripple: return "ripple";
        case PolicyKind::Ideal: return "ideal";
        case PolicyKind::Reactive: return "reactive";
    }
    return "?";
}

PolicyKind parse_policy(const std::string& name) {
    if (name == "ripple") return PolicyKind::Ripple;
    if (name == "ideal") return PolicyKind::Ideal;
    if (name == "reactive") return PolicyKind::Reactive;
    throw std::invalid_argument("unknown policy '" + name + "'");
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw InvalidScenario(field + ": " + what);
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& s) {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

long long to_int(const std::string& s) {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument("not an integer: '" + s + "'");
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::invalid_argument("not a boolean: '" + s + "'");
}

ResourceVector to_resources(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() != 3) throw std::invalid_argument("expected cpu,memory,disk");
    return {static_cast<int>(to_int(parts[0])), static_cast<int>(to_int(parts[1])), static_cast<int>(to_int(parts[2]))};
}

std::string fmt_resources(const ResourceVector& r) { return fmt::format("{},{},{}", r.cpu, r.memory, r.disk); }

using Setter = std::function<void(Scenario&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"topology.kind", [](Scenario& s, const std::string& v) { s.topology.kind = v; }},
        {"topology.rows", [](Scenario& s, const std::string& v) { s.topology.rows = static_cast<int>(to_int(v)); }},
        {"topology.cols", [](Scenario& s, const std::string& v) { s.topology.cols = static_cast<int>(to_int(v)); }},
        {"topology.mux", [](Scenario& s, const std::string& v) { s.topology.mux = static_cast<int>(to_int(v)); }},
        {"topology.spacing_m", [](Scenario& s, const std::string& v) { s.topology.spacing_m = to_double(v); }},
        {"topology.capacity", [](Scenario& s, const std::string& v) { s.topology.capacity = to_resources(v); }},
        {"topology.wired_mu", [](Scenario& s, const std::string& v) { s.topology.wired_mu = to_double(v); }},
        {"topology.file", [](Scenario& s, const std::string& v) { s.topology.file = v; }},
        {"users.count", [](Scenario& s, const std::string& v) { s.users = static_cast<int>(to_int(v)); }},
        {"users.lambda", [](Scenario& s, const std::string& v) { s.lambda = to_double(v); }},
        {"sfc.count", [](Scenario& s, const std::string& v) { s.sfc_count = static_cast<int>(to_int(v)); }},
        {"sfc.length", [](Scenario& s, const std::string& v) { s.sfc_length = static_cast<int>(to_int(v)); }},
        {"sfc.processing_s", [](Scenario& s, const std::string& v) { s.vnf_processing_s = to_double(v); }},
        {"sfc.e2e_limit_s", [](Scenario& s, const std::string& v) { s.e2e_limit_s = to_double(v); }},
        {"sfc.demand", [](Scenario& s, const std::string& v) { s.vnf_demand = to_resources(v); }},
        {"policy", [](Scenario& s, const std::string& v) { s.policy = parse_policy(v); }},
        {"policy.thresholds",
         [](Scenario& s, const std::string& v) {
             auto p = split(v, ',');
             if (p.size() != 3) throw std::invalid_argument("expected run,stage,fetch");
             s.thresholds = {to_double(p[0]), to_double(p[1]), to_double(p[2])};
         }},
        {"policy.demotion", [](Scenario& s, const std::string& v) { s.demotion = parse_demotion(v); }},
        {"policy.attachment_floor", [](Scenario& s, const std::string& v) { s.attachment_floor = to_bool(v); }},
        {"forecast.kind", [](Scenario& s, const std::string& v) { s.predictor = parse_predictor(v); }},
        {"forecast.k", [](Scenario& s, const std::string& v) { s.history_k = static_cast<int>(to_int(v)); }},
        {"forecast.h_seconds", [](Scenario& s, const std::string& v) { s.horizon_s = to_double(v); }},
        {"forecast.softness_m", [](Scenario& s, const std::string& v) { s.estimator_softness_m = to_double(v); }},
        {"mobility.alpha", [](Scenario& s, const std::string& v) { s.mobility.alpha = to_double(v); }},
        {"mobility.mean_speed", [](Scenario& s, const std::string& v) { s.mobility.mean_speed = to_double(v); }},
        {"mobility.sigma_speed", [](Scenario& s, const std::string& v) { s.mobility.sigma_speed = to_double(v); }},
        {"mobility.sigma_direction",
         [](Scenario& s, const std::string& v) { s.mobility.sigma_direction = to_double(v); }},
        {"mobility.tick_s", [](Scenario& s, const std::string& v) { s.mobility.tick = to_double(v); }},
        {"mobility.trace_file", [](Scenario& s, const std::string& v) { s.trace_file = v; }},
        {"connection.softness_m", [](Scenario& s, const std::string& v) { s.connection_softness_m = to_double(v); }},
        {"delay.t_p", [](Scenario& s, const std::string& v) { s.delay.t_p = to_double(v); }},
        {"delay.bandwidth_hz", [](Scenario& s, const std::string& v) { s.delay.bandwidth_hz = to_double(v); }},
        {"delay.snr_ref", [](Scenario& s, const std::string& v) { s.delay.snr_ref = to_double(v); }},
        {"delay.d_ref_m", [](Scenario& s, const std::string& v) { s.delay.d_ref_m = to_double(v); }},
        {"delay.pathloss_exponent",
         [](Scenario& s, const std::string& v) { s.delay.pathloss_exponent = to_double(v); }},
        {"delay.packet_bits", [](Scenario& s, const std::string& v) { s.delay.packet_size_bits = to_double(v); }},
        {"delay.plan_distance_m", [](Scenario& s, const std::string& v) { s.delay.plan_distance_m = to_double(v); }},
        {"sim.duration_s", [](Scenario& s, const std::string& v) { s.duration_s = to_double(v); }},
        {"sim.seeds",
         [](Scenario& s, const std::string& v) {
             s.seeds.clear();
             for (const auto& p : split(v, ',')) {
                 auto x = to_int(p);
                 if (x < 0) throw std::invalid_argument("seeds must be nonnegative");
                 s.seeds.push_back(static_cast<std::uint64_t>(x));
             }
         }},
        {"sim.warm_start", [](Scenario& s, const std::string& v) { s.warm_start = to_bool(v); }},
        {"sim.write_packets", [](Scenario& s, const std::string& v) { s.write_packets = to_bool(v); }},
    };
    return table;
}

}  // namespace

void Scenario::validate() const {
    const auto& t = topology;
    require(t.kind == "tree" || t.kind == "city" || t.kind == "file", "topology.kind", "must be tree, city or file");
    if (t.kind == "file") {
        require(!t.file.empty(), "topology.file", "required when topology.kind=file");
    } else {
        require(t.rows >= 1 && t.cols >= 1, "topology.rows/cols", "must be >= 1");
        require(t.spacing_m > 0, "topology.spacing_m", "must be > 0");
        require(t.capacity.nonnegative(), "topology.capacity", "must be nonnegative");
        require(t.wired_mu > 0, "topology.wired_mu", "must be > 0");
    }
    if (t.kind == "tree")
        require(t.mux >= 1 && (t.rows * t.cols) % t.mux == 0, "topology.mux", "must divide the number of base stations");
    require(users >= 1, "users.count", "must be >= 1");
    require(lambda > 0, "users.lambda", "must be > 0");
    require(sfc_count >= 1, "sfc.count", "must be >= 1");
    require(sfc_length >= 1, "sfc.length", "must be >= 1");
    require(vnf_processing_s >= 0, "sfc.processing_s", "must be >= 0");
    require(e2e_limit_s > 0, "sfc.e2e_limit_s", "must be > 0");
    require(vnf_demand.nonnegative(), "sfc.demand", "must be nonnegative");
    try {
        thresholds.validate();
    } catch (const std::exception& e) {
        throw InvalidScenario(std::string("policy.thresholds: ") + e.what());
    }
    require(history_k >= 1, "forecast.k", "must be >= 1");
    require(horizon_s >= 0, "forecast.h_seconds", "must be >= 0");
    require(estimator_softness_m >= 0, "forecast.softness_m", "must be >= 0");
    require(connection_softness_m >= 0, "connection.softness_m", "must be >= 0");
    try {
        mobility.validate();
    } catch (const std::exception& e) {
        throw InvalidScenario(std::string("mobility: ") + e.what());
    }
    try {
        delay.validate();
    } catch (const std::exception& e) {
        throw InvalidScenario(std::string("delay: ") + e.what());
    }
    require(duration_s >= 0, "sim.duration_s", "must be >= 0");
    require(!seeds.empty(), "sim.seeds", "must list at least one seed");
    for (const auto& e : transitions)
        require(e.seconds >= 0 && e.from != e.to, "transition", "needs two distinct states and a duration >= 0");
}

std::vector<SfcRequest> Scenario::sfc_catalog() const {
    std::vector<SfcRequest> out;
    for (int i = 0; i < sfc_count; ++i) {
        SfcRequest r;
        r.id = static_cast<SfcId>(i);
        for (int j = 0; j < sfc_length; ++j) r.vnfs.push_back(static_cast<VnfType>(i * sfc_length + j));
        r.e2e_limit = e2e_limit_s;
        r.processing.assign(static_cast<std::size_t>(sfc_length), vnf_processing_s);
        out.push_back(std::move(r));
    }
    return out;
}

TransitionTable Scenario::transition_table() const {
    auto table = default_transition_table();
    for (const auto& e : transitions) table.set(e.from, e.to, e.seconds);
    return table;
}

Scenario parse_scenario(std::istream& is, const std::string& base_dir) {
    Scenario s;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) -> void {
        throw InvalidScenario("line " + std::to_string(line_no) + ": " + what);
    };
    auto resolve = [&](std::string& path) {
        if (!path.empty() && !base_dir.empty() && std::filesystem::path(path).is_relative())
            path = (std::filesystem::path(base_dir) / path).lexically_normal().string();
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.rfind("transition", 0) == 0 && (line.size() == 10 || std::isspace(static_cast<unsigned char>(line[10])))) {
            std::istringstream ls(line.substr(10));
            std::string from, to, secs, extra;
            ls >> from >> to >> secs;
            if (secs.empty() || (ls >> extra)) fail("expected 'transition <from> <to> <seconds>'");
            auto f = parse_state(from);
            auto t = parse_state(to);
            if (!f) fail("unknown state '" + from + "'");
            if (!t) fail("unknown state '" + to + "'");
            try {
                s.transitions.push_back({*f, *t, to_double(secs)});
            } catch (const std::exception& e) {
                fail(e.what());
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key=value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        auto it = setters().find(key);
        if (it == setters().end()) fail("unknown key '" + key + "'");
        try {
            it->second(s, value);
        } catch (const InvalidScenario&) {
            throw;
        } catch (const std::exception& e) {
            fail(key + ": " + e.what());
        }
    }
    resolve(s.topology.file);
    resolve(s.trace_file);
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidScenario("cannot open config '" + path + "'");
    return parse_scenario(in, std::filesystem::path(path).parent_path().string());
}

void emit_scenario(std::ostream& os, const Scenario& s) {
    const auto& t = s.topology;
    os << "topology.kind=" << t.kind << '\n'
       << "topology.rows=" << t.rows << '\n'
       << "topology.cols=" << t.cols << '\n'
       << "topology.mux=" << t.mux << '\n'
       << "topology.spacing_m=" << fmt::format("{}", t.spacing_m) << '\n'
       << "topology.capacity=" << fmt_resources(t.capacity) << '\n'
       << "topology.wired_mu=" << fmt::format("{}", t.wired_mu) << '\n';
    if (!t.file.empty()) os << "topology.file=" << t.file << '\n';
    os << "users.count=" << s.users << '\n'
       << "users.lambda=" << fmt::format("{}", s.lambda) << '\n'
       << "sfc.count=" << s.sfc_count << '\n'
       << "sfc.length=" << s.sfc_length << '\n'
       << "sfc.processing_s=" << fmt::format("{}", s.vnf_processing_s) << '\n'
       << "sfc.e2e_limit_s=" << fmt::format("{}", s.e2e_limit_s) << '\n'
       << "sfc.demand=" << fmt_resources(s.vnf_demand) << '\n'
       << "policy=" << to_string(s.policy) << '\n'
       << "policy.thresholds="
       << fmt::format("{},{},{}", s.thresholds.run, s.thresholds.stage, s.thresholds.fetch) << '\n'
       << "policy.demotion=" << to_string(s.demotion) << '\n'
       << "policy.attachment_floor=" << (s.attachment_floor ? "true" : "false") << '\n'
       << "forecast.kind=" << to_string(s.predictor) << '\n'
       << "forecast.k=" << s.history_k << '\n'
       << "forecast.h_seconds=" << fmt::format("{}", s.horizon_s) << '\n'
       << "forecast.softness_m=" << fmt::format("{}", s.estimator_softness_m) << '\n'
       << "mobility.alpha=" << fmt::format("{}", s.mobility.alpha) << '\n'
       << "mobility.mean_speed=" << fmt::format("{}", s.mobility.mean_speed) << '\n'
       << "mobility.sigma_speed=" << fmt::format("{}", s.mobility.sigma_speed) << '\n'
       << "mobility.sigma_direction=" << fmt::format("{}", s.mobility.sigma_direction) << '\n'
       << "mobility.tick_s=" << fmt::format("{}", s.mobility.tick) << '\n';
    if (!s.trace_file.empty()) os << "mobility.trace_file=" << s.trace_file << '\n';
    os << "connection.softness_m=" << fmt::format("{}", s.connection_softness_m) << '\n'
       << "delay.t_p=" << fmt::format("{}", s.delay.t_p) << '\n'
       << "delay.bandwidth_hz=" << fmt::format("{}", s.delay.bandwidth_hz) << '\n'
       << "delay.snr_ref=" << fmt::format("{}", s.delay.snr_ref) << '\n'
       << "delay.d_ref_m=" << fmt::format("{}", s.delay.d_ref_m) << '\n'
       << "delay.pathloss_exponent=" << fmt::format("{}", s.delay.pathloss_exponent) << '\n'
       << "delay.packet_bits=" << fmt::format("{}", s.delay.packet_size_bits) << '\n'
       << "delay.plan_distance_m=" << fmt::format("{}", s.delay.plan_distance_m) << '\n'
       << "sim.duration_s=" << fmt::format("{}", s.duration_s) << '\n'
       << "sim.seeds=";
    for (std::size_t i = 0; i < s.seeds.size(); ++i) os << (i ? "," : "") << s.seeds[i];
    os << '\n'
       << "sim.warm_start=" << (s.warm_start ? "true" : "false") << '\n'
       << "sim.write_packets=" << (s.write_packets ? "true" : "false") << '\n';
    for (const auto& e : s.transitions)
        os << "transition " << to_string(e.from) << ' ' << to_string(e.to) << ' ' << fmt::format("{}", e.seconds)
           << '\n';
}

SubstrateNetwork build_network(const TopologySpec& spec) {
    if (spec.kind == "tree")
        return build_tree(spec.rows * spec.cols, spec.mux, grid_positions(spec.rows, spec.cols, spec.spacing_m),
                          spec.capacity, spec.wired_mu);
    if (spec.kind == "city") return build_city_grid(spec.rows, spec.cols, spec.spacing_m, spec.capacity, spec.wired_mu);
    std::ifstream in(spec.file);
    if (!in) throw InvalidScenario("topology.file: cannot open '" + spec.file + "'");
    return read_topology(in);
}

}  // namespace ripple
