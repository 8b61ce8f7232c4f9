#pragma once

#include <limits>
#include <vector>

#include "ripple/topology.hpp"

namespace ripple {

inline constexpr double kSaturated = std::numeric_limits<double>::infinity();

/// Delay-model parameters. The wireless rate follows a log-distance SNR,
/// snr(d) = snr_ref * (d_ref / max(d, d_ref))^pathloss_exponent, fed into
/// Shannon capacity.
struct DelayParams {
    double t_p = 1e-5;                 // per-node processing, seconds
    double bandwidth_hz = 20e6;
    double snr_ref = 100.0;            // linear
    double d_ref_m = 10.0;
    double pathloss_exponent = 2.0;
    double packet_size_bits = 1000.0;
    /// User distance assumed by the planner's zero-load latency check.
    double plan_distance_m = 150.0;

    void validate() const;
};

/// Expected sojourn time of an M/M/1 queue; kSaturated when lambda >= mu.
double mm1_sojourn(double lambda, double mu);

/// Expected sojourn time of an M/D/1 queue; kSaturated when lambda >= mu.
double md1_sojourn(double lambda, double mu);

/// Shannon-bounded service rate in packets/s of a wireless hop of the given length.
double wireless_rate(double distance_m, const DelayParams& params);

/// One traversed wired link: its service rate and aggregate arrival rate.
struct WiredHop {
    double lambda;
    double mu;
};

/// Inputs of an end-to-end delay evaluation over one embedded chain.
struct ChainPath {
    std::vector<NodeId> nodes;         // substrate nodes visited, BS first; may be empty
    std::vector<WiredHop> wired_hops;  // one per consecutive node pair
    double wireless_lambda = 0.0;
    double wireless_mu = 0.0;          // <= 0 means no wireless hop
    std::vector<double> vnf_processing;
};

/// Sum of the wireless M/M/1 hop, one M/D/1 term per wired hop, t_p per
/// visited node and each VNF's processing time. Saturation propagates as
/// kSaturated.
double e2e_delay(const ChainPath& path, const DelayParams& params);

/// Zero-load delay of a chain whose VNFs are visited along `nodes`, with the
/// wireless hop evaluated at params.plan_distance_m.
double zero_load_delay(const SubstrateNetwork& net, const std::vector<NodeId>& nodes,
                       const std::vector<double>& vnf_processing, const DelayParams& params);

}  // namespace ripple
