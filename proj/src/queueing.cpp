#include "ripple/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ripple {

void DelayParams::validate() const {
    if (!(t_p > 0 && bandwidth_hz > 0 && snr_ref > 0 && d_ref_m > 0 && pathloss_exponent > 0 &&
          packet_size_bits > 0 && plan_distance_m >= 0))
        throw std::invalid_argument("delay parameters must be positive");
}

double mm1_sojourn(double lambda, double mu) {
    if (lambda >= mu) return kSaturated;
    return 1.0 / (mu - lambda);
}

double md1_sojourn(double lambda, double mu) {
    if (lambda >= mu) return kSaturated;
    return 1.0 / mu + lambda / (2.0 * mu * (mu - lambda));
}

double wireless_rate(double distance_m, const DelayParams& params) {
    const double d = std::max(distance_m, params.d_ref_m);
    const double snr = params.snr_ref * std::pow(params.d_ref_m / d, params.pathloss_exponent);
    return params.bandwidth_hz * std::log2(1.0 + snr) / params.packet_size_bits;
}

double e2e_delay(const ChainPath& path, const DelayParams& params) {
    double total = 0.0;
    if (path.wireless_mu > 0) total += mm1_sojourn(path.wireless_lambda, path.wireless_mu);
    for (const auto& hop : path.wired_hops) total += md1_sojourn(hop.lambda, hop.mu);
    total += params.t_p * static_cast<double>(path.nodes.size());
    for (double p : path.vnf_processing) total += p;
    return total;
}

double zero_load_delay(const SubstrateNetwork& net, const std::vector<NodeId>& nodes,
                       const std::vector<double>& vnf_processing, const DelayParams& params) {
    ChainPath path;
    path.nodes = nodes;
    path.wireless_mu = wireless_rate(params.plan_distance_m, params);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        auto li = net.link_index(nodes[i], nodes[i + 1]);
        if (!li) throw std::logic_error("zero_load_delay: path visits non-adjacent nodes");
        path.wired_hops.push_back({0.0, net.links()[*li].service_rate});
    }
    path.vnf_processing = vnf_processing;
    return e2e_delay(path, params);
}

}  // namespace ripple
