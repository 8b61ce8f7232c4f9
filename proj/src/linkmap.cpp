#include "ripple/linkmap.hpp"

#include <limits>
#include <stdexcept>

namespace ripple {

void SfcRequest::validate() const {
    if (vnfs.empty()) throw std::invalid_argument("SFC must contain at least one VNF");
    if (!(e2e_limit > 0.0)) throw std::invalid_argument("SFC e2e limit must be positive");
    if (processing.size() != vnfs.size()) throw std::invalid_argument("SFC needs one processing time per VNF");
    for (double p : processing)
        if (!(p >= 0.0)) throw std::invalid_argument("VNF processing time must be >= 0");
}

RunningSets running_sets(const Deployment& d) {
    RunningSets out(d.num_types());
    for (std::size_t v = 0; v < d.num_types(); ++v) out[v] = d.serving_locations(static_cast<VnfType>(v));
    return out;
}

EmbedResult embed_links(UserId user, NodeId attached_bs, const SfcRequest& sfc, const SubstrateNetwork& net,
                        const RunningSets& running) {
    Embedding emb;
    emb.user = user;
    emb.total_path = {attached_bs};
    NodeId cur = attached_bs;
    for (std::size_t layer = 0; layer < sfc.vnfs.size(); ++layer) {
        const VnfType v = sfc.vnfs[layer];
        const auto& candidates = v < running.size() ? running[v] : std::vector<NodeId>{};
        NodeId best = 0;
        int best_d = std::numeric_limits<int>::max();
        for (NodeId e : candidates) {
            int d = net.hop_distance(cur, e);
            if (d < best_d) {
                best_d = d;
                best = e;
            }
        }
        if (best_d == std::numeric_limits<int>::max()) return MissingVnf{layer, v};
        auto path = net.hop_path(cur, best);
        EmbeddingHop hop{v, best, {path.begin() + 1, path.end()}};
        emb.total_path.insert(emb.total_path.end(), hop.segment.begin(), hop.segment.end());
        emb.hops.push_back(std::move(hop));
        cur = best;
    }
    return emb;
}

}  // namespace ripple
