#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "ripple/lifecycle.hpp"
#include "ripple/mobility.hpp"
#include "ripple/queueing.hpp"
#include "ripple/topology.hpp"

namespace ripple {

using SfcId = std::uint32_t;

/// A chain of VNF types, head first, with its latency budget.
struct SfcRequest {
    SfcId id = 0;
    std::vector<VnfType> vnfs;
    double e2e_limit = 1e-3;
    std::vector<double> processing;  // seconds, one per VNF

    void validate() const;  // throws std::invalid_argument
};

struct EmbeddingHop {
    VnfType vnf = 0;
    NodeId cloud = 0;
    std::vector<NodeId> segment;  // nodes stepped through after the previous cloud, ending at `cloud`
};

struct Embedding {
    UserId user = 0;
    std::vector<EmbeddingHop> hops;
    std::vector<NodeId> total_path;  // attached BS first
};

struct MissingVnf {
    std::size_t layer = 0;
    VnfType vnf = 0;
};

using EmbedResult = std::variant<Embedding, MissingVnf>;

/// Clouds currently able to serve each VNF type, ascending by id.
using RunningSets = std::vector<std::vector<NodeId>>;

RunningSets running_sets(const Deployment& d);

/// Greedy virtual-link embedding: the hop-closest Running head from the
/// attached BS, then the hop-closest Running successor from each chosen
/// cloud. Ties go to the lowest cloud id.
EmbedResult embed_links(UserId user, NodeId attached_bs, const SfcRequest& sfc, const SubstrateNetwork& net,
                        const RunningSets& running);

}  // namespace ripple
