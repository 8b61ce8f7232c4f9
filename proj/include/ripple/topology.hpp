#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ripple {

using NodeId = std::uint32_t;

struct TopologyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientResources : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// CPU, memory and disk units. Arithmetic is componentwise.
struct ResourceVector {
    int cpu = 0;
    int memory = 0;
    int disk = 0;

    ResourceVector& operator+=(const ResourceVector& o) {
        cpu += o.cpu;
        memory += o.memory;
        disk += o.disk;
        return *this;
    }
    ResourceVector& operator-=(const ResourceVector& o) {
        cpu -= o.cpu;
        memory -= o.memory;
        disk -= o.disk;
        return *this;
    }
    friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
    friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) { return a -= b; }
    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;

    /// True when every component of *this is <= the matching one of `o`.
    bool fits_within(const ResourceVector& o) const {
        return cpu <= o.cpu && memory <= o.memory && disk <= o.disk;
    }
    bool nonnegative() const { return cpu >= 0 && memory >= 0 && disk >= 0; }
    int total() const { return cpu + memory + disk; }

    static ResourceVector max(const ResourceVector& a, const ResourceVector& b);
};

std::ostream& operator<<(std::ostream& os, const ResourceVector& r);

/// Compute, memory and disk attached to a base station or multiplexing node.
class EdgeCloud {
public:
    EdgeCloud() = default;
    explicit EdgeCloud(ResourceVector capacity);

    const ResourceVector& capacity() const { return capacity_; }
    const ResourceVector& in_use() const { return in_use_; }
    ResourceVector headroom() const { return capacity_ - in_use_; }
    bool can_reserve(const ResourceVector& r) const { return (in_use_ + r).fits_within(capacity_); }

    /// Throws InsufficientResources and leaves in_use untouched when `r` does not fit.
    void reserve(const ResourceVector& r);
    void release(const ResourceVector& r);

private:
    ResourceVector capacity_{};
    ResourceVector in_use_{};
};

enum class NodeKind { BaseStation, Multiplexing, Root };
enum class LinkKind { Wired, Wireless };

const char* to_string(NodeKind k);
const char* to_string(LinkKind k);

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);

struct SubstrateNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::BaseStation;
    std::optional<Point> position;  // base stations only
    EdgeCloud edge_cloud;
};

struct Link {
    NodeId a = 0;
    NodeId b = 0;
    LinkKind kind = LinkKind::Wired;
    double service_rate = 0.0;    // packets/s
    double current_lambda = 0.0;  // packets/s
};

/// Base stations, multiplexing nodes and the links between them. Node ids are
/// dense indices into nodes(). Only EdgeCloud usage and link loads change after
/// construction.
class SubstrateNetwork {
public:
    SubstrateNetwork() = default;

    /// Validates connectivity and per-kind invariants, then precomputes hop
    /// distances. Throws TopologyError.
    SubstrateNetwork(std::vector<SubstrateNode> nodes, std::vector<Link> links);

    std::size_t size() const { return nodes_.size(); }
    const std::vector<SubstrateNode>& nodes() const { return nodes_; }
    const SubstrateNode& node(NodeId id) const { return nodes_.at(id); }
    EdgeCloud& edge_cloud(NodeId id) { return nodes_.at(id).edge_cloud; }
    const EdgeCloud& edge_cloud(NodeId id) const { return nodes_.at(id).edge_cloud; }

    const std::vector<Link>& links() const { return links_; }
    std::vector<Link>& links() { return links_; }
    /// Index into links() of the link joining a and b, if any.
    std::optional<std::size_t> link_index(NodeId a, NodeId b) const;

    const std::vector<NodeId>& neighbors(NodeId id) const { return adjacency_.at(id); }
    const std::vector<NodeId>& base_stations() const { return bs_set_; }
    const std::vector<NodeId>& mux_nodes() const { return mux_set_; }
    std::optional<NodeId> root() const { return root_; }
    bool is_base_station(NodeId id) const { return node(id).kind == NodeKind::BaseStation; }

    /// Shortest path by hop count, inclusive of both endpoints. Ties prefer the
    /// lowest node id at each expansion.
    std::vector<NodeId> hop_path(NodeId a, NodeId b) const;
    int hop_distance(NodeId a, NodeId b) const;

    /// Base stations for which `e` is a nearest node of its own kind. For a
    /// base station this is just itself; for a tree root it is every BS.
    const std::vector<NodeId>& catchment(NodeId e) const { return catchment_.at(e); }

    /// Base station closest to a point (lowest id on ties).
    NodeId nearest_base_station(const Point& p) const;

    /// Bounding box of base-station positions padded by `margin` on every side.
    std::pair<Point, Point> bounds(double margin) const;

    void write(std::ostream& os) const;

private:
    std::vector<SubstrateNode> nodes_;
    std::vector<Link> links_;
    std::vector<std::vector<NodeId>> adjacency_;
    std::vector<NodeId> bs_set_;
    std::vector<NodeId> mux_set_;
    std::optional<NodeId> root_;
    std::vector<int> dist_;     // size()*size() hop counts
    std::vector<int> link_of_;  // size()*size() link index or -1
    std::vector<std::vector<NodeId>> catchment_;
};

/// Three-layer tree: base stations 0..num_bs-1, multiplexing nodes after them,
/// root last. Base station i hangs off mux i / (num_bs / num_mux).
SubstrateNetwork build_tree(int num_bs, int num_mux, const std::vector<Point>& bs_positions,
                            ResourceVector capacity, double wired_mu = 10000.0);

/// Row-major rows x cols grid of base stations spaced bs_spacing apart, one
/// multiplexing node per row, muxes chained row to row. No root.
SubstrateNetwork build_city_grid(int rows, int cols, double bs_spacing, ResourceVector capacity,
                                 double wired_mu = 10000.0);

/// Row-major grid of positions with the first point at (spacing/2, spacing/2).
std::vector<Point> grid_positions(int rows, int cols, double spacing);

/// Parses the line-oriented `node ...` / `link ...` format emitted by write().
SubstrateNetwork read_topology(std::istream& is);

}  // namespace ripple
