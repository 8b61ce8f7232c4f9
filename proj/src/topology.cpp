#include "ripple/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace ripple {

ResourceVector ResourceVector::max(const ResourceVector& a, const ResourceVector& b) {
    return {std::max(a.cpu, b.cpu), std::max(a.memory, b.memory), std::max(a.disk, b.disk)};
}

std::ostream& operator<<(std::ostream& os, const ResourceVector& r) {
    return os << '(' << r.cpu << ',' << r.memory << ',' << r.disk << ')';
}

EdgeCloud::EdgeCloud(ResourceVector capacity) : capacity_(capacity) {
    if (!capacity.nonnegative()) throw TopologyError("edge cloud capacity must be nonnegative");
}

void EdgeCloud::reserve(const ResourceVector& r) {
    if (!can_reserve(r)) {
        std::ostringstream msg;
        msg << "cannot reserve " << r << " with " << in_use_ << " of " << capacity_ << " in use";
        throw InsufficientResources(msg.str());
    }
    in_use_ += r;
}

void EdgeCloud::release(const ResourceVector& r) {
    ResourceVector next = in_use_ - r;
    if (!next.nonnegative()) throw TopologyError("edge cloud release below zero");
    in_use_ = next;
}

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::BaseStation: return "bs";
        case NodeKind::Multiplexing: return "mux";
        case NodeKind::Root: return "root";
    }
    return "?";
}

const char* to_string(LinkKind k) { return k == LinkKind::Wired ? "wired" : "wireless"; }

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

SubstrateNetwork::SubstrateNetwork(std::vector<SubstrateNode> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
    const auto n = nodes_.size();
    if (n == 0) throw TopologyError("network has no nodes");
    adjacency_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const auto& nd = nodes_[i];
        if (nd.id != i) throw TopologyError("node ids must be dense and ordered");
        if (nd.position.has_value() != (nd.kind == NodeKind::BaseStation))
            throw TopologyError("position must be present exactly for base stations");
        switch (nd.kind) {
            case NodeKind::BaseStation: bs_set_.push_back(nd.id); break;
            case NodeKind::Multiplexing: mux_set_.push_back(nd.id); break;
            case NodeKind::Root:
                if (root_) throw TopologyError("more than one root");
                root_ = nd.id;
                break;
        }
    }
    if (bs_set_.empty()) throw TopologyError("network has no base stations");
    link_of_.assign(n * n, -1);
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const auto& l = links_[i];
        if (l.a >= n || l.b >= n || l.a == l.b) throw TopologyError("link endpoints invalid");
        if (link_of_[l.a * n + l.b] >= 0) throw TopologyError("duplicate link");
        if (!(l.service_rate > 0)) throw TopologyError("link service rate must be positive");
        link_of_[l.a * n + l.b] = link_of_[l.b * n + l.a] = static_cast<int>(i);
        adjacency_[l.a].push_back(l.b);
        adjacency_[l.b].push_back(l.a);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());

    dist_.assign(n * n, -1);
    for (NodeId s = 0; s < n; ++s) {
        std::deque<NodeId> queue{s};
        dist_[s * n + s] = 0;
        while (!queue.empty()) {
            NodeId u = queue.front();
            queue.pop_front();
            for (NodeId w : adjacency_[u]) {
                if (dist_[s * n + w] < 0) {
                    dist_[s * n + w] = dist_[s * n + u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    if (std::any_of(dist_.begin(), dist_.end(), [](int d) { return d < 0; }))
        throw TopologyError("network is not connected");

    catchment_.assign(n, {});
    for (NodeId e = 0; e < n; ++e) {
        if (nodes_[e].kind == NodeKind::BaseStation) {
            catchment_[e] = {e};
            continue;
        }
        for (NodeId b : bs_set_) {
            int best = std::numeric_limits<int>::max();
            for (const auto& other : nodes_)
                if (other.kind == nodes_[e].kind) best = std::min(best, hop_distance(b, other.id));
            if (hop_distance(b, e) == best) catchment_[e].push_back(b);
        }
    }
}

std::optional<std::size_t> SubstrateNetwork::link_index(NodeId a, NodeId b) const {
    if (a >= size() || b >= size()) return std::nullopt;
    int i = link_of_[a * size() + b];
    if (i < 0) return std::nullopt;
    return static_cast<std::size_t>(i);
}

int SubstrateNetwork::hop_distance(NodeId a, NodeId b) const {
    if (a >= size() || b >= size()) throw TopologyError("unknown node id");
    return dist_[a * size() + b];
}

std::vector<NodeId> SubstrateNetwork::hop_path(NodeId a, NodeId b) const {
    if (a >= size() || b >= size()) throw TopologyError("unknown node id");
    // Walk forward from a, always stepping to the lowest-id neighbor that is one
    // hop closer to b. This is the BFS tree rooted at b read back from a.
    std::vector<NodeId> path{a};
    NodeId cur = a;
    while (cur != b) {
        int d = hop_distance(cur, b);
        bool advanced = false;
        for (NodeId w : adjacency_[cur]) {
            if (hop_distance(w, b) == d - 1) {
                cur = w;
                path.push_back(w);
                advanced = true;
                break;
            }
        }
        if (!advanced) throw TopologyError("internal inconsistency: unreachable pair");
    }
    return path;
}

NodeId SubstrateNetwork::nearest_base_station(const Point& p) const {
    NodeId best = bs_set_.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId b : bs_set_) {
        double d = distance(*nodes_[b].position, p);
        if (d < best_d) {
            best_d = d;
            best = b;
        }
    }
    return best;
}

std::pair<Point, Point> SubstrateNetwork::bounds(double margin) const {
    Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Point hi{-lo.x, -lo.y};
    for (NodeId b : bs_set_) {
        const auto& p = *nodes_[b].position;
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    return {{lo.x - margin, lo.y - margin}, {hi.x + margin, hi.y + margin}};
}

void SubstrateNetwork::write(std::ostream& os) const {
    for (const auto& nd : nodes_) {
        const auto& cap = nd.edge_cloud.capacity();
        os << "node " << nd.id << ' ' << to_string(nd.kind) << ' ';
        if (nd.position)
            os << nd.position->x << ' ' << nd.position->y;
        else
            os << "- -";
        os << ' ' << cap.cpu << ' ' << cap.memory << ' ' << cap.disk << '\n';
    }
    for (const auto& l : links_)
        os << "link " << l.a << ' ' << l.b << ' ' << to_string(l.kind) << ' ' << l.service_rate << '\n';
}

namespace {

SubstrateNode make_node(NodeId id, NodeKind kind, std::optional<Point> pos, ResourceVector cap) {
    return SubstrateNode{id, kind, pos, EdgeCloud(cap)};
}

}  // namespace

std::vector<Point> grid_positions(int rows, int cols, double spacing) {
    std::vector<Point> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out.push_back({spacing / 2 + c * spacing, spacing / 2 + r * spacing});
    return out;
}

SubstrateNetwork build_tree(int num_bs, int num_mux, const std::vector<Point>& bs_positions,
                            ResourceVector capacity, double wired_mu) {
    if (num_bs <= 0 || num_mux <= 0) throw TopologyError("tree needs at least one BS and one mux");
    if (num_bs % num_mux != 0) throw TopologyError("num_bs must be divisible by num_mux");
    if (static_cast<int>(bs_positions.size()) != num_bs)
        throw TopologyError("expected one position per base station");
    for (std::size_t i = 0; i < bs_positions.size(); ++i)
        for (std::size_t j = i + 1; j < bs_positions.size(); ++j)
            if (bs_positions[i] == bs_positions[j]) throw TopologyError("duplicate base station position");

    std::vector<SubstrateNode> nodes;
    std::vector<Link> links;
    const int per_mux = num_bs / num_mux;
    const auto root = static_cast<NodeId>(num_bs + num_mux);
    for (int i = 0; i < num_bs; ++i)
        nodes.push_back(make_node(i, NodeKind::BaseStation, bs_positions[i], capacity));
    for (int m = 0; m < num_mux; ++m) nodes.push_back(make_node(num_bs + m, NodeKind::Multiplexing, {}, capacity));
    nodes.push_back(make_node(root, NodeKind::Root, {}, capacity));

    for (int i = 0; i < num_bs; ++i)
        links.push_back({static_cast<NodeId>(i), static_cast<NodeId>(num_bs + i / per_mux), LinkKind::Wired, wired_mu, 0.0});
    for (int m = 0; m < num_mux; ++m)
        links.push_back({static_cast<NodeId>(num_bs + m), root, LinkKind::Wired, wired_mu, 0.0});
    return SubstrateNetwork(std::move(nodes), std::move(links));
}

SubstrateNetwork build_city_grid(int rows, int cols, double bs_spacing, ResourceVector capacity, double wired_mu) {
    if (rows < 1 || cols < 1) throw TopologyError("grid dimensions must be at least 1");
    if (!(bs_spacing > 0)) throw TopologyError("grid spacing must be positive");
    const auto positions = grid_positions(rows, cols, bs_spacing);
    const int num_bs = rows * cols;

    std::vector<SubstrateNode> nodes;
    std::vector<Link> links;
    for (int i = 0; i < num_bs; ++i)
        nodes.push_back(make_node(i, NodeKind::BaseStation, positions[i], capacity));
    for (int r = 0; r < rows; ++r) nodes.push_back(make_node(num_bs + r, NodeKind::Multiplexing, {}, capacity));

    for (int i = 0; i < num_bs; ++i)
        links.push_back({static_cast<NodeId>(i), static_cast<NodeId>(num_bs + i / cols), LinkKind::Wired, wired_mu, 0.0});
    for (int r = 0; r + 1 < rows; ++r)
        links.push_back({static_cast<NodeId>(num_bs + r), static_cast<NodeId>(num_bs + r + 1), LinkKind::Wired, wired_mu, 0.0});
    return SubstrateNetwork(std::move(nodes), std::move(links));
}

SubstrateNetwork read_topology(std::istream& is) {
    std::vector<SubstrateNode> nodes;
    std::vector<Link> links;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw TopologyError("topology line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(is, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "node") {
            NodeId id;
            std::string kind, xs, ys;
            ResourceVector cap;
            if (!(ls >> id >> kind >> xs >> ys >> cap.cpu >> cap.memory >> cap.disk)) fail("malformed node");
            NodeKind k;
            if (kind == "bs") k = NodeKind::BaseStation;
            else if (kind == "mux") k = NodeKind::Multiplexing;
            else if (kind == "root") k = NodeKind::Root;
            else fail("unknown node kind '" + kind + "'");
            std::optional<Point> pos;
            if (xs != "-" || ys != "-") {
                try {
                    pos = Point{std::stod(xs), std::stod(ys)};
                } catch (const std::exception&) {
                    fail("bad coordinates");
                }
            }
            if (id != nodes.size()) fail("node ids must appear in order starting at 0");
            nodes.push_back(SubstrateNode{id, k, pos, EdgeCloud(cap)});
        } else if (tag == "link") {
            Link l;
            std::string kind;
            if (!(ls >> l.a >> l.b >> kind >> l.service_rate)) fail("malformed link");
            if (kind == "wired") l.kind = LinkKind::Wired;
            else if (kind == "wireless") l.kind = LinkKind::Wireless;
            else fail("unknown link kind '" + kind + "'");
            links.push_back(l);
        } else {
            fail("unknown record '" + tag + "'");
        }
    }
    return SubstrateNetwork(std::move(nodes), std::move(links));
}

}  // namespace ripple
