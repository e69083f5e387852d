#include "fogcolony/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>

namespace fogcolony {

const char* tier_name(Tier t) {
    switch (t) {
    case Tier::Cloud: return "cloud";
    case Tier::MiniDc: return "mini-dc";
    case Tier::Edge: return "edge";
    case Tier::Ap: return "ap";
    }
    return "?";
}

std::optional<Tier> tier_from_name(const std::string& name) {
    if (name == "cloud") return Tier::Cloud;
    if (name == "mini-dc" || name == "minidc") return Tier::MiniDc;
    if (name == "edge") return Tier::Edge;
    if (name == "ap") return Tier::Ap;
    return std::nullopt;
}

const char* tier_prefix(Tier t) {
    switch (t) {
    case Tier::Cloud: return "cloud";
    case Tier::MiniDc: return "dc";
    case Tier::Edge: return "edge";
    case Tier::Ap: return "ap";
    }
    return "n";
}

const std::vector<std::pair<std::string, double>> Topology::no_neighbours_;

void Topology::add_node(TopoNode node) {
    std::string id = node.id;
    nodes_[id] = std::move(node);
}

void Topology::add_link(const std::string& a, const std::string& b, double latency_ms) {
    if (!has_node(a) || !has_node(b))
        throw std::invalid_argument("link endpoint not in topology: " + a + "-" + b);
    if (latency_ms <= 0)
        throw std::invalid_argument("link latency must be > 0: " + a + "-" + b);
    links_.push_back({a, b, latency_ms});
    auto insert_sorted = [](std::vector<std::pair<std::string, double>>& v,
                            const std::string& id, double w) {
        auto pos = std::lower_bound(v.begin(), v.end(), id,
                                    [](const auto& p, const std::string& s) {
                                        return p.first < s;
                                    });
        v.insert(pos, {id, w});
    };
    insert_sorted(adj_[a], b, latency_ms);
    insert_sorted(adj_[b], a, latency_ms);
}

const TopoNode& Topology::node(const std::string& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw std::out_of_range("unknown node: " + id);
    return it->second;
}

const std::vector<std::pair<std::string, double>>&
Topology::neighbours(const std::string& id) const {
    auto it = adj_.find(id);
    return it == adj_.end() ? no_neighbours_ : it->second;
}

bool Topology::adjacent(const std::string& a, const std::string& b) const {
    for (const auto& [n, w] : neighbours(a))
        if (n == b) return true;
    return false;
}

std::vector<std::string> Topology::nodes_of_tier(Tier t) const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes_)
        if (n.tier == t) out.push_back(id);
    return out;
}

std::vector<std::array<double, 2>> gen_grid_aps(double width_m, double height_m,
                                                double spacing_m) {
    if (spacing_m <= 0)
        throw std::invalid_argument("grid spacing must be > 0");
    int cols = static_cast<int>(std::floor(width_m / spacing_m));
    int rows = static_cast<int>(std::floor(height_m / spacing_m));
    if (cols <= 0 || rows <= 0)
        throw std::invalid_argument("degenerate AP grid area");
    std::vector<std::array<double, 2>> out;
    out.reserve(static_cast<std::size_t>(cols) * rows);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out.push_back({c * spacing_m + spacing_m / 2, r * spacing_m + spacing_m / 2});
    return out;
}

Topology build_tiered_topology(const TopologySpec& spec) {
    if (spec.tiers.empty())
        throw std::invalid_argument("topology needs at least one tier");
    auto positions = gen_grid_aps(spec.grid.width_m, spec.grid.height_m,
                                  spec.grid.spacing_m);
    Topology topo;
    std::vector<std::vector<std::string>> ids_per_tier;
    for (std::size_t t = 0; t < spec.tiers.size(); ++t) {
        const TierSpec& tier = spec.tiers[t];
        bool is_ap_tier = t + 1 == spec.tiers.size();
        int count = tier.count;
        if (is_ap_tier) {
            if (count == 0) count = static_cast<int>(positions.size());
            if (count != static_cast<int>(positions.size()))
                throw std::invalid_argument(
                    "AP tier count does not match the grid (" + std::to_string(count) +
                    " vs " + std::to_string(positions.size()) + ")");
        }
        if (count <= 0)
            throw std::invalid_argument(std::string("tier ") + tier_name(tier.tier) +
                                        " has no nodes");
        std::vector<std::string> ids;
        for (int i = 0; i < count; ++i) {
            TopoNode n;
            n.id = std::string(tier_prefix(tier.tier)) + std::to_string(i);
            n.tier = tier.tier;
            n.capacity = tier.hw;
            if (is_ap_tier) n.position = positions[i];
            ids.push_back(n.id);
            topo.add_node(std::move(n));
        }
        ids_per_tier.push_back(std::move(ids));
    }
    for (std::size_t t = 1; t < ids_per_tier.size(); ++t) {
        const auto& parents = ids_per_tier[t - 1];
        double latency = spec.tiers[t - 1].downlink_latency_ms;
        for (std::size_t i = 0; i < ids_per_tier[t].size(); ++i)
            topo.add_link(ids_per_tier[t][i], parents[i % parents.size()], latency);
    }
    return topo;
}

namespace {

constexpr double kLatencyEps = 1e-9;

std::map<std::string, double> dijkstra(const Topology& topo, const std::string& src) {
    std::map<std::string, double> dist;
    using Item = std::pair<double, std::string>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[src] = 0;
    heap.push({0, src});
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        auto it = dist.find(u);
        if (it != dist.end() && d > it->second + kLatencyEps) continue;
        for (const auto& [v, w] : topo.neighbours(u)) {
            double nd = d + w;
            auto vit = dist.find(v);
            if (vit == dist.end() || nd < vit->second - kLatencyEps) {
                dist[v] = nd;
                heap.push({nd, v});
            }
        }
    }
    return dist;
}

// Walks from src towards dst picking, at every step, the smallest-id
// neighbour that stays on a minimum-latency path. dist_to_dst must be the
// distance map computed from dst.
std::vector<std::string> min_lex_path(const Topology& topo, const std::string& src,
                                      const std::string& dst,
                                      const std::map<std::string, double>& dist_to_dst) {
    std::vector<std::string> path{src};
    std::string u = src;
    while (u != dst) {
        double du = dist_to_dst.at(u);
        const std::string* next = nullptr;
        for (const auto& [v, w] : topo.neighbours(u)) {
            auto it = dist_to_dst.find(v);
            if (it == dist_to_dst.end()) continue;
            if (std::abs(w + it->second - du) <= kLatencyEps) {
                next = &v;
                break; // neighbours are sorted by id
            }
        }
        if (!next)
            throw std::runtime_error("no path from " + src + " to " + dst);
        path.push_back(*next);
        u = *next;
    }
    return path;
}

} // namespace

PathResult shortest_latency_path(const Topology& topo, const std::string& src,
                                 const std::string& dst) {
    if (!topo.has_node(src) || !topo.has_node(dst))
        throw std::out_of_range("shortest_latency_path: unknown endpoint");
    if (src == dst) return {{src}, 0};
    auto dist = dijkstra(topo, dst);
    auto it = dist.find(src);
    if (it == dist.end())
        throw std::runtime_error("unreachable: " + src + " -> " + dst);
    return {min_lex_path(topo, src, dst, dist), it->second};
}

FlowAssignment route_users(const Topology& topo,
                           const std::vector<UserAttachment>& users,
                           const std::vector<ServiceInstance>& instances) {
    FlowAssignment out;
    // Distance maps from every node that hosts an instance; reused for both
    // instance selection and path reconstruction.
    std::map<std::string, std::map<std::string, double>> dist_from_host;
    for (const auto& inst : instances)
        if (!dist_from_host.count(inst.node_id))
            dist_from_host[inst.node_id] = dijkstra(topo, inst.node_id);

    for (const auto& user : users) {
        if (!topo.has_node(user.ap_id))
            throw std::out_of_range("route_users: unknown AP " + user.ap_id);
        const ServiceInstance* best = nullptr;
        double best_latency = std::numeric_limits<double>::infinity();
        for (const auto& inst : instances) {
            if (inst.service_id != user.app_id) continue;
            auto& dist = dist_from_host[inst.node_id];
            auto it = dist.find(user.ap_id);
            if (it == dist.end()) continue;
            double lat = it->second;
            if (!best || lat < best_latency ||
                (lat == best_latency &&
                 (inst.node_id < best->node_id ||
                  (inst.node_id == best->node_id &&
                   inst.instance_id < best->instance_id)))) {
                best = &inst;
                best_latency = lat;
            }
        }
        if (!best) {
            out.dropped_users.push_back(user.user_id);
            continue;
        }
        Flow f;
        f.user_id = user.user_id;
        f.instance_id = best->instance_id;
        f.rate = user.rate;
        if (user.ap_id == best->node_id) {
            f.path = {user.ap_id};
            f.latency_ms = 0;
        } else {
            f.path = min_lex_path(topo, user.ap_id, best->node_id,
                                  dist_from_host[best->node_id]);
            f.latency_ms = best_latency;
        }
        out.flows.push_back(std::move(f));
    }
    return out;
}

std::vector<RequestSummary> summarise_requests(const FlowAssignment& assignment,
                                               const ServiceInstance& instance) {
    std::map<std::pair<SourceId, double>, double> groups;
    for (const auto& f : assignment.flows) {
        if (f.instance_id != instance.instance_id) continue;
        SourceId hop = f.path.size() < 2
                           ? SourceId::self()
                           : SourceId::node(f.path[f.path.size() - 2]);
        double latency = hop.is_self() ? 0.0 : f.latency_ms;
        groups[{hop, latency}] += f.rate;
    }
    std::vector<RequestSummary> out;
    for (const auto& [key, rate] : groups)
        out.push_back({instance.instance_id, key.first, rate, key.second});
    return out;
}

void export_topology_csv(const Topology& topo, const std::string& nodes_path,
                         const std::string& edges_path) {
    std::ofstream nodes(nodes_path);
    if (!nodes)
        throw std::runtime_error("cannot write " + nodes_path);
    nodes << "node_id,tier,capacity,x_m,y_m\n";
    for (const auto& [id, n] : topo.nodes()) {
        nodes << id << "," << tier_name(n.tier) << "," << n.capacity.str() << ",";
        if (n.position)
            nodes << (*n.position)[0] << "," << (*n.position)[1];
        else
            nodes << ",";
        nodes << "\n";
    }
    std::ofstream edges(edges_path);
    if (!edges)
        throw std::runtime_error("cannot write " + edges_path);
    edges << "a,b,latency_ms\n";
    for (const auto& l : topo.links())
        edges << l.a << "," << l.b << "," << l.latency_ms << "\n";
}

} // namespace fogcolony
