#pragma once

#include "fogcolony/model.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fogcolony {

enum class Tier { Cloud, MiniDc, Edge, Ap };

const char* tier_name(Tier t);
std::optional<Tier> tier_from_name(const std::string& name);
const char* tier_prefix(Tier t);

struct TopoNode {
    std::string id;
    Tier tier = Tier::Cloud;
    Hw capacity;
    std::optional<std::array<double, 2>> position; // metres; AP tier only
};

struct TopoLink {
    std::string a;
    std::string b;
    double latency_ms = 0;
};

class Topology {
public:
    void add_node(TopoNode node);
    void add_link(const std::string& a, const std::string& b, double latency_ms);

    bool has_node(const std::string& id) const { return nodes_.count(id) != 0; }
    const TopoNode& node(const std::string& id) const;
    const std::map<std::string, TopoNode>& nodes() const { return nodes_; }
    const std::vector<TopoLink>& links() const { return links_; }

    /// Direct neighbours with link latencies, sorted by node id.
    const std::vector<std::pair<std::string, double>>&
    neighbours(const std::string& id) const;

    bool adjacent(const std::string& a, const std::string& b) const;

    std::vector<std::string> nodes_of_tier(Tier t) const;

private:
    std::map<std::string, TopoNode> nodes_;
    std::vector<TopoLink> links_;
    std::map<std::string, std::vector<std::pair<std::string, double>>> adj_;
    static const std::vector<std::pair<std::string, double>> no_neighbours_;
};

struct TierSpec {
    Tier tier = Tier::Cloud;
    int count = 0;
    Hw hw;
    double downlink_latency_ms = 0; // latency of links to the tier below
};

struct ApGridSpec {
    double width_m = 0;
    double height_m = 0;
    double spacing_m = 0;
};

struct TopologySpec {
    std::vector<TierSpec> tiers; // top (cloud) first; last tier carries the APs
    ApGridSpec grid;
};

/// Row-major grid positions at cell centres; one per whole spacing step that
/// fits the area.
std::vector<std::array<double, 2>> gen_grid_aps(double width_m, double height_m,
                                                double spacing_m);

/// Builds the tiered tree: node i of a tier attaches to parent i mod
/// parent_count; ids are tier-prefixed; AP-tier nodes get grid positions.
Topology build_tiered_topology(const TopologySpec& spec);

struct PathResult {
    std::vector<std::string> path; // src..dst inclusive
    double latency_ms = 0;
};

/// Minimum-latency path; equal-latency alternatives resolve to the
/// lexicographically smallest node-id sequence.
PathResult shortest_latency_path(const Topology& topo, const std::string& src,
                                 const std::string& dst);

struct UserAttachment {
    std::string user_id;
    std::string app_id;
    std::string ap_id;
    double rate = 1.0; // normalised request rate contributed by this user
};

struct Flow {
    std::string user_id;
    std::string instance_id;
    std::vector<std::string> path; // user's AP .. instance host
    double latency_ms = 0;
    double rate = 0;
};

struct FlowAssignment {
    std::vector<Flow> flows;
    std::vector<std::string> dropped_users; // users whose app has no live instance
};

/// Assigns every user to the minimum-latency live instance of its app.
/// Ties break to the instance on the smallest node id, then the smallest
/// instance id. A user co-located with an instance gets latency 0.
FlowAssignment route_users(const Topology& topo,
                           const std::vector<UserAttachment>& users,
                           const std::vector<ServiceInstance>& instances);

/// Folds an instance's incoming flows into last-hop request summaries: one
/// summary per (last hop, path latency) group, rates summed; flows starting
/// on the host itself group under self with latency 0.
std::vector<RequestSummary> summarise_requests(const FlowAssignment& assignment,
                                               const ServiceInstance& instance);

/// Node/edge CSV pair for external plotting.
void export_topology_csv(const Topology& topo, const std::string& nodes_path,
                         const std::string& edges_path);

} // namespace fogcolony
