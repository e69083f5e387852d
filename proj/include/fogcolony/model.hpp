#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fogcolony {

/// Hardware amount: a non-negative number of generic units, or unbounded
/// (cloud-tier nodes always satisfy capacity checks).
class Hw {
public:
    constexpr Hw() = default;
    static constexpr Hw unbounded() {
        Hw h;
        h.unbounded_ = true;
        return h;
    }
    static constexpr Hw units(std::int64_t u) {
        Hw h;
        h.units_ = u;
        return h;
    }

    constexpr bool is_unbounded() const { return unbounded_; }
    constexpr std::int64_t units() const { return units_; }

    constexpr bool covers(std::int64_t required) const {
        return unbounded_ || units_ >= required;
    }
    constexpr Hw minus(std::int64_t u) const {
        return unbounded_ ? *this : units(units_ - u);
    }
    constexpr Hw plus(std::int64_t u) const {
        return unbounded_ ? *this : units(units_ + u);
    }

    constexpr bool operator==(const Hw& o) const {
        return unbounded_ == o.unbounded_ && (unbounded_ || units_ == o.units_);
    }

    std::string str() const;

private:
    bool unbounded_ = false;
    std::int64_t units_ = 0;
};

/// A request's last hop or an operation target: either a concrete node id or
/// the distinguished value "self" (the agent's own host). Ordering is
/// lexicographic on node ids with self sorting after every node id, which is
/// the tie-break order used by target resolution.
class SourceId {
public:
    SourceId() = default; // self
    static SourceId self() { return SourceId(); }
    static SourceId node(std::string id) {
        SourceId s;
        s.self_ = false;
        s.node_ = std::move(id);
        return s;
    }

    bool is_self() const { return self_; }
    const std::string& node_id() const { return node_; }

    bool operator==(const SourceId& o) const {
        return self_ == o.self_ && node_ == o.node_;
    }
    bool operator<(const SourceId& o) const {
        if (self_ != o.self_) return !self_; // nodes before self
        return node_ < o.node_;
    }

    std::string str() const { return self_ ? "self" : node_; }

private:
    bool self_ = true;
    std::string node_;
};

struct ServiceSpec {
    std::string service_id;
    std::int64_t required_hw = 0;
    double max_request_rate = 0;       // rate units per measurement window
    double max_latency_to_client = 0;  // ms

    bool operator==(const ServiceSpec&) const = default;
};

struct ServiceInstance {
    std::string instance_id;
    std::string service_id;
    std::string node_id;

    bool operator==(const ServiceInstance&) const = default;
};

struct RequestSummary {
    std::string instance_id;
    SourceId neighbour;             // last hop, or self for co-located clients
    double rate = 0;
    double latency_to_client = 0;   // ms; 0 when neighbour is self

    bool operator==(const RequestSummary&) const = default;
};

enum class OpKind { Deploy, Undeploy, Migrate, Replicate };

const char* op_kind_name(OpKind k);
std::optional<OpKind> op_kind_from_name(const std::string& name);

/// A policy decision: what to do and where. Undeploy always targets self.
struct Operation {
    OpKind kind = OpKind::Undeploy;
    SourceId target;

    bool operator==(const Operation& o) const {
        return kind == o.kind && target == o.target;
    }
};

struct InhibitionRecord {
    OpKind kind = OpKind::Migrate;
    std::string instance_id;
    SourceId target;
    std::uint64_t cycle = 0; // management cycle in which the request was inhibited
};

/// The strictly local fact set one management agent may read: its service
/// spec, the host's free hardware, its own instance record, the last-hop
/// request summaries, and its recently inhibited requests.
struct KnowledgeBase {
    ServiceSpec service;
    std::string node_id;
    Hw free_hw;
    ServiceInstance instance;
    std::vector<RequestSummary> requests;
    std::vector<InhibitionRecord> inhibited;
};

struct ManagementAgent {
    std::uint64_t agent_id = 0;
    ServiceInstance instance;
    std::string policy_id;
    std::vector<InhibitionRecord> memory; // windowed inhibition records
};

struct DeployPayload {
    std::string service_id;
    std::string policy_id;
    std::string instance_id;
};

/// One element of the cycle's request set R.
struct OperationRequest {
    std::uint64_t agent_id = 0;
    std::string source_node;
    OpKind kind = OpKind::Undeploy;
    SourceId policy_target;              // as emitted by the policy (may be self)
    std::string target_node;             // resolved: self -> source node
    std::optional<DeployPayload> deploy; // operator deploys only
};

/// The label L = A ∪ inhibited(R − A) emitted by one management cycle.
struct CycleLabel {
    std::uint64_t cycle = 0;
    std::vector<OperationRequest> accepted;
    std::vector<OperationRequest> inhibited;
};

struct NodeState {
    std::string node_id;
    Hw capacity;
    Hw free;
    std::set<std::uint64_t> agents;
    std::vector<RequestSummary> knowledge;  // request summaries for hosted instances
    std::string acceptance_policy = "default";
};

struct InfrastructureState {
    std::map<std::string, NodeState> nodes;
    std::map<std::uint64_t, ManagementAgent> agents;
    std::map<std::string, ServiceSpec> services;
};

/// Replacement knowledge per node (rule r2); nodes not listed keep theirs.
struct ContextUpdate {
    std::map<std::string, std::vector<RequestSummary>> by_node;
};

/// Checks every structural invariant of the state. Violations are data, not
/// failures: each entry names the offending node/agent and the broken rule.
std::vector<std::string> validate_state(const InfrastructureState& state);

/// Smallest agent id not present in the state. Derived from the live ids so
/// identical runs allocate identical ids.
std::uint64_t fresh_agent_id(const InfrastructureState& state);

} // namespace fogcolony
