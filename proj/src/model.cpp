#include "fogcolony/model.hpp"

#include <sstream>

namespace fogcolony {

std::string Hw::str() const {
    return unbounded_ ? "unbounded" : std::to_string(units_);
}

const char* op_kind_name(OpKind k) {
    switch (k) {
    case OpKind::Deploy: return "deploy";
    case OpKind::Undeploy: return "undeploy";
    case OpKind::Migrate: return "migrate";
    case OpKind::Replicate: return "replicate";
    }
    return "?";
}

std::optional<OpKind> op_kind_from_name(const std::string& name) {
    if (name == "deploy") return OpKind::Deploy;
    if (name == "undeploy") return OpKind::Undeploy;
    if (name == "migrate") return OpKind::Migrate;
    if (name == "replicate") return OpKind::Replicate;
    return std::nullopt;
}

std::vector<std::string> validate_state(const InfrastructureState& state) {
    std::vector<std::string> out;
    auto fail = [&out](const std::string& msg) { out.push_back(msg); };

    for (const auto& [sid, spec] : state.services) {
        if (spec.service_id != sid)
            fail("service " + sid + ": key does not match service_id field");
        if (spec.required_hw < 0)
            fail("service " + sid + ": required_hw < 0");
        if (!(spec.max_request_rate > 0))
            fail("service " + sid + ": max_request_rate must be > 0");
        if (spec.max_latency_to_client < 0)
            fail("service " + sid + ": max_latency_to_client < 0");
    }

    // Each agent id must appear in exactly one node's agent set, and that
    // node must be the agent's instance host.
    std::map<std::uint64_t, std::vector<std::string>> seen_on;
    for (const auto& [nid, node] : state.nodes) {
        for (std::uint64_t a : node.agents) {
            seen_on[a].push_back(nid);
            if (!state.agents.count(a))
                fail("node " + nid + ": hosts unknown agent " + std::to_string(a));
        }
    }
    std::set<std::string> instance_ids;
    for (const auto& [aid, agent] : state.agents) {
        if (agent.agent_id != aid)
            fail("agent " + std::to_string(aid) + ": key does not match agent_id field");
        if (!instance_ids.insert(agent.instance.instance_id).second)
            fail("agent " + std::to_string(aid) + ": duplicate instance id " +
                 agent.instance.instance_id);
        if (!state.services.count(agent.instance.service_id))
            fail("agent " + std::to_string(aid) + ": unknown service " +
                 agent.instance.service_id);
        auto node_it = state.nodes.find(agent.instance.node_id);
        if (node_it == state.nodes.end()) {
            fail("agent " + std::to_string(aid) + ": host node " +
                 agent.instance.node_id + " does not exist");
            continue;
        }
        auto on = seen_on.find(aid);
        if (on == seen_on.end()) {
            fail("agent " + std::to_string(aid) + ": not present in any node's agent set");
        } else {
            if (on->second.size() > 1) {
                std::ostringstream m;
                m << "agent " << aid << ": present in " << on->second.size() << " agent sets (";
                for (std::size_t i = 0; i < on->second.size(); ++i)
                    m << (i ? ", " : "") << on->second[i];
                m << ")";
                fail(m.str());
            }
            if (on->second.front() != agent.instance.node_id &&
                on->second.size() == 1)
                fail("agent " + std::to_string(aid) + ": hosted on " + on->second.front() +
                     " but instance records node " + agent.instance.node_id);
        }
    }

    // Hardware conservation: free = capacity - sum(required over hosted).
    for (const auto& [nid, node] : state.nodes) {
        if (node.node_id != nid)
            fail("node " + nid + ": key does not match node_id field");
        if (node.capacity.is_unbounded()) {
            if (!node.free.is_unbounded())
                fail("node " + nid + ": unbounded capacity but bounded free_hw");
            continue;
        }
        if (node.free.is_unbounded()) {
            fail("node " + nid + ": bounded capacity but unbounded free_hw");
            continue;
        }
        std::int64_t used = 0;
        for (std::uint64_t a : node.agents) {
            auto it = state.agents.find(a);
            if (it == state.agents.end()) continue;
            auto svc = state.services.find(it->second.instance.service_id);
            if (svc != state.services.end()) used += svc->second.required_hw;
        }
        if (node.free.units() != node.capacity.units() - used)
            fail("node " + nid + ": free_hw " + std::to_string(node.free.units()) +
                 " != capacity " + std::to_string(node.capacity.units()) + " - used " +
                 std::to_string(used));
        if (node.free.units() < 0)
            fail("node " + nid + ": free_hw " + std::to_string(node.free.units()) + " < 0");
    }

    return out;
}

std::uint64_t fresh_agent_id(const InfrastructureState& state) {
    if (state.agents.empty()) return 0;
    return state.agents.rbegin()->first + 1;
}

} // namespace fogcolony
