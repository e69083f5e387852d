#include "fogcolony/orchestrator.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fogcolony {

CollectResult collect_requests(const InfrastructureState& state, const Topology& topo,
                               const std::map<std::uint64_t, KnowledgeBase>& kb_per_agent,
                               const std::map<std::uint64_t, const policy::PolicyProgram*>& programs,
                               const std::vector<OperationRequest>& operator_deploys) {
    CollectResult out;
    for (const auto& [aid, agent] : state.agents) {
        auto kb_it = kb_per_agent.find(aid);
        if (kb_it == kb_per_agent.end())
            throw std::invalid_argument("collect_requests: no knowledge base for agent " +
                                        std::to_string(aid));
        auto prog_it = programs.find(aid);
        if (prog_it == programs.end() || !prog_it->second)
            throw std::invalid_argument("collect_requests: no policy for agent " +
                                        std::to_string(aid));
        auto op = policy::evaluate(*prog_it->second, kb_it->second);
        if (!op) {
            ++out.nops;
            continue;
        }
        const std::string& source = agent.instance.node_id;
        if (op->kind == OpKind::Migrate && op->target.is_self()) {
            ++out.nops; // moving onto the current node changes nothing
            continue;
        }
        OperationRequest req;
        req.agent_id = aid;
        req.source_node = source;
        req.kind = op->kind;
        req.policy_target = op->target;
        req.target_node = op->target.is_self() ? source : op->target.node_id();
        if ((req.kind == OpKind::Migrate || req.kind == OpKind::Replicate) &&
            req.target_node != source && !topo.adjacent(source, req.target_node)) {
            std::ostringstream m;
            m << "agent " << aid << ": " << op_kind_name(req.kind) << " target "
              << req.target_node << " is not a neighbour of " << source;
            out.malformed.push_back(m.str());
            continue;
        }
        out.requests.push_back(std::move(req));
    }
    for (const auto& d : operator_deploys) {
        if (d.kind != OpKind::Deploy) {
            out.malformed.push_back("operator request is not a deploy");
            continue;
        }
        if (!d.deploy) {
            out.malformed.push_back("deploy request without payload");
            continue;
        }
        if (!state.nodes.count(d.target_node)) {
            out.malformed.push_back("deploy targets unknown node " + d.target_node);
            continue;
        }
        if (!state.services.count(d.deploy->service_id)) {
            out.malformed.push_back("deploy references unknown service " +
                                    d.deploy->service_id);
            continue;
        }
        if (state.agents.count(d.agent_id)) {
            out.malformed.push_back("deploy reuses live agent id " +
                                    std::to_string(d.agent_id));
            continue;
        }
        out.requests.push_back(d);
    }
    return out;
}

namespace {

std::int64_t required_hw_of(const InfrastructureState& state,
                            const OperationRequest& req) {
    std::string service_id;
    if (req.kind == OpKind::Deploy) {
        service_id = req.deploy->service_id;
    } else {
        service_id = state.agents.at(req.agent_id).instance.service_id;
    }
    return state.services.at(service_id).required_hw;
}

std::string service_of(const InfrastructureState& state, const OperationRequest& req) {
    if (req.kind == OpKind::Deploy) return req.deploy->service_id;
    return state.agents.at(req.agent_id).instance.service_id;
}

} // namespace

Assessment assess(const std::vector<OperationRequest>& requests,
                  const InfrastructureState& state, const AssessConfig& config) {
    Assessment out;
    // Projected post-state free hardware per node; accepted requests debit
    // and credit it immediately so later requests see what will remain.
    std::map<std::string, Hw> ledger;
    for (const auto& [nid, node] : state.nodes) ledger[nid] = node.free;
    std::map<std::string, std::int64_t> projected_live;
    for (const auto& [aid, agent] : state.agents)
        ++projected_live[agent.instance.service_id];

    for (const auto& req : requests) {
        std::int64_t required = required_hw_of(state, req);
        switch (req.kind) {
        case OpKind::Undeploy: {
            const std::string& svc = service_of(state, req);
            if (config.protect_last_instance && projected_live[svc] <= 1) {
                out.inhibited.push_back(req);
                break;
            }
            ledger[req.source_node] = ledger[req.source_node].plus(required);
            --projected_live[svc];
            out.accepted.push_back(req);
            break;
        }
        case OpKind::Migrate: {
            Hw& target = ledger[req.target_node];
            if (!target.covers(required)) {
                out.inhibited.push_back(req);
                break;
            }
            target = target.minus(required);
            ledger[req.source_node] = ledger[req.source_node].plus(required);
            out.accepted.push_back(req);
            break;
        }
        case OpKind::Replicate:
        case OpKind::Deploy: {
            Hw& target = ledger[req.target_node];
            if (!target.covers(required)) {
                out.inhibited.push_back(req);
                break;
            }
            target = target.minus(required);
            ++projected_live[service_of(state, req)];
            out.accepted.push_back(req);
            break;
        }
        }
    }
    return out;
}

InfrastructureState enact(const InfrastructureState& state,
                          const std::vector<OperationRequest>& accepted) {
    InfrastructureState next = state;

    // Fresh replica ids start past every live id and every operator-chosen
    // deploy id, and are assigned in requesting-agent order, so the result
    // does not depend on the order of the accepted set.
    std::uint64_t counter = fresh_agent_id(state);
    std::vector<const OperationRequest*> replicates;
    for (const auto& req : accepted) {
        if (req.kind == OpKind::Deploy)
            counter = std::max(counter, req.agent_id + 1);
        if (req.kind == OpKind::Replicate) replicates.push_back(&req);
    }
    std::sort(replicates.begin(), replicates.end(),
              [](const OperationRequest* a, const OperationRequest* b) {
                  return a->agent_id < b->agent_id;
              });

    for (const auto& req : accepted) {
        switch (req.kind) {
        case OpKind::Undeploy:
            next.agents.erase(req.agent_id);
            break;
        case OpKind::Migrate: {
            auto it = next.agents.find(req.agent_id);
            if (it == next.agents.end())
                throw std::logic_error("enact: migrate of unknown agent");
            it->second.instance.node_id = req.target_node;
            break;
        }
        case OpKind::Deploy: {
            ManagementAgent agent;
            agent.agent_id = req.agent_id;
            agent.instance = {req.deploy->instance_id, req.deploy->service_id,
                              req.target_node};
            agent.policy_id = req.deploy->policy_id;
            if (!next.agents.emplace(agent.agent_id, std::move(agent)).second)
                throw std::logic_error("enact: deploy id collision");
            break;
        }
        case OpKind::Replicate:
            break; // handled below in canonical order
        }
    }
    for (const OperationRequest* req : replicates) {
        const ManagementAgent& parent = state.agents.at(req->agent_id);
        ManagementAgent replica;
        replica.agent_id = counter++;
        replica.instance.service_id = parent.instance.service_id;
        replica.instance.instance_id =
            parent.instance.service_id + "_" + std::to_string(replica.agent_id);
        replica.instance.node_id = req->target_node;
        replica.policy_id = parent.policy_id;
        next.agents.emplace(replica.agent_id, std::move(replica));
    }

    // Rebuild agent sets and hardware from the surviving placements.
    for (auto& [nid, node] : next.nodes) node.agents.clear();
    for (const auto& [aid, agent] : next.agents) {
        auto it = next.nodes.find(agent.instance.node_id);
        if (it == next.nodes.end())
            throw std::logic_error("enact: agent placed on unknown node " +
                                   agent.instance.node_id);
        it->second.agents.insert(aid);
    }
    for (auto& [nid, node] : next.nodes) {
        if (node.capacity.is_unbounded()) {
            node.free = Hw::unbounded();
            continue;
        }
        std::int64_t used = 0;
        for (std::uint64_t aid : node.agents)
            used += next.services.at(next.agents.at(aid).instance.service_id).required_hw;
        node.free = Hw::units(node.capacity.units() - used);
    }

    auto violations = validate_state(next);
    if (!violations.empty()) {
        std::ostringstream m;
        m << "enact produced an invalid state:";
        for (const auto& v : violations) m << "\n  " << v;
        throw std::logic_error(m.str());
    }
    return next;
}

InfrastructureState refresh_context(const InfrastructureState& state,
                                    const ContextUpdate& update) {
    InfrastructureState next = state;
    for (const auto& [nid, summaries] : update.by_node) {
        auto it = next.nodes.find(nid);
        if (it == next.nodes.end())
            throw std::invalid_argument("refresh_context: unknown node " + nid);
        it->second.knowledge = summaries;
    }
    return next;
}

void record_inhibitions(const CycleLabel& label, InfrastructureState& state,
                        int memory_window) {
    for (const auto& req : label.inhibited) {
        if (req.kind == OpKind::Deploy) continue; // operator requests have no agent memory
        auto it = state.agents.find(req.agent_id);
        if (it == state.agents.end()) continue;
        it->second.memory.push_back({req.kind, it->second.instance.instance_id,
                                     req.policy_target, label.cycle});
    }
    // A record from cycle c is readable at cycles c+1 .. c+window.
    for (auto& [aid, agent] : state.agents) {
        std::erase_if(agent.memory, [&](const InhibitionRecord& rec) {
            return rec.cycle + static_cast<std::uint64_t>(memory_window) <= label.cycle;
        });
    }
}

KnowledgeBase assemble_kb(const InfrastructureState& state, std::uint64_t agent_id) {
    const ManagementAgent& agent = state.agents.at(agent_id);
    const NodeState& host = state.nodes.at(agent.instance.node_id);
    KnowledgeBase kb;
    kb.service = state.services.at(agent.instance.service_id);
    kb.node_id = host.node_id;
    kb.free_hw = host.free;
    kb.instance = agent.instance;
    for (const auto& r : host.knowledge)
        if (r.instance_id == agent.instance.instance_id) kb.requests.push_back(r);
    kb.inhibited = agent.memory;
    return kb;
}

} // namespace fogcolony
