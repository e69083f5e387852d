#pragma once

#include "fogcolony/model.hpp"
#include "fogcolony/policy.hpp"
#include "fogcolony/topology.hpp"

#include <map>
#include <vector>

namespace fogcolony {

struct AssessConfig {
    /// Inhibit an undeploy that would leave its application with zero
    /// instances. Off reproduces the literal semantics.
    bool protect_last_instance = true;
};

struct CollectResult {
    std::vector<OperationRequest> requests; // agent-id order, deploys last
    std::vector<std::string> malformed;     // rejected at collection, with reason
    int nops = 0;                           // agents that requested nothing
};

/// Builds the cycle's request set R: at most one operation per agent (its
/// policy's first-match output over the given knowledge base) plus all
/// operator deploys. Migrate-to-self is dropped as a nop; migrate/replicate
/// to a non-neighbour is rejected as malformed.
CollectResult collect_requests(const InfrastructureState& state, const Topology& topo,
                               const std::map<std::uint64_t, KnowledgeBase>& kb_per_agent,
                               const std::map<std::uint64_t, const policy::PolicyProgram*>& programs,
                               const std::vector<OperationRequest>& operator_deploys);

struct Assessment {
    std::vector<OperationRequest> accepted;
    std::vector<OperationRequest> inhibited;
};

/// Assesses R in order against a per-node hardware ledger: a request is
/// accepted iff the ledger still covers the service's requirement at the
/// node receiving the instance (undeploys always pass, unbounded nodes
/// always accept). Accepted requests debit the ledger immediately, so the
/// accepted set is always jointly enactable.
Assessment assess(const std::vector<OperationRequest>& requests,
                  const InfrastructureState& state, const AssessConfig& config = {});

/// Enacts all accepted requests in parallel against the pre-state: agent
/// sets gain deploys, migrate-ins and fresh replicas, lose undeploys and
/// migrate-outs; hardware is recomputed. Throws if the post-state fails
/// validation.
InfrastructureState enact(const InfrastructureState& state,
                          const std::vector<OperationRequest>& accepted);

/// Replaces the knowledge of every node covered by the update (rule r2);
/// agents, policies and placements are untouched.
InfrastructureState refresh_context(const InfrastructureState& state,
                                    const ContextUpdate& update);

/// Appends an inhibition record to each inhibited agent's memory and evicts
/// records that fall outside the memory window. Window 0 means no memory.
void record_inhibitions(const CycleLabel& label, InfrastructureState& state,
                        int memory_window);

/// The strictly local view an agent evaluates its policy over.
KnowledgeBase assemble_kb(const InfrastructureState& state, std::uint64_t agent_id);

} // namespace fogcolony
