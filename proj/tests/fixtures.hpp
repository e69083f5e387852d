#pragma once

// Shared helpers for unit and acceptance tests.

#include "fogcolony/model.hpp"
#include "fogcolony/policy.hpp"

#include <string>

namespace fixtures {

inline std::string repo_path(const std::string& rel) {
    return std::string(FOGCOLONY_ROOT) + "/" + rel;
}

inline fogcolony::policy::PolicyProgram load_bundled(const std::string& name) {
    return fogcolony::policy::parse_policy_file(repo_path("policies/" + name + ".fp"));
}

/// The video-broadcast example: instance s1 of a service needing 4 hw units,
/// serving at most 10 rate units within 25 ms, hosted on n42 with 10 free
/// units; one co-located client and two clients arriving through n41 over
/// paths of 15 and 16 ms.
inline fogcolony::KnowledgeBase broadcast_kb() {
    using fogcolony::SourceId;
    fogcolony::KnowledgeBase kb;
    kb.service = {"videoBroadcast", 4, 10, 25};
    kb.node_id = "n42";
    kb.free_hw = fogcolony::Hw::units(10);
    kb.instance = {"s1", "videoBroadcast", "n42"};
    kb.requests = {
        {"s1", SourceId::self(), 5, 0},
        {"s1", SourceId::node("n41"), 1, 15},
        {"s1", SourceId::node("n41"), 1, 16},
    };
    return kb;
}

} // namespace fixtures
