#pragma once

// Seeded random knowledge bases for cross-checking the rule evaluator
// against the reference interpreter. Small by construction: at most five
// summaries over at most three distinct neighbours.

#include "fogcolony/model.hpp"

#include <random>
#include <vector>

namespace testgen {

class KbGen {
public:
    explicit KbGen(std::uint64_t seed) : rng_(seed) {}

    fogcolony::KnowledgeBase next() {
        using fogcolony::Hw;
        using fogcolony::SourceId;
        fogcolony::KnowledgeBase kb;
        kb.service.service_id = "svc";
        kb.service.required_hw = pick_int(0, 5);
        kb.service.max_request_rate = pick_int(1, 10) * 0.5 + 0.5;
        kb.service.max_latency_to_client = pick_int(0, 20);
        kb.node_id = "n0";
        kb.free_hw = pick_int(0, 9) == 0 ? Hw::unbounded() : Hw::units(pick_int(0, 8));
        kb.instance = {"s1", "svc", "n0"};

        int summaries = pick_int(0, 5);
        for (int i = 0; i < summaries; ++i) {
            fogcolony::RequestSummary r;
            r.instance_id = "s1";
            r.neighbour = pick_source(true);
            r.rate = pick_int(0, 12) * 0.5;
            r.latency_to_client = r.neighbour.is_self() ? 0.0 : pick_int(1, 30);
            kb.requests.push_back(std::move(r));
        }

        int records = pick_int(0, 4);
        for (int i = 0; i < records; ++i) {
            fogcolony::InhibitionRecord rec;
            rec.kind = pick_int(0, 1) == 0 ? fogcolony::OpKind::Migrate
                                           : fogcolony::OpKind::Replicate;
            rec.instance_id = "s1";
            rec.target = pick_source(true);
            rec.cycle = pick_int(0, 3);
            kb.inhibited.push_back(std::move(rec));
        }
        return kb;
    }

private:
    std::mt19937_64 rng_;

    int pick_int(int lo, int hi) {
        return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    fogcolony::SourceId pick_source(bool allow_self) {
        int v = pick_int(allow_self ? 0 : 1, 3);
        if (v == 0) return fogcolony::SourceId::self();
        return fogcolony::SourceId::node("n" + std::to_string(v));
    }
};

} // namespace testgen
