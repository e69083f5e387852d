#include "policy_oracle.hpp"

#include <algorithm>
#include <set>
#include <vector>

namespace oracle {

using fogcolony::KnowledgeBase;
using fogcolony::OpKind;
using fogcolony::Operation;
using fogcolony::RequestSummary;
using fogcolony::SourceId;

namespace {

struct Triple {
    SourceId hop;
    double rate;
    double lat;
};

std::vector<Triple> collect(const std::vector<RequestSummary>& requests) {
    std::vector<Triple> out;
    for (const auto& r : requests) out.push_back({r.neighbour, r.rate, r.latency_to_client});
    return out;
}

double total_rate(const std::vector<Triple>& reqs) {
    double t = 0;
    for (const auto& r : reqs) t += r.rate;
    return t;
}

bool any_violating(const std::vector<Triple>& reqs, double max_lat) {
    for (const auto& r : reqs)
        if (r.lat > max_lat) return true;
    return false;
}

std::vector<Triple> violating(const std::vector<Triple>& reqs, double max_lat) {
    std::vector<Triple> out;
    for (const auto& r : reqs)
        if (r.lat > max_lat) out.push_back(r);
    return out;
}

// The sources of all requests, deduplicated and sorted; the "migrate" clauses
// need this list to be the singleton [M] with M distinct from self.
std::optional<SourceId> singleton_source(const std::vector<Triple>& reqs) {
    std::set<SourceId> sources;
    for (const auto& r : reqs) sources.insert(r.hop);
    if (sources.size() != 1) return std::nullopt;
    if (sources.begin()->is_self()) return std::nullopt;
    return *sources.begin();
}

// Busiest source: per-hop rate totals sorted by (rate descending, id
// ascending with self last).
std::optional<SourceId> most_requests_from(const std::vector<Triple>& reqs) {
    std::vector<std::pair<SourceId, double>> groups;
    for (const auto& r : reqs) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == r.hop; });
        if (it == groups.end())
            groups.push_back({r.hop, r.rate});
        else
            it->second += r.rate;
    }
    if (groups.empty()) return std::nullopt;
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return groups.front().first;
}

bool inhibited(const KnowledgeBase& kb, OpKind kind, const SourceId& target) {
    for (const auto& rec : kb.inhibited)
        if (rec.kind == kind && rec.instance_id == kb.instance.instance_id &&
            rec.target == target)
            return true;
    return false;
}

Operation migrate_to(const SourceId& m) { return {OpKind::Migrate, m}; }
Operation replicate_to(const SourceId& m) { return {OpKind::Replicate, m}; }
Operation undeploy_self() { return {OpKind::Undeploy, SourceId::self()}; }

} // namespace

std::optional<Operation> policy1(const KnowledgeBase& kb) {
    auto reqs = collect(kb.requests);

    if (reqs.empty()) return undeploy_self();

    if (total_rate(reqs) > kb.service.max_request_rate) {
        auto m = singleton_source(reqs);
        if (m) return migrate_to(*m);
    }

    if (total_rate(reqs) > kb.service.max_request_rate) {
        auto m = most_requests_from(reqs);
        if (m) {
            if (!m->is_self()) return replicate_to(*m);
            if (kb.free_hw.covers(kb.service.required_hw)) return replicate_to(*m);
        }
    }

    return std::nullopt;
}

std::optional<Operation> policy2(const KnowledgeBase& kb) {
    auto reqs = collect(kb.requests);
    double max_lat = kb.service.max_latency_to_client;

    if (reqs.empty()) return undeploy_self();

    if (any_violating(reqs, max_lat)) {
        auto m = singleton_source(reqs);
        if (m) return migrate_to(*m);
    }

    if (any_violating(reqs, max_lat)) {
        auto filtered = violating(reqs, max_lat);
        if (!filtered.empty()) {
            auto m = most_requests_from(filtered);
            if (m) return replicate_to(*m);
        }
    }

    return std::nullopt;
}

std::optional<Operation> policy3(const KnowledgeBase& kb) {
    auto reqs = collect(kb.requests);
    double max_lat = kb.service.max_latency_to_client;

    if (reqs.empty()) return undeploy_self();

    if (total_rate(reqs) > kb.service.max_request_rate || any_violating(reqs, max_lat)) {
        auto m = singleton_source(reqs);
        if (m) return migrate_to(*m);
    }

    if (total_rate(reqs) > kb.service.max_request_rate || any_violating(reqs, max_lat)) {
        auto filtered = violating(reqs, max_lat);
        if (filtered.empty()) {
            auto m = most_requests_from(reqs);
            if (m) {
                if (!m->is_self()) return replicate_to(*m);
                if (kb.free_hw.covers(kb.service.required_hw)) return replicate_to(*m);
            }
        } else {
            auto m = most_requests_from(filtered);
            if (m) return replicate_to(*m);
        }
    }

    return std::nullopt;
}

std::optional<Operation> policy4(const KnowledgeBase& kb) {
    auto reqs = collect(kb.requests);
    double max_lat = kb.service.max_latency_to_client;

    if (reqs.empty()) return undeploy_self();

    // Migrate clause: the memory guard applies to the resolved target.
    if (total_rate(reqs) > kb.service.max_request_rate || any_violating(reqs, max_lat)) {
        auto m = singleton_source(reqs);
        if (m && !inhibited(kb, OpKind::Migrate, *m)) return migrate_to(*m);
    }

    // Replicate clause: every step works on the requests whose last hop was
    // not recently refused a replicate.
    std::vector<Triple> view;
    for (const auto& r : reqs)
        if (!inhibited(kb, OpKind::Replicate, r.hop)) view.push_back(r);

    if (total_rate(view) > kb.service.max_request_rate || any_violating(view, max_lat)) {
        auto filtered = violating(view, max_lat);
        if (filtered.empty()) {
            auto m = most_requests_from(view);
            if (m) {
                if (!m->is_self()) return replicate_to(*m);
                if (kb.free_hw.covers(kb.service.required_hw)) return replicate_to(*m);
            }
        } else {
            auto m = most_requests_from(filtered);
            if (m) return replicate_to(*m);
        }
    }

    return std::nullopt;
}

} // namespace oracle
