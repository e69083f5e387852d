#include "doctest.h"
#include "fixtures.hpp"
#include "kb_gen.hpp"
#include "policy_oracle.hpp"

#include "fogcolony/policy.hpp"

#include <functional>

using namespace fogcolony;

namespace {

std::string describe(const std::optional<Operation>& op) {
    if (!op) return "nop";
    return std::string(op_kind_name(op->kind)) + "(" + op->target.str() + ")";
}

std::string describe_kb(const KnowledgeBase& kb) {
    std::string out = "max_rate=" + std::to_string(kb.service.max_request_rate) +
                      " max_lat=" + std::to_string(kb.service.max_latency_to_client) +
                      " free=" + kb.free_hw.str() +
                      " required=" + std::to_string(kb.service.required_hw);
    for (const auto& r : kb.requests)
        out += " req(" + r.neighbour.str() + "," + std::to_string(r.rate) + "," +
               std::to_string(r.latency_to_client) + ")";
    for (const auto& rec : kb.inhibited)
        out += " inh(" + std::string(op_kind_name(rec.kind)) + "," + rec.target.str() + ")";
    return out;
}

} // namespace

TEST_CASE("rule evaluator matches the reference interpreter on random knowledge bases") {
    using OracleFn = std::function<std::optional<Operation>(const KnowledgeBase&)>;
    const std::pair<const char*, OracleFn> policies[] = {
        {"policy1", oracle::policy1},
        {"policy2", oracle::policy2},
        {"policy3", oracle::policy3},
        {"policy4", oracle::policy4},
    };
    for (const auto& [name, reference] : policies) {
        auto program = fixtures::load_bundled(name);
        testgen::KbGen gen(0xC0FFEE ^ std::hash<std::string>{}(name));
        for (int i = 0; i < 1500; ++i) {
            KnowledgeBase kb = gen.next();
            auto got = policy::evaluate(program, kb);
            auto want = reference(kb);
            if (got != want) {
                CAPTURE(name);
                CAPTURE(i);
                CAPTURE(describe_kb(kb));
                CHECK_MESSAGE(got == want, "evaluator ", describe(got),
                              " vs reference ", describe(want));
                return;
            }
        }
        CHECK(true);
    }
}

TEST_CASE("remembered migrate refusals only push policy4 down its clause list") {
    auto program = fixtures::load_bundled("policy4");
    policy::PolicyProgram without_migrate = program;
    without_migrate.rules.erase(without_migrate.rules.begin() + 1);
    REQUIRE(program.rules[1].action == policy::Action::Migrate);

    testgen::KbGen gen(99);
    int exercised = 0;
    for (int i = 0; i < 3000; ++i) {
        KnowledgeBase kb = gen.next();
        auto before = policy::evaluate(program, kb);
        if (!before || before->kind != OpKind::Migrate) continue;
        ++exercised;
        kb.inhibited.push_back({OpKind::Migrate, kb.instance.instance_id, before->target, 0});
        auto after = policy::evaluate(program, kb);
        // With the migrate clause muted the outcome must equal the program
        // without that clause: never another migrate, never anything earlier.
        auto expected = policy::evaluate(without_migrate, kb);
        CAPTURE(describe_kb(kb));
        CHECK(after == expected);
        if (after) CHECK(after->kind != OpKind::Migrate);
    }
    CHECK(exercised > 100); // the generator must actually hit migrate outputs
}
