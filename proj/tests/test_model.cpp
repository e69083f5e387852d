#include "fogcolony/model.hpp"

#include "doctest.h"

using namespace fogcolony;

namespace {

InfrastructureState two_node_state() {
    InfrastructureState s;
    s.services["app"] = {"app", 2, 5, 10};

    NodeState a;
    a.node_id = "n1";
    a.capacity = Hw::units(4);
    a.free = Hw::units(2);
    a.agents = {0};
    s.nodes["n1"] = a;

    NodeState b;
    b.node_id = "n2";
    b.capacity = Hw::units(4);
    b.free = Hw::units(4);
    s.nodes["n2"] = b;

    ManagementAgent agent;
    agent.agent_id = 0;
    agent.instance = {"app_0", "app", "n1"};
    agent.policy_id = "policy1";
    s.agents[0] = agent;
    return s;
}

} // namespace

TEST_CASE("consistent state validates cleanly") {
    CHECK(validate_state(two_node_state()).empty());
}

TEST_CASE("agent in two agent sets is a violation") {
    auto s = two_node_state();
    s.nodes["n2"].agents.insert(0);
    s.nodes["n2"].free = Hw::units(2);
    auto violations = validate_state(s);
    REQUIRE(!violations.empty());
    bool found = false;
    for (const auto& v : violations)
        if (v.find("agent 0") != std::string::npos &&
            v.find("2 agent sets") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("negative free hardware is a violation") {
    auto s = two_node_state();
    s.nodes["n1"].capacity = Hw::units(1);
    s.nodes["n1"].free = Hw::units(-1);
    auto violations = validate_state(s);
    REQUIRE(!violations.empty());
    CHECK(violations.front().find("n1") != std::string::npos);
}

TEST_CASE("hardware bookkeeping mismatch is a violation") {
    auto s = two_node_state();
    s.nodes["n1"].free = Hw::units(3);
    CHECK(validate_state(s).size() == 1);
}

TEST_CASE("unbounded capacity pairs with unbounded free") {
    auto s = two_node_state();
    s.nodes["n2"].capacity = Hw::unbounded();
    CHECK(!validate_state(s).empty());
    s.nodes["n2"].free = Hw::unbounded();
    CHECK(validate_state(s).empty());
}

TEST_CASE("fresh agent ids count up from the live set") {
    InfrastructureState empty;
    CHECK(fresh_agent_id(empty) == 0);

    auto s = two_node_state();
    CHECK(fresh_agent_id(s) == 1);

    ManagementAgent extra;
    extra.agent_id = 1;
    extra.instance = {"app_1", "app", "n2"};
    s.agents[1] = extra;
    ManagementAgent third;
    third.agent_id = 2;
    third.instance = {"app_2", "app", "n2"};
    s.agents[2] = third;
    CHECK(fresh_agent_id(s) == 3);
}

TEST_CASE("hw arithmetic keeps unbounded absorbing") {
    Hw u = Hw::unbounded();
    CHECK(u.covers(1000000));
    CHECK(u.minus(5).is_unbounded());
    CHECK(Hw::units(3).covers(3));
    CHECK(!Hw::units(3).covers(4));
    CHECK(Hw::units(3).minus(2).units() == 1);
}

TEST_CASE("source ids order nodes lexicographically with self last") {
    auto self = SourceId::self();
    auto a = SourceId::node("ap1");
    auto b = SourceId::node("ap2");
    CHECK(a < b);
    CHECK(a < self);
    CHECK(b < self);
    CHECK(!(self < a));
    CHECK(self == SourceId::self());
}
