#include "fogcolony/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fogcolony {

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> out;
    auto fail = [&out](const std::string& m) { out.push_back(m); };

    if (s.apps.empty()) fail("scenario has no applications");
    std::set<std::string> app_ids;
    for (const auto& app : s.apps) {
        const auto& svc = app.service;
        if (!app_ids.insert(svc.service_id).second)
            fail("duplicate app id " + svc.service_id);
        if (svc.required_hw < 0) fail("app " + svc.service_id + ": required_hw < 0");
        if (!(svc.max_request_rate > 0))
            fail("app " + svc.service_id + ": max_request_rate must be > 0");
        if (svc.max_latency_to_client < 0)
            fail("app " + svc.service_id + ": max_latency_to_client < 0");
    }
    for (const auto& [app, pol] : s.policy_of_app) {
        if (!app_ids.count(app)) fail("policy assignment for unknown app " + app);
        if (!s.policies.count(pol))
            fail("app " + app + ": policy '" + pol + "' is not loaded");
    }
    for (const auto& app : s.apps)
        if (!s.policy_of_app.count(app.service.service_id))
            fail("app " + app.service.service_id + " has no policy assignment");
    std::set<std::string> user_ids;
    for (const auto& u : s.users) {
        if (!user_ids.insert(u.user_id).second) fail("duplicate user id " + u.user_id);
        if (!app_ids.count(u.app_id))
            fail("user " + u.user_id + ": unknown app " + u.app_id);
        if (!(u.request_period > 0))
            fail("user " + u.user_id + ": request period must be > 0");
    }
    if (!(s.periods.request_period > 0)) fail("request_period must be > 0");
    if (!(s.periods.policy_period > 0)) fail("policy_period must be > 0");
    if (!(s.periods.orchestrator_period > 0)) fail("orchestrator_period must be > 0");
    if (!(s.periods.mobility_epoch > 0)) fail("mobility_epoch must be > 0");
    if (s.horizon < s.periods.orchestrator_period)
        fail("horizon must cover at least one orchestrator period");
    if (s.memory_window < 0) fail("memory_window must be >= 0");
    if (s.topology.tiers.empty()) fail("topology has no tiers");
    for (const auto& p : s.initial)
        if (!app_ids.count(p.app_id))
            fail("initial placement references unknown app " + p.app_id);
    return out;
}

namespace {

std::string first_cloud_node(const Topology& topo) {
    auto clouds = topo.nodes_of_tier(Tier::Cloud);
    if (clouds.empty())
        throw std::invalid_argument("topology has no cloud tier for the default placement");
    return clouds.front();
}

MobilitySchedule make_schedule(const Scenario& s, const Topology& topo) {
    if (std::holds_alternative<TraceFileSource>(s.mobility)) {
        RawTrace raw = load_trace(std::get<TraceFileSource>(s.mobility).path);
        return resolve_schedule(raw, topo);
    }
    if (s.users.empty()) return {};
    const auto& synth = std::get<SyntheticSource>(s.mobility);
    SyntheticTraceParams params;
    params.seed = s.seed;
    params.users = static_cast<int>(s.users.size());
    params.area_w = synth.area_w > 0 ? synth.area_w : s.topology.grid.width_m;
    params.area_h = synth.area_h > 0 ? synth.area_h : s.topology.grid.height_m;
    params.epochs = synth.epochs;
    params.epoch_period = s.periods.mobility_epoch;
    params.move_prob = synth.move_prob;
    RawTrace raw = gen_synthetic_trace(params);
    // Synthetic user ids are positional; rename to the scenario's ids.
    for (auto& sample : raw.samples) {
        std::size_t idx = std::stoul(sample.user_id.substr(1));
        sample.user_id = s.users.at(idx).user_id;
    }
    return resolve_schedule(raw, topo);
}

} // namespace

Simulation::Simulation(Scenario scenario) : scenario_(std::move(scenario)) {
    auto problems = validate_scenario(scenario_);
    if (!problems.empty()) {
        std::ostringstream m;
        m << "invalid scenario:";
        for (const auto& p : problems) m << "\n  " << p;
        throw std::invalid_argument(m.str());
    }
    topo_ = build_tiered_topology(scenario_.topology);
    schedule_ = make_schedule(scenario_, topo_);

    for (const auto& [id, node] : topo_.nodes()) {
        NodeState ns;
        ns.node_id = id;
        ns.capacity = node.capacity;
        ns.free = node.capacity;
        state_.nodes.emplace(id, std::move(ns));
    }
    for (const auto& app : scenario_.apps)
        state_.services.emplace(app.service.service_id, app.service);

    std::vector<InitialPlacement> initial = scenario_.initial;
    if (initial.empty()) {
        std::string cloud = first_cloud_node(topo_);
        for (const auto& app : scenario_.apps)
            initial.push_back({app.service.service_id, cloud});
    }
    for (const auto& p : initial) {
        if (!state_.nodes.count(p.node_id))
            throw std::invalid_argument("initial placement on unknown node " + p.node_id);
        std::uint64_t aid = fresh_agent_id(state_);
        ManagementAgent agent;
        agent.agent_id = aid;
        agent.instance = {p.app_id + "_" + std::to_string(aid), p.app_id, p.node_id};
        agent.policy_id = scenario_.policy_of_app.at(p.app_id);
        state_.agents.emplace(aid, std::move(agent));
        state_.nodes.at(p.node_id).agents.insert(aid);
    }
    for (auto& [nid, node] : state_.nodes) {
        if (node.capacity.is_unbounded()) continue;
        std::int64_t used = 0;
        for (std::uint64_t aid : node.agents)
            used += state_.services.at(state_.agents.at(aid).instance.service_id)
                        .required_hw;
        node.free = Hw::units(node.capacity.units() - used);
        if (node.free.units() < 0)
            throw std::invalid_argument("initial placement exceeds capacity of " + nid);
    }

    report_.scenario_name = scenario_.name;
    report_.seed = scenario_.seed;
    report_.memory_window = scenario_.memory_window;
    report_.policy_of_app = scenario_.policy_of_app;
    for (const auto& app : scenario_.apps)
        report_.class_of_app[app.service.service_id] = app.app_class;
    report_.orchestrator_period = scenario_.periods.orchestrator_period;
    report_.mobility_epoch = scenario_.periods.mobility_epoch;
    report_.horizon = scenario_.horizon;
}

bool Simulation::done() const {
    double next_time = (cycle_ + 1) * scenario_.periods.orchestrator_period;
    return next_time > scenario_.horizon + 1e-9;
}

CycleRecord Simulation::step() {
    if (done()) throw std::logic_error("simulation past its horizon");
    const double now = (cycle_ + 1) * scenario_.periods.orchestrator_period;

    CycleRecord rec;
    rec.cycle = cycle_;
    rec.time = now;

    // (1) mobility: attach every user to its current nearest AP.
    rec.handovers = handovers_between(schedule_, prev_time_, now);
    std::vector<UserAttachment> attachments;
    for (const auto& u : scenario_.users) {
        std::string ap = schedule_.ap_at(u.user_id, now);
        if (ap.empty()) continue; // not yet present in the trace
        attachments.push_back(
            {u.user_id, u.app_id, ap, scenario_.periods.request_period / u.request_period});
    }

    // (2) routing against the placements left by the previous cycle.
    std::vector<ServiceInstance> instances;
    for (const auto& [aid, agent] : state_.agents) instances.push_back(agent.instance);
    FlowAssignment assignment = route_users(topo_, attachments, instances);
    rec.dropped_flows = static_cast<int>(assignment.dropped_users.size());

    const auto& class_of_app = report_.class_of_app;
    std::map<std::string, std::string> app_of_instance;
    for (const auto& inst : instances) app_of_instance[inst.instance_id] = inst.service_id;
    std::map<std::string, std::string> app_of_user;
    for (const auto& u : scenario_.users) app_of_user[u.user_id] = u.app_id;

    for (const auto& f : assignment.flows) {
        auto& slot = rec.response_by_class[class_of_app.at(app_of_user.at(f.user_id))];
        slot.first += f.latency_ms;
        slot.second += 1;
    }
    std::map<std::string, double> received_by_app;
    std::map<std::string, double> servable_by_app;
    for (const auto& f : assignment.flows)
        received_by_app[app_of_instance.at(f.instance_id)] += f.rate;
    for (const auto& inst : instances)
        servable_by_app[inst.service_id] +=
            state_.services.at(inst.service_id).max_request_rate;
    for (const auto& [app, cls] : class_of_app) {
        auto& slot = rec.usage_by_class[cls];
        auto r = received_by_app.find(app);
        auto s = servable_by_app.find(app);
        if (r != received_by_app.end()) slot.first += r->second;
        if (s != servable_by_app.end()) slot.second += s->second;
    }

    // (3) context refresh (r2): every node learns its instances' summaries.
    ContextUpdate update;
    for (const auto& [nid, node] : state_.nodes) update.by_node[nid] = {};
    for (const auto& [aid, agent] : state_.agents) {
        auto summaries = summarise_requests(assignment, agent.instance);
        auto& dest = update.by_node[agent.instance.node_id];
        dest.insert(dest.end(), summaries.begin(), summaries.end());
    }
    state_ = refresh_context(state_, update);

    rec.live_agents = static_cast<int>(state_.agents.size());
    std::map<std::uint64_t, std::string> app_of_agent;
    for (const auto& [aid, agent] : state_.agents)
        app_of_agent[aid] = agent.instance.service_id;

    // (4)+(5) agent evaluations and the orchestrator round (r1). Agents only
    // evaluate when a policy tick falls inside this cycle's window.
    bool policy_tick = false;
    {
        double period = scenario_.periods.policy_period;
        double next_tick = (std::floor(last_policy_tick_ / period + 1e-9) + 1) * period;
        if (next_tick <= now + 1e-9) {
            policy_tick = true;
            last_policy_tick_ = now;
        }
    }

    CycleLabel label;
    label.cycle = cycle_;
    if (policy_tick) {
        std::map<std::uint64_t, KnowledgeBase> kbs;
        std::map<std::uint64_t, const policy::PolicyProgram*> programs;
        for (const auto& [aid, agent] : state_.agents) {
            kbs.emplace(aid, assemble_kb(state_, aid));
            programs.emplace(aid, &scenario_.policies.at(agent.policy_id));
        }
        CollectResult collected = collect_requests(state_, topo_, kbs, programs, {});
        if (!collected.malformed.empty()) {
            std::ostringstream m;
            m << "malformed requests at cycle " << cycle_ << ":";
            for (const auto& e : collected.malformed) m << "\n  " << e;
            throw std::logic_error(m.str());
        }
        rec.nops = collected.nops;
        AssessConfig cfg;
        cfg.protect_last_instance = scenario_.protect_last_instance;
        Assessment a = assess(collected.requests, state_, cfg);
        label.accepted = std::move(a.accepted);
        label.inhibited = std::move(a.inhibited);
        state_ = enact(state_, label.accepted);
    } else {
        rec.nops = rec.live_agents;
    }

    // (6) inhibition memory.
    record_inhibitions(label, state_, scenario_.memory_window);

    // (7) snapshot.
    auto to_record = [&](const OperationRequest& req) {
        OpRecord r;
        r.agent = req.agent_id;
        r.kind = req.kind;
        r.source = req.source_node;
        r.target = req.target_node;
        if (req.deploy)
            r.app = req.deploy->service_id;
        else if (auto it = app_of_agent.find(req.agent_id); it != app_of_agent.end())
            r.app = it->second;
        auto cls = class_of_app.find(r.app);
        r.app_class = cls == class_of_app.end() ? "" : cls->second;
        return r;
    };
    for (const auto& req : label.accepted) rec.accepted.push_back(to_record(req));
    for (const auto& req : label.inhibited) rec.inhibited.push_back(to_record(req));

    for (const auto& [aid, agent] : state_.agents) {
        ++rec.instances_by_class[class_of_app.at(agent.instance.service_id)];
        ++rec.instances_total;
    }

    prev_time_ = now;
    ++cycle_;
    return rec;
}

SimulationReport Simulation::run_to_end() {
    while (!done()) {
        CycleRecord rec = step();
        report_.total_handovers += rec.handovers;
        report_.cycles.push_back(std::move(rec));
    }
    return report_;
}

SimulationReport Simulation::run(const Scenario& scenario) {
    Simulation sim(scenario);
    return sim.run_to_end();
}

} // namespace fogcolony
