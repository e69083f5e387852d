#pragma once

#include "fogcolony/mobility.hpp"
#include "fogcolony/model.hpp"
#include "fogcolony/orchestrator.hpp"
#include "fogcolony/policy.hpp"
#include "fogcolony/topology.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace fogcolony {

struct UserSpec {
    std::string user_id;
    std::string app_id;
    double request_period = 1; // time units between requests
};

struct Periods {
    double request_period = 1;      // the rate-normalisation base
    double policy_period = 1;       // agent evaluation grid
    double orchestrator_period = 1; // management cycle grid
    double mobility_epoch = 1;      // movement grid
};

struct AppSpec {
    ServiceSpec service;
    std::string app_class; // grouping tag for metrics (e.g. WS / LS)
};

struct InitialPlacement {
    std::string app_id;
    std::string node_id;
};

struct TraceFileSource {
    std::string path;
};

struct SyntheticSource {
    int epochs = 1;
    double move_prob = 0;
    // 0 means "use the AP grid area".
    double area_w = 0;
    double area_h = 0;
};

using MobilitySource = std::variant<TraceFileSource, SyntheticSource>;

struct Scenario {
    std::string name;
    TopologySpec topology;
    std::vector<AppSpec> apps;
    std::map<std::string, std::string> policy_of_app;      // app id -> policy name
    std::map<std::string, policy::PolicyProgram> policies; // policy name -> program
    std::vector<UserSpec> users;
    MobilitySource mobility = SyntheticSource{};
    Periods periods;
    double horizon = 0;
    int memory_window = 1;
    bool protect_last_instance = true;
    std::uint64_t seed = 0;
    std::vector<InitialPlacement> initial; // empty: one instance per app on the cloud
};

std::vector<std::string> validate_scenario(const Scenario& scenario);

/// One operation as it appears in the cycle label, annotated with its
/// application for per-class metrics.
struct OpRecord {
    std::uint64_t agent = 0;
    OpKind kind = OpKind::Undeploy;
    std::string source;
    std::string target;
    std::string app;
    std::string app_class;
};

struct CycleRecord {
    std::uint64_t cycle = 0;
    double time = 0;
    std::vector<OpRecord> accepted;
    std::vector<OpRecord> inhibited;
    int handovers = 0;
    int live_agents = 0; // at evaluation, before enactment
    int nops = 0;
    std::map<std::string, int> instances_by_class; // after enactment
    int instances_total = 0;
    std::map<std::string, std::pair<double, int>> response_by_class; // latency sum, samples
    std::map<std::string, std::pair<double, double>> usage_by_class; // received, servable
    int dropped_flows = 0;
};

struct SimulationReport {
    std::string scenario_name;
    std::uint64_t seed = 0;
    int memory_window = 1;
    std::map<std::string, std::string> policy_of_app;
    std::map<std::string, std::string> class_of_app;
    double orchestrator_period = 1;
    double mobility_epoch = 1;
    double horizon = 0;
    int total_handovers = 0;
    std::vector<CycleRecord> cycles;
};

/// The deterministic cycle loop: advance mobility, recompute routing and
/// request summaries, refresh node contexts, evaluate agents, run one
/// orchestrator round, record inhibitions, snapshot metrics.
class Simulation {
public:
    explicit Simulation(Scenario scenario);

    const InfrastructureState& state() const { return state_; }
    const Topology& topology() const { return topo_; }
    const MobilitySchedule& schedule() const { return schedule_; }
    std::uint64_t next_cycle() const { return cycle_; }
    bool done() const;

    CycleRecord step();
    SimulationReport run_to_end();

    static SimulationReport run(const Scenario& scenario);

private:
    Scenario scenario_;
    Topology topo_;
    MobilitySchedule schedule_;
    InfrastructureState state_;
    SimulationReport report_;
    std::uint64_t cycle_ = 0;
    double prev_time_ = 0;
    double last_policy_tick_ = 0;
};

} // namespace fogcolony
