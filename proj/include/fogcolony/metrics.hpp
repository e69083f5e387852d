#pragma once

#include "fogcolony/sim.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fogcolony::metrics {

/// Per-cycle count vectors derived from a simulation report. The map is
/// keyed by app class, with "all" aggregating every class.
struct CycleSeries {
    struct Counts {
        std::vector<int> undeploy;
        std::vector<int> migrate;
        std::vector<int> replicate;
        std::vector<int> inhibited;
        std::vector<int> placement_ops; // accepted undeploy+migrate+replicate
        std::vector<int> instances;
    };

    std::vector<double> times;
    std::vector<int> handovers;
    std::vector<int> live_agents;
    std::vector<int> nops;
    std::map<std::string, Counts> by_class; // includes "all"
    double orchestrator_period = 1;
    double mobility_epoch = 1;
    int total_handovers = 0;
};

CycleSeries build_series(const SimulationReport& report);

/// Sample Pearson correlation; nothing when either series has zero variance
/// (the coefficient is undefined there). Throws on mismatched or too-short
/// inputs.
std::optional<double> pearson(const std::vector<double>& xs,
                              const std::vector<double>& ys);

struct KindAverages {
    std::optional<double> undeploy;
    std::optional<double> migrate;
    std::optional<double> replicate;
};

/// Accepted operations of each kind divided by total user movements, per
/// class and overall. Undefined when the run saw no movements.
std::map<std::string, KindAverages> ops_per_movement(const CycleSeries& series);

/// received / servable; may exceed 1 under overload.
double service_usage(double received_rate, double servable_rate);

/// Mean assigned path latency over all (user, cycle) samples, per class and
/// overall; nothing for classes without samples.
std::map<std::string, std::optional<double>> avg_response_time(const SimulationReport& report);

struct EpochConvergence {
    int epoch = 0;
    int handovers = 0;
    int cycles = 0; // consecutive cycles with accepted placement ops
    bool converged = true;
};

struct ConvergenceSummary {
    std::vector<EpochConvergence> epochs; // epochs that saw handovers
    double mean = 0;
    int max = 0;
    int non_converged = 0;
};

/// For every epoch with handovers: how many consecutive cycles, starting at
/// the cycle the handovers landed in, contained at least one accepted
/// placement-changing operation before the first quiet cycle. An epoch whose
/// ops never quiet is counted to the epoch's end and flagged.
ConvergenceSummary convergence_cycles(const CycleSeries& series,
                                      const std::string& app_class = "all");

int total_inhibited(const SimulationReport& report);

/// Percentage reduction of inhibited operations from run a to run b.
double inhibited_reduction(const SimulationReport& a, const SimulationReport& b);
double inhibited_reduction(double inhibited_a, double inhibited_b);

// Artifact writers. All output is a pure function of the report.

void write_label_log(const SimulationReport& report, const std::string& path);
std::string label_log_string(const SimulationReport& report);

void write_cycles_csv(const SimulationReport& report, const std::string& path);

void write_summary_csv(const SimulationReport& report, const std::string& path);
void write_summary_json(const SimulationReport& report, const std::string& path);
std::string summary_json_string(const SimulationReport& report);

} // namespace fogcolony::metrics
