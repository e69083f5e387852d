#include "fogcolony/metrics.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fogcolony::metrics {

using nlohmann::json;

CycleSeries build_series(const SimulationReport& report) {
    CycleSeries s;
    s.orchestrator_period = report.orchestrator_period;
    s.mobility_epoch = report.mobility_epoch;
    s.total_handovers = report.total_handovers;

    std::set<std::string> classes{"all"};
    for (const auto& [app, cls] : report.class_of_app) classes.insert(cls);
    std::size_t n = report.cycles.size();
    for (const auto& cls : classes) {
        CycleSeries::Counts c;
        c.undeploy.assign(n, 0);
        c.migrate.assign(n, 0);
        c.replicate.assign(n, 0);
        c.inhibited.assign(n, 0);
        c.placement_ops.assign(n, 0);
        c.instances.assign(n, 0);
        s.by_class.emplace(cls, std::move(c));
    }

    for (std::size_t i = 0; i < n; ++i) {
        const CycleRecord& rec = report.cycles[i];
        s.times.push_back(rec.time);
        s.handovers.push_back(rec.handovers);
        s.live_agents.push_back(rec.live_agents);
        s.nops.push_back(rec.nops);
        auto bump = [&](const std::string& cls, const OpRecord& op, bool accepted) {
            CycleSeries::Counts& c = s.by_class.at(cls);
            if (!accepted) {
                ++c.inhibited[i];
                return;
            }
            switch (op.kind) {
            case OpKind::Undeploy: ++c.undeploy[i]; break;
            case OpKind::Migrate: ++c.migrate[i]; break;
            case OpKind::Replicate: ++c.replicate[i]; break;
            case OpKind::Deploy: return; // operator-driven, not a policy op
            }
            ++c.placement_ops[i];
        };
        for (const auto& op : rec.accepted) {
            bump("all", op, true);
            if (op.app_class != "all" && s.by_class.count(op.app_class))
                bump(op.app_class, op, true);
        }
        for (const auto& op : rec.inhibited) {
            bump("all", op, false);
            if (op.app_class != "all" && s.by_class.count(op.app_class))
                bump(op.app_class, op, false);
        }
        for (const auto& [cls, count] : rec.instances_by_class) {
            if (s.by_class.count(cls)) s.by_class.at(cls).instances[i] = count;
            s.by_class.at("all").instances[i] += count;
        }
    }
    return s;
}

std::optional<double> pearson(const std::vector<double>& xs,
                              const std::vector<double>& ys) {
    if (xs.size() != ys.size())
        throw std::invalid_argument("pearson: series lengths differ");
    if (xs.size() < 2)
        throw std::invalid_argument("pearson: need at least two samples");
    double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double dx = xs[i] - mx;
        double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::map<std::string, KindAverages> ops_per_movement(const CycleSeries& series) {
    std::map<std::string, KindAverages> out;
    for (const auto& [cls, counts] : series.by_class) {
        KindAverages avg;
        if (series.total_handovers > 0) {
            auto total = [](const std::vector<int>& v) {
                double t = 0;
                for (int x : v) t += x;
                return t;
            };
            avg.undeploy = total(counts.undeploy) / series.total_handovers;
            avg.migrate = total(counts.migrate) / series.total_handovers;
            avg.replicate = total(counts.replicate) / series.total_handovers;
        }
        out.emplace(cls, avg);
    }
    return out;
}

double service_usage(double received_rate, double servable_rate) {
    if (!(servable_rate > 0))
        throw std::invalid_argument("service_usage: servable rate must be > 0");
    return received_rate / servable_rate;
}

std::map<std::string, std::optional<double>>
avg_response_time(const SimulationReport& report) {
    std::map<std::string, std::pair<double, long>> acc;
    for (const auto& rec : report.cycles) {
        for (const auto& [cls, slot] : rec.response_by_class) {
            acc[cls].first += slot.first;
            acc[cls].second += slot.second;
            acc["all"].first += slot.first;
            acc["all"].second += slot.second;
        }
    }
    std::map<std::string, std::optional<double>> out;
    std::set<std::string> classes{"all"};
    for (const auto& [app, cls] : report.class_of_app) classes.insert(cls);
    for (const auto& cls : classes) {
        auto it = acc.find(cls);
        if (it == acc.end() || it->second.second == 0)
            out.emplace(cls, std::nullopt);
        else
            out.emplace(cls, it->second.first / it->second.second);
    }
    return out;
}

ConvergenceSummary convergence_cycles(const CycleSeries& series,
                                      const std::string& app_class) {
    ConvergenceSummary out;
    const auto& ops = series.by_class.at(app_class).placement_ops;
    if (series.times.empty()) return out;
    auto epoch_of = [&](double t) {
        return static_cast<int>(std::floor(t / series.mobility_epoch + 1e-9));
    };
    int last_epoch = epoch_of(series.times.back());
    for (int epoch = 0; epoch <= last_epoch; ++epoch) {
        std::size_t begin = series.times.size(), end = 0;
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            if (epoch_of(series.times[i]) != epoch) continue;
            begin = std::min(begin, i);
            end = std::max(end, i + 1);
        }
        if (begin >= end) continue;
        std::size_t anchor = begin;
        int epoch_handovers = 0;
        bool found = false;
        for (std::size_t i = begin; i < end; ++i) {
            epoch_handovers += series.handovers[i];
            if (!found && series.handovers[i] > 0) {
                anchor = i;
                found = true;
            }
        }
        if (!found) continue; // nothing moved in this epoch
        EpochConvergence ec;
        ec.epoch = epoch;
        ec.handovers = epoch_handovers;
        ec.converged = false;
        for (std::size_t i = anchor; i < end; ++i) {
            if (ops[i] > 0) {
                ++ec.cycles;
            } else {
                ec.converged = true;
                break;
            }
        }
        out.epochs.push_back(ec);
    }
    double sum = 0;
    for (const auto& e : out.epochs) {
        sum += e.cycles;
        out.max = std::max(out.max, e.cycles);
        if (!e.converged) ++out.non_converged;
    }
    out.mean = out.epochs.empty() ? 0 : sum / out.epochs.size();
    return out;
}

int total_inhibited(const SimulationReport& report) {
    int total = 0;
    for (const auto& rec : report.cycles)
        total += static_cast<int>(rec.inhibited.size());
    return total;
}

double inhibited_reduction(double inhibited_a, double inhibited_b) {
    if (!(inhibited_a > 0))
        throw std::invalid_argument("inhibited_reduction: baseline has no inhibitions");
    return (inhibited_a - inhibited_b) / inhibited_a * 100.0;
}

double inhibited_reduction(const SimulationReport& a, const SimulationReport& b) {
    return inhibited_reduction(total_inhibited(a), total_inhibited(b));
}

namespace {

json op_to_json(const OpRecord& op) {
    return json{{"agent", op.agent},
                {"kind", op_kind_name(op.kind)},
                {"source", op.source},
                {"target", op.target}};
}

} // namespace

std::string label_log_string(const SimulationReport& report) {
    std::ostringstream os;
    for (const auto& rec : report.cycles) {
        json line;
        line["cycle"] = rec.cycle;
        line["accepted"] = json::array();
        line["inhibited"] = json::array();
        for (const auto& op : rec.accepted) line["accepted"].push_back(op_to_json(op));
        for (const auto& op : rec.inhibited) line["inhibited"].push_back(op_to_json(op));
        os << line.dump() << "\n";
    }
    return os.str();
}

void write_label_log(const SimulationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << label_log_string(report);
}

void write_cycles_csv(const SimulationReport& report, const std::string& path) {
    CycleSeries series = build_series(report);
    std::vector<std::string> classes;
    for (const auto& [cls, counts] : series.by_class)
        if (cls != "all") classes.push_back(cls);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "cycle,time,handovers,live_agents,nops,undeploy,migrate,replicate,inhibited,"
           "instances_total";
    for (const auto& cls : classes) out << ",instances_" << cls;
    out << ",dropped_flows\n";
    const auto& all = series.by_class.at("all");
    for (std::size_t i = 0; i < report.cycles.size(); ++i) {
        const auto& rec = report.cycles[i];
        out << rec.cycle << "," << rec.time << "," << rec.handovers << ","
            << rec.live_agents << "," << rec.nops << "," << all.undeploy[i] << ","
            << all.migrate[i] << "," << all.replicate[i] << "," << all.inhibited[i] << ","
            << rec.instances_total;
        for (const auto& cls : classes) out << "," << series.by_class.at(cls).instances[i];
        out << "," << rec.dropped_flows << "\n";
    }
}

namespace {

struct ClassSummary {
    std::optional<double> avg_response_ms;
    std::optional<double> usage;
    KindAverages per_movement;
    std::optional<double> pearson_r;
    double convergence_mean = 0;
    int convergence_max = 0;
    int non_converged = 0;
    int inhibited = 0;
    int accepted_undeploy = 0;
    int accepted_migrate = 0;
    int accepted_replicate = 0;
};

std::map<std::string, ClassSummary> summarise(const SimulationReport& report) {
    CycleSeries series = build_series(report);
    auto responses = avg_response_time(report);
    auto per_movement = ops_per_movement(series);

    // Mean over cycles of the class-level received/servable ratio.
    std::map<std::string, std::pair<double, int>> usage_acc;
    for (const auto& rec : report.cycles) {
        double all_received = 0, all_servable = 0;
        for (const auto& [cls, slot] : rec.usage_by_class) {
            all_received += slot.first;
            all_servable += slot.second;
            if (slot.second > 0) {
                usage_acc[cls].first += slot.first / slot.second;
                usage_acc[cls].second += 1;
            }
        }
        if (all_servable > 0) {
            usage_acc["all"].first += all_received / all_servable;
            usage_acc["all"].second += 1;
        }
    }

    std::map<std::string, ClassSummary> out;
    std::vector<double> handover_series(series.handovers.begin(), series.handovers.end());
    for (const auto& [cls, counts] : series.by_class) {
        ClassSummary cs;
        cs.avg_response_ms = responses.count(cls) ? responses.at(cls) : std::nullopt;
        auto u = usage_acc.find(cls);
        if (u != usage_acc.end() && u->second.second > 0)
            cs.usage = u->second.first / u->second.second;
        cs.per_movement = per_movement.at(cls);
        if (handover_series.size() >= 2) {
            std::vector<double> ops(counts.placement_ops.begin(),
                                    counts.placement_ops.end());
            cs.pearson_r = pearson(handover_series, ops);
        }
        auto conv = convergence_cycles(series, cls);
        cs.convergence_mean = conv.mean;
        cs.convergence_max = conv.max;
        cs.non_converged = conv.non_converged;
        for (int x : counts.inhibited) cs.inhibited += x;
        for (int x : counts.undeploy) cs.accepted_undeploy += x;
        for (int x : counts.migrate) cs.accepted_migrate += x;
        for (int x : counts.replicate) cs.accepted_replicate += x;
        out.emplace(cls, std::move(cs));
    }
    return out;
}

std::string opt_str(const std::optional<double>& v) {
    if (!v) return "NA";
    std::ostringstream os;
    os << *v;
    return os.str();
}

json opt_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

} // namespace

void write_summary_csv(const SimulationReport& report, const std::string& path) {
    auto summary = summarise(report);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "class,avg_response_ms,service_usage,undeploy_per_movement,"
           "migrate_per_movement,replicate_per_movement,pearson_r,convergence_mean,"
           "convergence_max,non_converged_epochs,total_inhibited,accepted_undeploy,"
           "accepted_migrate,accepted_replicate\n";
    for (const auto& [cls, cs] : summary) {
        out << cls << "," << opt_str(cs.avg_response_ms) << "," << opt_str(cs.usage) << ","
            << opt_str(cs.per_movement.undeploy) << "," << opt_str(cs.per_movement.migrate)
            << "," << opt_str(cs.per_movement.replicate) << "," << opt_str(cs.pearson_r)
            << "," << cs.convergence_mean << "," << cs.convergence_max << ","
            << cs.non_converged << "," << cs.inhibited << "," << cs.accepted_undeploy
            << "," << cs.accepted_migrate << "," << cs.accepted_replicate << "\n";
    }
}

std::string summary_json_string(const SimulationReport& report) {
    auto summary = summarise(report);
    json doc;
    doc["scenario"] = report.scenario_name;
    doc["seed"] = report.seed;
    doc["memory_window"] = report.memory_window;
    doc["policies"] = report.policy_of_app;
    doc["total_handovers"] = report.total_handovers;
    doc["cycles"] = report.cycles.size();
    json per_class = json::object();
    for (const auto& [cls, cs] : summary) {
        json entry;
        entry["avg_response_ms"] = opt_json(cs.avg_response_ms);
        entry["service_usage"] = opt_json(cs.usage);
        entry["ops_per_movement"] = {{"undeploy", opt_json(cs.per_movement.undeploy)},
                                     {"migrate", opt_json(cs.per_movement.migrate)},
                                     {"replicate", opt_json(cs.per_movement.replicate)}};
        entry["pearson_r"] = opt_json(cs.pearson_r);
        entry["convergence_mean"] = cs.convergence_mean;
        entry["convergence_max"] = cs.convergence_max;
        entry["non_converged_epochs"] = cs.non_converged;
        entry["total_inhibited"] = cs.inhibited;
        entry["accepted"] = {{"undeploy", cs.accepted_undeploy},
                             {"migrate", cs.accepted_migrate},
                             {"replicate", cs.accepted_replicate}};
        per_class[cls] = std::move(entry);
    }
    doc["per_class"] = std::move(per_class);
    return doc.dump(2) + "\n";
}

void write_summary_json(const SimulationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << summary_json_string(report);
}

} // namespace fogcolony::metrics
