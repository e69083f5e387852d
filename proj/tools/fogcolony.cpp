#include "fogcolony/metrics.hpp"
#include "fogcolony/mobility.hpp"
#include "fogcolony/policy.hpp"
#include "fogcolony/scenario_config.hpp"
#include "fogcolony/sim.hpp"
#include "fogcolony/topology.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

int cmd_validate(const std::string& path) {
    try {
        if (path.ends_with(".fp")) {
            auto prog = fogcolony::policy::parse_policy_file(path);
            std::cout << "ok: policy '" << prog.name << "' with " << prog.rules.size()
                      << " rules\n";
            return kExitOk;
        }
        auto file = fogcolony::load_scenario_file(path);
        std::cout << "ok: scenario '" << file.scenario.name << "'\n";
        return kExitOk;
    } catch (const fogcolony::policy::ParseError& e) {
        std::cerr << path << ":" << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralised fog application management simulator"};
    app.require_subcommand(1);

    // validate
    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "Check a policy (.fp) or scenario (.json) file");
    validate->add_option("path", validate_path, "file to check")->required();

    // run
    std::string run_scenario;
    std::string run_out;
    std::string run_policy;
    std::uint64_t run_seed = 0;
    bool run_seed_set = false;
    double run_horizon = 0;
    int run_window = -1;
    int run_protect = -1;
    CLI::App* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
    run->add_option("scenario", run_scenario, "scenario config (json)")->required();
    run->add_option("--out", run_out, "output directory (overrides config)");
    run->add_option("--policy", run_policy, "assign this policy to every app");
    auto* seed_opt = run->add_option("--seed", run_seed, "override the scenario seed");
    run->add_option("--horizon", run_horizon, "override the horizon");
    run->add_option("--memory-window", run_window, "override the inhibition memory window");
    run->add_flag("--no-protect-last-instance",
                  [&run_protect](std::int64_t) { run_protect = 0; },
                  "allow undeploying an app's last instance");

    // gen
    CLI::App* gen = app.add_subcommand("gen", "Generate a topology or trace file");
    gen->require_subcommand(1);

    std::vector<std::string> gen_tiers;
    double gen_area_w = 0, gen_area_h = 0, gen_spacing = 0;
    std::string gen_out, gen_csv_prefix;
    CLI::App* gen_topo = gen->add_subcommand("topology", "Generate a tiered topology");
    gen_topo->add_option("--tier", gen_tiers,
                         "tier spec tier:count:hw:downlink_ms, top first "
                         "(hw may be 'unbounded'; AP count may be 0 = from grid)")
        ->required();
    gen_topo->add_option("--area", [&gen_area_w, &gen_area_h](const std::vector<std::string>& v) {
                             if (v.size() != 2) return false;
                             gen_area_w = std::stod(v[0]);
                             gen_area_h = std::stod(v[1]);
                             return true;
                         },
                         "AP grid area (width_m height_m)")
        ->expected(2)
        ->required();
    gen_topo->add_option("--spacing", gen_spacing, "AP grid spacing (m)")->required();
    gen_topo->add_option("--out", gen_out, "output JSON file")->required();
    gen_topo->add_option("--csv", gen_csv_prefix, "also write <prefix>_nodes.csv/_edges.csv");

    std::uint64_t trace_seed = 0;
    int trace_users = 0, trace_epochs = 0;
    double trace_epoch_period = 0, trace_move_prob = 0;
    double trace_area_w = 0, trace_area_h = 0;
    std::string trace_out;
    CLI::App* gen_trace = gen->add_subcommand("trace", "Generate a synthetic mobility trace");
    gen_trace->add_option("--seed", trace_seed, "rng seed")->required();
    gen_trace->add_option("--users", trace_users, "number of users")->required();
    gen_trace->add_option("--area", [&trace_area_w, &trace_area_h](const std::vector<std::string>& v) {
                              if (v.size() != 2) return false;
                              trace_area_w = std::stod(v[0]);
                              trace_area_h = std::stod(v[1]);
                              return true;
                          },
                          "area (width_m height_m)")
        ->expected(2)
        ->required();
    gen_trace->add_option("--epochs", trace_epochs, "total sample epochs")->required();
    gen_trace->add_option("--epoch-period", trace_epoch_period, "time units per epoch")
        ->required();
    gen_trace->add_option("--move-prob", trace_move_prob, "per-user per-epoch move probability")
        ->required();
    gen_trace->add_option("--out", trace_out, "output CSV file")->required();

    // report
    std::string report_dir, compare_dir;
    CLI::App* report = app.add_subcommand("report", "Summarise a run directory");
    report->add_option("run_dir", report_dir, "directory with run artifacts")->required();
    report->add_option("--compare", compare_dir, "second run directory to compare against");

    CLI11_PARSE(app, argc, argv);
    run_seed_set = seed_opt->count() > 0;

    try {
        if (*validate) return cmd_validate(validate_path);

        if (*run) {
            fogcolony::ScenarioFile file;
            try {
                file = fogcolony::load_scenario_file(run_scenario);
            } catch (const std::runtime_error& e) {
                std::cerr << e.what() << "\n";
                return kExitValidation;
            }
            fogcolony::Scenario& s = file.scenario;
            if (run_seed_set) s.seed = run_seed;
            if (run_horizon > 0) s.horizon = run_horizon;
            if (run_window >= 0) s.memory_window = run_window;
            if (run_protect == 0) s.protect_last_instance = false;
            if (!run_policy.empty()) {
                std::string path = fogcolony::resolve_policy_path(
                    run_policy, fs::path(run_scenario).parent_path().string());
                auto prog = fogcolony::policy::parse_policy_file(path);
                for (auto& [app_id, pol] : s.policy_of_app) pol = prog.name;
                s.policies.clear();
                s.policies.emplace(prog.name, std::move(prog));
            }
            std::string out_dir = file.output_dir;
            if (const char* env = std::getenv("FOGCOLONY_OUTPUT"); env && *env)
                out_dir = env;
            if (!run_out.empty()) out_dir = run_out;

            auto result = fogcolony::Simulation::run(s);

            std::error_code ec;
            fs::create_directories(out_dir, ec);
            if (ec) {
                std::cerr << "cannot create output dir " << out_dir << ": "
                          << ec.message() << "\n";
                return kExitIo;
            }
            namespace fm = fogcolony::metrics;
            fm::write_label_log(result, out_dir + "/labels.jsonl");
            fm::write_cycles_csv(result, out_dir + "/cycles.csv");
            fm::write_summary_csv(result, out_dir + "/summary.csv");
            fm::write_summary_json(result, out_dir + "/summary.json");

            auto series = fm::build_series(result);
            auto conv = fm::convergence_cycles(series);
            std::cout << "run " << s.name << ": " << result.cycles.size() << " cycles, "
                      << result.total_handovers << " handovers, "
                      << fm::total_inhibited(result) << " inhibited, convergence mean "
                      << conv.mean << " max " << conv.max << " -> " << out_dir << "\n";
            return kExitOk;
        }

        if (*gen_topo) {
            fogcolony::TopologySpec spec;
            for (const auto& t : gen_tiers) {
                std::istringstream ss(t);
                std::string tier_s, count_s, hw_s, lat_s;
                std::getline(ss, tier_s, ':');
                std::getline(ss, count_s, ':');
                std::getline(ss, hw_s, ':');
                std::getline(ss, lat_s, ':');
                auto tier = fogcolony::tier_from_name(tier_s);
                if (!tier) {
                    std::cerr << "unknown tier '" << tier_s << "'\n";
                    return kExitValidation;
                }
                fogcolony::TierSpec ts;
                ts.tier = *tier;
                ts.count = count_s.empty() ? 0 : std::stoi(count_s);
                ts.hw = hw_s == "unbounded" ? fogcolony::Hw::unbounded()
                                            : fogcolony::Hw::units(std::stoll(hw_s));
                ts.downlink_latency_ms = lat_s.empty() ? 0 : std::stod(lat_s);
                spec.tiers.push_back(ts);
            }
            spec.grid = {gen_area_w, gen_area_h, gen_spacing};
            fogcolony::Topology topo;
            try {
                topo = fogcolony::build_tiered_topology(spec);
            } catch (const std::invalid_argument& e) {
                std::cerr << e.what() << "\n";
                return kExitValidation;
            }
            json doc;
            doc["nodes"] = json::array();
            for (const auto& [id, n] : topo.nodes()) {
                json jn{{"id", id},
                        {"tier", fogcolony::tier_name(n.tier)},
                        {"capacity", n.capacity.is_unbounded()
                                         ? json("unbounded")
                                         : json(n.capacity.units())}};
                if (n.position) jn["position"] = {(*n.position)[0], (*n.position)[1]};
                doc["nodes"].push_back(std::move(jn));
            }
            doc["links"] = json::array();
            for (const auto& l : topo.links())
                doc["links"].push_back({{"a", l.a}, {"b", l.b}, {"latency_ms", l.latency_ms}});
            std::ofstream out(gen_out);
            if (!out) {
                std::cerr << "cannot write " << gen_out << "\n";
                return kExitIo;
            }
            out << doc.dump(2) << "\n";
            if (!gen_csv_prefix.empty())
                fogcolony::export_topology_csv(topo, gen_csv_prefix + "_nodes.csv",
                                               gen_csv_prefix + "_edges.csv");
            std::cout << "wrote " << topo.nodes().size() << " nodes, "
                      << topo.links().size() << " links -> " << gen_out << "\n";
            return kExitOk;
        }

        if (*gen_trace) {
            fogcolony::SyntheticTraceParams params;
            params.seed = trace_seed;
            params.users = trace_users;
            params.area_w = trace_area_w;
            params.area_h = trace_area_h;
            params.epochs = trace_epochs;
            params.epoch_period = trace_epoch_period;
            params.move_prob = trace_move_prob;
            fogcolony::RawTrace trace;
            try {
                trace = fogcolony::gen_synthetic_trace(params);
            } catch (const std::invalid_argument& e) {
                std::cerr << e.what() << "\n";
                return kExitValidation;
            }
            fogcolony::save_trace(trace, trace_out);
            std::cout << "wrote " << trace.samples.size() << " samples -> " << trace_out
                      << "\n";
            return kExitOk;
        }

        if (*report) {
            auto load = [](const std::string& dir) {
                std::ifstream in(dir + "/summary.json");
                if (!in)
                    throw std::runtime_error("missing artifact: " + dir + "/summary.json");
                json doc;
                in >> doc;
                return doc;
            };
            json a = load(report_dir);
            auto print_summary = [](const json& doc) {
                std::cout << "scenario " << doc.value("scenario", "?") << ", seed "
                          << doc.value("seed", 0) << ", memory window "
                          << doc.value("memory_window", 0) << ", "
                          << doc.value("total_handovers", 0) << " handovers\n";
                std::cout << "class        resp_ms     usage   repl/mv   migr/mv   und/mv"
                             "   pearson   conv(mean/max)  inhibited\n";
                for (const auto& [cls, e] : doc.at("per_class").items()) {
                    auto num = [&](const json& v) {
                        return v.is_null() ? std::string("NA")
                                           : json(v).dump().substr(0, 8);
                    };
                    std::cout << cls << std::string(cls.size() < 12 ? 12 - cls.size() : 1, ' ')
                              << num(e["avg_response_ms"]) << "  " << num(e["service_usage"])
                              << "  " << num(e["ops_per_movement"]["replicate"]) << "  "
                              << num(e["ops_per_movement"]["migrate"]) << "  "
                              << num(e["ops_per_movement"]["undeploy"]) << "  "
                              << num(e["pearson_r"]) << "   "
                              << e["convergence_mean"].dump() << "/"
                              << e["convergence_max"].dump() << "   "
                              << e["total_inhibited"].dump() << "\n";
                }
            };
            print_summary(a);
            if (!compare_dir.empty()) {
                json b = load(compare_dir);
                double ia = a["per_class"]["all"]["total_inhibited"].get<double>();
                double ib = b["per_class"]["all"]["total_inhibited"].get<double>();
                std::cout << "\ncompared with " << compare_dir << ":\n";
                print_summary(b);
                if (ia > 0)
                    std::cout << "\ninhibited reduction: "
                              << fogcolony::metrics::inhibited_reduction(ia, ib) << "%\n";
                else
                    std::cout << "\ninhibited reduction: undefined (baseline has none)\n";
            }
            return kExitOk;
        }
    } catch (const std::runtime_error& e) {
        std::cerr << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
