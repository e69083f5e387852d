#include "fogcolony/scenario_config.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fogcolony {

namespace fs = std::filesystem;
using nlohmann::json;

std::string default_policy_dir() {
    if (const char* env = std::getenv("FOGCOLONY_POLICY_DIR"); env && *env)
        return env;
    return std::string(FOGCOLONY_ROOT) + "/policies";
}

std::string resolve_policy_path(const std::string& name_or_path,
                                const std::string& base_dir) {
    bool looks_like_path = name_or_path.find('/') != std::string::npos ||
                           name_or_path.ends_with(".fp");
    if (!looks_like_path)
        return default_policy_dir() + "/" + name_or_path + ".fp";
    fs::path p(name_or_path);
    if (p.is_absolute()) return p.string();
    return (fs::path(base_dir) / p).string();
}

namespace {

class ConfigErrors {
public:
    void add(const std::string& where, const std::string& what) {
        errors_.push_back(where + ": " + what);
    }
    void raise_if_any(const std::string& path) const {
        if (errors_.empty()) return;
        std::ostringstream m;
        m << "invalid scenario config " << path << ":";
        for (const auto& e : errors_) m << "\n  " << e;
        throw std::runtime_error(m.str());
    }
    bool any() const { return !errors_.empty(); }

private:
    std::vector<std::string> errors_;
};

Hw parse_hw(const json& j, const std::string& where, ConfigErrors& errs) {
    if (j.is_string()) {
        if (j.get<std::string>() == "unbounded") return Hw::unbounded();
        errs.add(where, "hw must be an integer or \"unbounded\"");
        return Hw::units(0);
    }
    if (j.is_number_integer()) return Hw::units(j.get<std::int64_t>());
    errs.add(where, "hw must be an integer or \"unbounded\"");
    return Hw::units(0);
}

double get_num(const json& obj, const std::string& key, double fallback,
               const std::string& where, ConfigErrors& errs, bool required = false) {
    if (!obj.contains(key)) {
        if (required) errs.add(where, "missing field '" + key + "'");
        return fallback;
    }
    if (!obj.at(key).is_number()) {
        errs.add(where, "field '" + key + "' must be a number");
        return fallback;
    }
    return obj.at(key).get<double>();
}

std::string get_str(const json& obj, const std::string& key, const std::string& where,
                    ConfigErrors& errs) {
    if (!obj.contains(key) || !obj.at(key).is_string()) {
        errs.add(where, "missing/invalid string field '" + key + "'");
        return "";
    }
    return obj.at(key).get<std::string>();
}

} // namespace

ScenarioFile load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("scenario " + path + ": " + e.what());
    }
    std::string base_dir = fs::path(path).parent_path().string();
    if (base_dir.empty()) base_dir = ".";

    ConfigErrors errs;
    ScenarioFile out;
    Scenario& s = out.scenario;

    s.name = doc.value("name", fs::path(path).stem().string());
    if (doc.contains("seed")) {
        if (doc["seed"].is_number_unsigned() || doc["seed"].is_number_integer())
            s.seed = doc["seed"].get<std::uint64_t>();
        else
            errs.add("seed", "must be an integer");
    }
    out.output_dir = doc.value("output_dir", "out");

    if (!doc.contains("topology") || !doc["topology"].is_object()) {
        errs.add("topology", "missing section");
    } else {
        const json& topo = doc["topology"];
        if (!topo.contains("tiers") || !topo["tiers"].is_array() ||
            topo["tiers"].empty()) {
            errs.add("topology.tiers", "must be a non-empty array");
        } else {
            int i = 0;
            for (const auto& jt : topo["tiers"]) {
                std::string where = "topology.tiers[" + std::to_string(i++) + "]";
                TierSpec tier;
                auto t = tier_from_name(get_str(jt, "tier", where, errs));
                if (!t) {
                    errs.add(where, "tier must be cloud|mini-dc|edge|ap");
                    continue;
                }
                tier.tier = *t;
                tier.count = static_cast<int>(get_num(jt, "count", 0, where, errs));
                if (jt.contains("hw")) tier.hw = parse_hw(jt["hw"], where, errs);
                tier.downlink_latency_ms =
                    get_num(jt, "downlink_latency_ms", 0, where, errs);
                s.topology.tiers.push_back(tier);
            }
        }
        if (!topo.contains("ap_grid") || !topo["ap_grid"].is_object()) {
            errs.add("topology.ap_grid", "missing section");
        } else {
            const json& grid = topo["ap_grid"];
            s.topology.grid.width_m = get_num(grid, "width_m", 0, "ap_grid", errs, true);
            s.topology.grid.height_m = get_num(grid, "height_m", 0, "ap_grid", errs, true);
            s.topology.grid.spacing_m =
                get_num(grid, "spacing_m", 0, "ap_grid", errs, true);
        }
    }

    if (!doc.contains("apps") || !doc["apps"].is_array() || doc["apps"].empty()) {
        errs.add("apps", "must be a non-empty array");
    } else {
        int i = 0;
        for (const auto& ja : doc["apps"]) {
            std::string where = "apps[" + std::to_string(i++) + "]";
            AppSpec app;
            app.service.service_id = get_str(ja, "id", where, errs);
            app.app_class = ja.value("class", "");
            if (app.app_class == "all")
                errs.add(where, "class name 'all' is reserved");
            app.service.required_hw =
                static_cast<std::int64_t>(get_num(ja, "required_hw", 1, where, errs));
            app.service.max_request_rate =
                get_num(ja, "max_request_rate", 0, where, errs, true);
            app.service.max_latency_to_client =
                get_num(ja, "max_latency_ms", 0, where, errs, true);
            s.apps.push_back(std::move(app));
        }
    }

    if (!doc.contains("policies") || !doc["policies"].is_object()) {
        errs.add("policies", "missing app -> policy map");
    } else {
        std::map<std::string, std::string> raw;
        for (const auto& [app, jp] : doc["policies"].items()) {
            if (!jp.is_string()) {
                errs.add("policies." + app, "must be a policy name or path");
                continue;
            }
            raw[app] = jp.get<std::string>();
        }
        auto star = raw.find("*");
        for (const auto& app : s.apps) {
            auto it = raw.find(app.service.service_id);
            if (it == raw.end()) it = star;
            if (it == raw.end()) {
                errs.add("policies", "no policy for app " + app.service.service_id +
                                         " (and no '*' default)");
                continue;
            }
            std::string file = resolve_policy_path(it->second, base_dir);
            try {
                policy::PolicyProgram prog = policy::parse_policy_file(file);
                s.policy_of_app[app.service.service_id] = prog.name;
                s.policies.emplace(prog.name, std::move(prog));
            } catch (const std::exception& e) {
                errs.add("policies." + app.service.service_id, e.what());
            }
        }
    }

    if (!doc.contains("users")) {
        errs.add("users", "missing section");
    } else if (doc["users"].is_array()) {
        int i = 0;
        for (const auto& ju : doc["users"]) {
            std::string where = "users[" + std::to_string(i++) + "]";
            UserSpec u;
            u.user_id = get_str(ju, "id", where, errs);
            u.app_id = get_str(ju, "app", where, errs);
            u.request_period = get_num(ju, "request_period", 1, where, errs);
            s.users.push_back(std::move(u));
        }
    } else if (doc["users"].is_object()) {
        int count = static_cast<int>(get_num(doc["users"], "count", 0, "users", errs, true));
        double period = get_num(doc["users"], "request_period", 1, "users", errs);
        if (count <= 0) errs.add("users.count", "must be > 0");
        for (int i = 0; i < count && !s.apps.empty(); ++i) {
            UserSpec u;
            u.user_id = "u" + std::to_string(i);
            u.app_id = s.apps[i % s.apps.size()].service.service_id; // round-robin split
            u.request_period = period;
            s.users.push_back(std::move(u));
        }
    } else {
        errs.add("users", "must be an array or a generator object");
    }

    if (!doc.contains("mobility") || !doc["mobility"].is_object()) {
        errs.add("mobility", "missing section");
    } else if (doc["mobility"].contains("trace")) {
        TraceFileSource src;
        fs::path p(get_str(doc["mobility"], "trace", "mobility", errs));
        src.path = p.is_absolute() ? p.string() : (fs::path(base_dir) / p).string();
        if (!fs::exists(src.path))
            errs.add("mobility.trace", "file does not exist: " + src.path);
        s.mobility = src;
    } else if (doc["mobility"].contains("synthetic")) {
        const json& jm = doc["mobility"]["synthetic"];
        SyntheticSource src;
        src.epochs = static_cast<int>(get_num(jm, "epochs", 1, "mobility.synthetic", errs, true));
        src.move_prob = get_num(jm, "move_prob", 0, "mobility.synthetic", errs, true);
        src.area_w = get_num(jm, "area_w", 0, "mobility.synthetic", errs);
        src.area_h = get_num(jm, "area_h", 0, "mobility.synthetic", errs);
        s.mobility = src;
    } else {
        errs.add("mobility", "needs either 'trace' or 'synthetic'");
    }

    if (!doc.contains("periods") || !doc["periods"].is_object()) {
        errs.add("periods", "missing section");
    } else {
        const json& jp = doc["periods"];
        s.periods.request_period = get_num(jp, "request_period", 1, "periods", errs, true);
        s.periods.orchestrator_period =
            get_num(jp, "orchestrator_period", 1, "periods", errs, true);
        s.periods.policy_period =
            get_num(jp, "policy_period", s.periods.orchestrator_period, "periods", errs);
        s.periods.mobility_epoch = get_num(jp, "mobility_epoch", 1, "periods", errs, true);
    }

    s.horizon = get_num(doc, "horizon", 0, "horizon", errs, true);
    s.memory_window = static_cast<int>(get_num(doc, "memory_window", 1, "memory_window", errs));
    if (doc.contains("protect_last_instance")) {
        if (doc["protect_last_instance"].is_boolean())
            s.protect_last_instance = doc["protect_last_instance"].get<bool>();
        else
            errs.add("protect_last_instance", "must be a boolean");
    }

    if (doc.contains("initial")) {
        if (!doc["initial"].is_array()) {
            errs.add("initial", "must be an array");
        } else {
            int i = 0;
            for (const auto& jp : doc["initial"]) {
                std::string where = "initial[" + std::to_string(i++) + "]";
                InitialPlacement p;
                p.app_id = get_str(jp, "app", where, errs);
                p.node_id = get_str(jp, "node", where, errs);
                s.initial.push_back(std::move(p));
            }
        }
    }

    if (!errs.any())
        for (const auto& problem : validate_scenario(s)) errs.add("scenario", problem);
    errs.raise_if_any(path);
    return out;
}

} // namespace fogcolony
