#include "fogcolony/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fogcolony {

std::string MobilitySchedule::ap_at(const std::string& user_id, double time) const {
    auto it = timeline.find(user_id);
    if (it == timeline.end()) return "";
    std::string ap;
    for (const auto& [t, a] : it->second) {
        if (t > time) break;
        ap = a;
    }
    return ap;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

double parse_num(const std::string& s, int line_no, const char* what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("trace line " + std::to_string(line_no) + ": bad " +
                                 what + " value '" + s + "'");
    }
}

} // namespace

RawTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("trace file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool resolved;
    if (line == "time,user_id,x_m,y_m")
        resolved = false;
    else if (line == "time,user_id,ap_id")
        resolved = true;
    else
        throw std::runtime_error("trace line 1: unrecognised header '" + line + "'");

    RawTrace trace;
    std::map<std::string, double> last_time;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv(line);
        std::size_t expected = resolved ? 3 : 4;
        if (fields.size() != expected)
            throw std::runtime_error("trace line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(expected) +
                                     " columns, got " + std::to_string(fields.size()));
        TraceSample s;
        s.time = parse_num(fields[0], line_no, "time");
        s.user_id = fields[1];
        if (s.user_id.empty())
            throw std::runtime_error("trace line " + std::to_string(line_no) +
                                     ": empty user id");
        s.resolved = resolved;
        if (resolved) {
            s.ap_id = fields[2];
            if (s.ap_id.empty())
                throw std::runtime_error("trace line " + std::to_string(line_no) +
                                         ": empty ap id");
        } else {
            s.x = parse_num(fields[2], line_no, "x_m");
            s.y = parse_num(fields[3], line_no, "y_m");
        }
        auto it = last_time.find(s.user_id);
        if (it != last_time.end() && s.time < it->second)
            throw std::runtime_error("trace line " + std::to_string(line_no) +
                                     ": timestamps for user " + s.user_id +
                                     " are out of order");
        last_time[s.user_id] = s.time;
        trace.samples.push_back(std::move(s));
    }
    return trace;
}

void save_trace(const RawTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write trace file: " + path);
    bool resolved = !trace.samples.empty() && trace.samples.front().resolved;
    out << (resolved ? "time,user_id,ap_id" : "time,user_id,x_m,y_m") << "\n";
    for (const auto& s : trace.samples) {
        out << s.time << "," << s.user_id << ",";
        if (s.resolved)
            out << s.ap_id;
        else
            out << s.x << "," << s.y;
        out << "\n";
    }
}

std::string nearest_ap(double x_m, double y_m, const Topology& topo) {
    std::string best;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const auto& [id, node] : topo.nodes()) {
        if (node.tier != Tier::Ap || !node.position) continue;
        double dx = (*node.position)[0] - x_m;
        double dy = (*node.position)[1] - y_m;
        double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) { // map order: equal distances keep the smaller id
            best_d2 = d2;
            best = id;
        }
    }
    if (best.empty())
        throw std::runtime_error("topology has no positioned APs");
    return best;
}

MobilitySchedule resolve_schedule(const RawTrace& trace, const Topology& topo) {
    MobilitySchedule sched;
    for (const auto& s : trace.samples) {
        std::string ap = s.resolved ? s.ap_id : nearest_ap(s.x, s.y, topo);
        if (s.resolved && !topo.has_node(ap))
            throw std::runtime_error("trace references unknown AP " + ap);
        auto& steps = sched.timeline[s.user_id];
        if (!steps.empty() && steps.back().second == ap) continue;
        if (!steps.empty())
            sched.handovers.push_back({s.time, s.user_id, steps.back().second, ap});
        steps.push_back({s.time, ap});
    }
    std::stable_sort(sched.handovers.begin(), sched.handovers.end(),
                     [](const HandoverEvent& a, const HandoverEvent& b) {
                         return a.time < b.time;
                     });
    return sched;
}

RawTrace gen_synthetic_trace(const SyntheticTraceParams& params) {
    if (params.move_prob < 0 || params.move_prob > 1)
        throw std::invalid_argument("move_prob must be in [0,1]");
    if (params.users <= 0 || params.epochs <= 0)
        throw std::invalid_argument("synthetic trace needs users > 0 and epochs > 0");
    std::mt19937_64 rng(params.seed);
    // Fixed-width uniform doubles in [0,1), independent of the standard
    // library's distribution implementation.
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

    RawTrace trace;
    std::vector<std::pair<double, double>> pos(params.users);
    for (int u = 0; u < params.users; ++u)
        pos[u] = {uniform() * params.area_w, uniform() * params.area_h};
    for (int e = 0; e < params.epochs; ++e) {
        for (int u = 0; u < params.users; ++u) {
            if (e > 0 && uniform() < params.move_prob)
                pos[u] = {uniform() * params.area_w, uniform() * params.area_h};
            TraceSample s;
            s.time = e * params.epoch_period;
            s.user_id = "u" + std::to_string(u);
            s.x = pos[u].first;
            s.y = pos[u].second;
            trace.samples.push_back(std::move(s));
        }
    }
    return trace;
}

int handovers_between(const MobilitySchedule& schedule, double t0, double t1) {
    int count = 0;
    for (const auto& h : schedule.handovers)
        if (h.time > t0 && h.time <= t1) ++count;
    return count;
}

} // namespace fogcolony
