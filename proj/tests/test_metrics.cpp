#include "fogcolony/metrics.hpp"

#include "doctest.h"

#include <random>

using namespace fogcolony;
using namespace fogcolony::metrics;

namespace {

OpRecord op(OpKind kind, const std::string& cls) {
    OpRecord r;
    r.kind = kind;
    r.app_class = cls;
    return r;
}

SimulationReport tiny_report() {
    SimulationReport rep;
    rep.class_of_app = {{"a", "WS"}, {"b", "LS"}};
    rep.orchestrator_period = 1;
    rep.mobility_epoch = 2;
    rep.horizon = 8;
    // Two-cycle epochs; handovers land on the first cycle of each epoch.
    for (int i = 0; i < 8; ++i) {
        CycleRecord rec;
        rec.cycle = i;
        rec.time = i + 1;
        rep.cycles.push_back(rec);
    }
    return rep;
}

} // namespace

TEST_CASE("pearson on exact series") {
    CHECK(*pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(!pearson({1, 2, 3}, {0, 0, 0}).has_value());
    CHECK(!pearson({5, 5, 5}, {1, 2, 3}).has_value());
    CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), std::invalid_argument);
    CHECK_THROWS_AS(pearson({1}, {1}), std::invalid_argument);
}

TEST_CASE("pearson symmetry and scale invariance") {
    std::mt19937_64 rng(11);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> xs, ys;
        for (int i = 0; i < 12; ++i) {
            xs.push_back(uniform() * 10);
            ys.push_back(uniform() * 10);
        }
        auto r1 = pearson(xs, ys);
        auto r2 = pearson(ys, xs);
        REQUIRE(r1.has_value());
        CHECK(*r1 == doctest::Approx(*r2).epsilon(1e-12));

        double a = uniform() * 4 - 2;
        if (a == 0) a = 1;
        double b = uniform() * 10 - 5;
        std::vector<double> scaled;
        for (double x : xs) scaled.push_back(a * x + b);
        auto r3 = pearson(scaled, ys);
        REQUIRE(r3.has_value());
        double sign = a > 0 ? 1.0 : -1.0;
        CHECK(*r3 == doctest::Approx(sign * *r1).epsilon(1e-9));
    }
}

TEST_CASE("ops per movement divides totals by handovers") {
    auto rep = tiny_report();
    rep.total_handovers = 20;
    for (int i = 0; i < 10; ++i)
        rep.cycles[i % 8].accepted.push_back(op(OpKind::Replicate, "WS"));

    auto series = build_series(rep);
    auto avg = ops_per_movement(series);
    CHECK(*avg.at("all").replicate == doctest::Approx(0.5));
    CHECK(*avg.at("all").undeploy == doctest::Approx(0));
    CHECK(*avg.at("WS").replicate == doctest::Approx(0.5));
    CHECK(*avg.at("LS").replicate == doctest::Approx(0));

    rep.total_handovers = 0;
    auto none = ops_per_movement(build_series(rep));
    CHECK(!none.at("all").replicate.has_value());
}

TEST_CASE("service usage is a plain ratio") {
    CHECK(service_usage(35, 40) == doctest::Approx(0.875));
    CHECK(service_usage(0, 40) == 0);
    CHECK(service_usage(80, 40) == doctest::Approx(2.0)); // overload exceeds 1
    CHECK(service_usage(10, 5) == doctest::Approx(2 * service_usage(5, 5)));
    CHECK_THROWS_AS(service_usage(1, 0), std::invalid_argument);
}

TEST_CASE("average response time per class and overall") {
    auto rep = tiny_report();
    // WS users pinned at 8 ms; LS users at 0 ms; equal sample counts.
    for (auto& rec : rep.cycles) {
        rec.response_by_class["WS"] = {8.0 * 3, 3};
        rec.response_by_class["LS"] = {0.0, 3};
    }
    auto avg = avg_response_time(rep);
    CHECK(*avg.at("WS") == doctest::Approx(8.0));
    CHECK(*avg.at("LS") == doctest::Approx(0.0));
    CHECK(*avg.at("all") == doctest::Approx(4.0));

    SimulationReport empty = tiny_report();
    auto none = avg_response_time(empty);
    CHECK(!none.at("WS").has_value());
}

TEST_CASE("convergence counts op-cycles from each movement burst") {
    auto rep = tiny_report(); // epochs of 2 cycles: {0,1}, {2,3}, {4,5}, {6,7}

    // epoch 1: handover at cycle 2, quiet immediately -> 0
    rep.cycles[2].handovers = 1;
    // epoch 2: handover at cycle 4, ops in 4 and 5 -> 2, never quiet -> flagged
    rep.cycles[4].handovers = 2;
    rep.cycles[4].accepted.push_back(op(OpKind::Replicate, "WS"));
    rep.cycles[5].accepted.push_back(op(OpKind::Migrate, "LS"));
    // epoch 3: handover at cycle 6, one op then quiet -> 1
    rep.cycles[6].handovers = 1;
    rep.cycles[6].accepted.push_back(op(OpKind::Undeploy, "WS"));

    auto conv = convergence_cycles(build_series(rep));
    REQUIRE(conv.epochs.size() == 3); // epoch 0 saw no movement
    CHECK(conv.epochs[0].cycles == 0);
    CHECK(conv.epochs[0].converged);
    CHECK(conv.epochs[1].cycles == 2);
    CHECK(!conv.epochs[1].converged);
    CHECK(conv.epochs[2].cycles == 1);
    CHECK(conv.epochs[2].converged);
    CHECK(conv.mean == doctest::Approx(1.0));
    CHECK(conv.max == 2);
    CHECK(conv.non_converged == 1);
}

TEST_CASE("inhibited reduction percentages") {
    CHECK(inhibited_reduction(100.0, 77.0) == doctest::Approx(23.0));
    CHECK(inhibited_reduction(100.0, 100.0) == doctest::Approx(0.0));
    CHECK(inhibited_reduction(100.0, 15.0) == doctest::Approx(85.0));
    CHECK_THROWS_AS(inhibited_reduction(0.0, 5.0), std::invalid_argument);
}

TEST_CASE("count conservation: each live agent contributes one outcome") {
    auto rep = tiny_report();
    std::mt19937_64 rng(3);
    for (auto& rec : rep.cycles) {
        rec.live_agents = 6;
        int acting = static_cast<int>(rng() % 4);
        int blocked = static_cast<int>(rng() % 3);
        for (int i = 0; i < acting; ++i)
            rec.accepted.push_back(op(OpKind::Replicate, "WS"));
        for (int i = 0; i < blocked; ++i)
            rec.inhibited.push_back(op(OpKind::Migrate, "LS"));
        rec.nops = rec.live_agents - acting - blocked;
    }
    auto series = build_series(rep);
    const auto& all = series.by_class.at("all");
    for (std::size_t i = 0; i < rep.cycles.size(); ++i) {
        int outcomes = all.undeploy[i] + all.migrate[i] + all.replicate[i] +
                       all.inhibited[i] + series.nops[i];
        CHECK(outcomes == series.live_agents[i]);
    }
}
