#include "fogcolony/mobility.hpp"

#include "doctest.h"

#include <cstdio>
#include <fstream>

using namespace fogcolony;

namespace {

Topology four_corner_aps() {
    Topology t;
    t.add_node({"ap0", Tier::Ap, Hw::units(1), std::array<double, 2>{0, 0}});
    t.add_node({"ap1", Tier::Ap, Hw::units(1), std::array<double, 2>{500, 0}});
    t.add_node({"ap2", Tier::Ap, Hw::units(1), std::array<double, 2>{0, 500}});
    t.add_node({"ap3", Tier::Ap, Hw::units(1), std::array<double, 2>{500, 500}});
    t.add_node({"hub", Tier::Edge, Hw::units(4), std::nullopt});
    for (const char* ap : {"ap0", "ap1", "ap2", "ap3"}) t.add_link(ap, "hub", 3);
    return t;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content) {
        path = std::string("/tmp/fogcolony_trace_") + std::to_string(rand()) + ".csv";
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("grid generation covers whole cells at their centres") {
    auto grid = gen_grid_aps(4000, 4000, 500);
    CHECK(grid.size() == 64);
    CHECK(grid[0][0] == doctest::Approx(250));
    CHECK(grid[0][1] == doctest::Approx(250));
    CHECK(grid[63][0] == doctest::Approx(3750));

    CHECK(gen_grid_aps(500, 500, 500).size() == 1);
    CHECK(gen_grid_aps(1000, 500, 500).size() == 2);
    CHECK_THROWS_AS(gen_grid_aps(100, 100, 500), std::invalid_argument);
}

TEST_CASE("nearest AP by euclidean distance with id tie-break") {
    auto topo = four_corner_aps();
    CHECK(nearest_ap(0, 0, topo) == "ap0");          // exactly on it
    CHECK(nearest_ap(260, 240, topo) == "ap1");      // closest corner wins
    CHECK(nearest_ap(250, 0, topo) == "ap0");        // equidistant: smaller id
}

TEST_CASE("a user that stays put produces no handovers") {
    TempFile f("time,user_id,x_m,y_m\n0,u0,10,10\n100,u0,10,10\n");
    auto raw = load_trace(f.path);
    auto sched = resolve_schedule(raw, four_corner_aps());
    CHECK(sched.handovers.empty());
    CHECK(sched.ap_at("u0", 50) == "ap0");
}

TEST_CASE("out-of-order timestamps name the offending line") {
    TempFile f("time,user_id,x_m,y_m\n100,u0,10,10\n50,u0,10,10\n");
    try {
        load_trace(f.path);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("malformed rows are rejected") {
    TempFile missing("time,user_id,x_m,y_m\n0,u0,10\n");
    CHECK_THROWS(load_trace(missing.path));
    TempFile header("when,who,x,y\n");
    CHECK_THROWS(load_trace(header.path));
    TempFile badnum("time,user_id,x_m,y_m\n0,u0,abc,10\n");
    CHECK_THROWS(load_trace(badnum.path));
}

TEST_CASE("pre-resolved traces attach directly to APs") {
    TempFile f("time,user_id,ap_id\n0,u0,ap2\n10,u0,ap3\n");
    auto sched = resolve_schedule(load_trace(f.path), four_corner_aps());
    REQUIRE(sched.handovers.size() == 1);
    CHECK(sched.handovers[0].from_ap == "ap2");
    CHECK(sched.handovers[0].to_ap == "ap3");
    CHECK(sched.ap_at("u0", 5) == "ap2");
    CHECK(sched.ap_at("u0", 10) == "ap3");
    CHECK(sched.ap_at("u0", 0) == "ap2");
    CHECK(sched.ap_at("u0", -1) == "");
}

TEST_CASE("synthetic traces are a pure function of their parameters") {
    SyntheticTraceParams p;
    p.seed = 42;
    p.users = 10;
    p.area_w = 1000;
    p.area_h = 1000;
    p.epochs = 5;
    p.epoch_period = 100;
    p.move_prob = 1.0;

    auto a = gen_synthetic_trace(p);
    auto b = gen_synthetic_trace(p);
    REQUIRE(a.samples.size() == b.samples.size());
    CHECK(a.samples.size() == 50); // one sample per user per epoch
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].user_id == b.samples[i].user_id);
        CHECK(a.samples[i].x == b.samples[i].x);
        CHECK(a.samples[i].y == b.samples[i].y);
    }

    auto sched = resolve_schedule(a, four_corner_aps());
    CHECK(sched.handovers.size() <= 40); // each user moves at most epochs-1 times
}

TEST_CASE("nobody moves with probability zero") {
    SyntheticTraceParams p;
    p.seed = 1;
    p.users = 8;
    p.area_w = 900;
    p.area_h = 900;
    p.epochs = 6;
    p.epoch_period = 10;
    p.move_prob = 0;
    auto sched = resolve_schedule(gen_synthetic_trace(p), four_corner_aps());
    CHECK(sched.handovers.empty());
}

TEST_CASE("interval handover counts partition the run") {
    TempFile f("time,user_id,ap_id\n"
               "0,u0,ap0\n10,u0,ap1\n20,u0,ap2\n"
               "0,u1,ap3\n15,u1,ap0\n");
    auto sched = resolve_schedule(load_trace(f.path), four_corner_aps());
    REQUIRE(sched.handovers.size() == 3);

    CHECK(handovers_between(sched, 0, 0) == 0);
    CHECK(handovers_between(sched, 0, 100) == 3);
    CHECK(handovers_between(sched, 10, 15) == 1);
    // boundary events belong to the interval they end
    CHECK(handovers_between(sched, 0, 10) + handovers_between(sched, 10, 20) == 3);

    int sum = 0;
    for (double t = 0; t < 100; t += 5) sum += handovers_between(sched, t, t + 5);
    CHECK(sum == 3);
}

TEST_CASE("trace files round-trip through save and load") {
    SyntheticTraceParams p;
    p.seed = 9;
    p.users = 3;
    p.area_w = 800;
    p.area_h = 600;
    p.epochs = 4;
    p.epoch_period = 50;
    p.move_prob = 0.5;
    auto trace = gen_synthetic_trace(p);
    TempFile f("");
    save_trace(trace, f.path);
    auto loaded = load_trace(f.path);
    REQUIRE(loaded.samples.size() == trace.samples.size());
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        CHECK(loaded.samples[i].user_id == trace.samples[i].user_id);
        CHECK(loaded.samples[i].x == doctest::Approx(trace.samples[i].x));
    }
}

