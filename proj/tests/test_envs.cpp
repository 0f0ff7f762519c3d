#include <cmath>
#include <map>

#include <doctest.h>

#include "prmrl/envs.hpp"
#include "test_helpers.hpp"

using namespace prmrl;

namespace {

// The tiniest useful office: one open room, no special cells besides o.
const char* kOpenRoom =
    "#####\n"
    "#...#\n"
    "#.o.#\n"
    "#...#\n"
    "#####\n";

NoiseSpec off() { return {1.0, 1.0, false}; }

}  // namespace

TEST_CASE("office movement distribution is a third each way") {
    OfficeEnv env(OfficeMap::parse(kOpenRoom));
    Rng rng(99);
    std::map<std::pair<int, int>, int> seen;
    const std::vector<double> x{2, 2};
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
        const auto next = env.step(x, Action::discrete(OfficeEnv::kNorth), rng);
        seen[{static_cast<int>(next[0]), static_cast<int>(next[1])}]++;
    }
    // North, and the two perpendicular cells (west, east).
    CHECK(seen.size() == 3);
    for (const auto& [cell, count] : seen)
        CHECK(std::fabs(count / static_cast<double>(n) - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("office stationary and wall rules") {
    OfficeEnv env(OfficeMap::parse("####\n"
                                   "#ot#\n"
                                   "####\n"));
    Rng rng(1);
    // t freezes the agent under every action.
    for (int a = 0; a < 4; ++a)
        CHECK(env.step({2, 1}, Action::discrete(a), rng) == std::vector<double>{2, 1});
    // A fully walled-in cell bumps on every branch of every action.
    OfficeEnv boxed(OfficeMap::parse("###\n#o#\n###\n"));
    for (int i = 0; i < 50; ++i)
        CHECK(boxed.step({1, 1}, Action::discrete(OfficeEnv::kNorth), rng) ==
              std::vector<double>{1, 1});
}

TEST_CASE("office exact kernel matches sampling branches") {
    OfficeEnv env(OfficeMap::parse(kOpenRoom));
    const auto dist = env.transition(env.state_index({2, 2}), OfficeEnv::kEast);
    double total = 0.0;
    for (const auto& [cell, p] : dist) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist.size() == 3);  // east, north, south
}

TEST_CASE("office map rejects malformed input") {
    CHECK_THROWS_AS(OfficeMap::parse("##\n###\n"), ConfigError);     // ragged
    CHECK_THROWS_AS(OfficeMap::parse("###\n#.#\n###\n"), ConfigError);  // no start
    CHECK_THROWS_AS(OfficeMap::parse("###\n#oo\n###\n"), ConfigError);  // two starts
    CHECK_THROWS_AS(OfficeMap::parse("###\n#oz\n###\n"), ConfigError);  // unknown char
}

TEST_CASE("office default map fixture loads and labels") {
    OfficeEnv env(OfficeMap::load(prmrl::test::fixture_path("office_default.map")));
    CHECK(env.map().width == 12);
    CHECK(env.map().height == 9);
    int c = 0, m = 0, h = 0, t = 0;
    for (const auto& [row, col] : env.floor_cells()) {
        const char ch = env.map().at(row, col);
        c += ch == 'c';
        m += ch == 'm';
        h += ch == 'h';
        t += ch == 't';
    }
    CHECK(c == 1);
    CHECK(m == 1);
    CHECK(h == 3);
    CHECK(t == 1);
}

TEST_CASE("two-tank golden step") {
    TwoTankEnv env(off());
    Rng rng(1);
    const auto next = env.step({10.0, 10.0}, Action::discrete(2), rng);  // u = 4.5
    CHECK(std::fabs(next[0] - 15.557280900008412) < 1e-9);
    CHECK(std::fabs(next[1] - 13.162524906890940) < 1e-9);
}

TEST_CASE("two-tank zero inflow on empty tanks is a fixed point") {
    TwoTankEnv env(off());
    Rng rng(1);
    CHECK(env.step({0, 0}, Action::discrete(0), rng) == std::vector<double>{0, 0});
}

TEST_CASE("two-tank labels") {
    TwoTankEnv env(off());
    CHECK(env.label_of({30, 50}) == env.propositions().label_of({"b"}));
    CHECK(env.label_of({50, 5}) == 0);
    CHECK(env.label_of({90, 85}) == env.propositions().label_of({"a"}));
    CHECK(env.label_of({0.2, 0.1}) == env.propositions().label_of({"a"}));
}

TEST_CASE("five-room golden steps") {
    FiveRoomEnv env(off());
    Rng rng(1);
    const std::vector<double> all20(5, 20.0);
    const auto next = env.step(all20, Action::continuous({1.0, 0.0}), rng);
    CHECK(std::fabs(next[0] - 21.038) < 1e-9);
    CHECK(std::fabs(next[1] - 19.538) < 1e-9);
}

TEST_CASE("five-room output stays inside the box") {
    FiveRoomEnv env({0.01, 0.01, true});
    Rng rng(5);
    std::vector<double> x(5, 24.9);
    for (int i = 0; i < 200; ++i) {
        x = env.step(x, Action::continuous({rng.uniform(), rng.uniform()}), rng);
        for (double v : x) {
            CHECK(v >= 15.0);
            CHECK(v <= 25.0);
        }
    }
}

TEST_CASE("five-road golden steps and unclamped exit") {
    FiveRoadEnv env(off());
    Rng rng(1);
    const std::vector<double> all5(5, 5.0);
    const auto next = env.step(all5, Action::continuous({1.0, 0.0}), rng);
    CHECK(std::fabs(next[0] - 11.0) < 1e-9);   // leaves the box by design
    CHECK(std::fabs(next[1] - 3.75) < 1e-9);
    CHECK(env.label_of(next) == env.propositions().label_of({"a"}));

    const std::vector<double> zero(5, 0.0);
    CHECK(env.step(zero, Action::continuous({0.0, 0.0}), rng) == zero);
}

TEST_CASE("five-road labels") {
    FiveRoadEnv env(off());
    CHECK(env.label_of({10.5, 5, 5, 5, 5}) == env.propositions().label_of({"a"}));
    CHECK(env.label_of({5, 5, 5, 5, 5}) == env.propositions().label_of({"b"}));
    CHECK(env.label_of({0.5, 0.5, 0.5, 0.5, 0.5}) == env.propositions().label_of({"c"}));
    CHECK(env.label_of({9, 9, 9, 9, 9}) == env.propositions().label_of({"d"}));
    CHECK(env.label_of({0.5, 5, 5, 5, 5}) == 0);
}

TEST_CASE("noise-off envs are pure functions") {
    TwoTankEnv tank(off());
    Rng r1(1), r2(2);
    const auto a = tank.step({33, 44}, Action::discrete(3), r1);
    const auto b = tank.step({33, 44}, Action::discrete(3), r2);
    CHECK(a == b);
}

TEST_CASE("toy drift environment") {
    Toy1dEnv env;
    Rng rng(1);
    CHECK(env.step({1.0}, Action::continuous({1.0}), rng) == std::vector<double>{2.0});
    CHECK(env.step({0.2}, Action::continuous({-1.0}), rng) == std::vector<double>{0.0});
    CHECK(env.label_of({5.0}) == env.propositions().label_of({"b"}));
    CHECK(env.label_of({3.9}) == 0);
}

TEST_CASE("environment factory") {
    EnvConfig cfg;
    cfg.name = "two_tank";
    CHECK(make_env(cfg)->name() == "two_tank");
    cfg.name = "nope";
    CHECK_THROWS_AS(make_env(cfg), ConfigError);
}
