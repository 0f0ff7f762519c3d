#include <doctest.h>

#include "prmrl/discretize.hpp"
#include "test_helpers.hpp"

using namespace prmrl;
using prmrl::test::load_fixture;
using prmrl::test::parse_machine;

TEST_CASE("uniform partition of a single dimension") {
    auto prm = parse_machine(R"(
machine line
alphabet { b }
var x : real init 0 bounds [0, 10]
mode q0 init {
  on b | !b -> q0 reward 0
}
)");
    const auto disc = discretize_prm(prm, {1.0});
    CHECK(disc.size() == 10);
    for (std::size_t i = 0; i < 10; ++i)
        CHECK(disc.state(i).center[0] == doctest::Approx(0.5 + i).epsilon(1e-12));
}

TEST_CASE("recurrence machine discretizes to 300 states, 200 of them live") {
    const auto prm = load_fixture("a_r1.prm");
    const auto disc = discretize_prm(prm, {1.0, 1.0});
    CHECK(disc.size() == 300);
    CHECK(disc.nonterminal_ids().size() == 200);
    CHECK(disc.terminal_ids().size() == 100);
}

TEST_CASE("boundary points belong to the cell they open") {
    auto prm = parse_machine(R"(
machine line
alphabet { b }
var x : real init 0 bounds [0, 10]
mode q0 init {
  on b | !b -> q0 reward 0
}
)");
    const auto disc = discretize_prm(prm, {1.0});
    CHECK(disc.cell_of(0, 3.0) == 3);   // half-open [3, 4)
    CHECK(disc.cell_of(0, 2.999999) == 2);
    CHECK(disc.cell_of(0, 0.0) == 0);
    CHECK(disc.cell_of(0, 10.0) == 9);  // top bound folds into the last cell
}

TEST_CASE("lookup of every cell center returns that cell") {
    for (const auto* name : {"a_r1.prm", "a_r2.prm", "a_r3.prm"}) {
        const auto prm = load_fixture(name);
        std::vector<double> widths;
        for (const auto& [lo, hi] : prm.psi_bounds) widths.push_back((hi - lo) / 7.0);
        const auto disc = discretize_prm(prm, widths);
        for (std::size_t id = 0; id < disc.size(); ++id) {
            const auto& s = disc.state(id);
            CHECK(disc.id_of(s.mode, s.center) == id);
        }
    }
}

TEST_CASE("ragged last cell keeps its center inside the bounds") {
    auto prm = parse_machine(R"(
machine line
alphabet { b }
var x : real init 0 bounds [0, 10]
mode q0 init {
  on b | !b -> q0 reward 0
}
)");
    const auto disc = discretize_prm(prm, {3.0});
    CHECK(disc.cells(0) == 4);
    CHECK(disc.state(3).center[0] == doctest::Approx(9.5));  // cell [9, 10]
    CHECK(disc.id_of(0, {9.9}) == 3);
}

TEST_CASE("discretization rejects bad grids") {
    const auto prm = load_fixture("a_r1.prm");
    CHECK_THROWS_AS(discretize_prm(prm, {1.0}), ConfigError);
    CHECK_THROWS_AS(discretize_prm(prm, {0.0, 1.0}), ConfigError);
}

TEST_CASE("zero-dimensional machines collapse to one state per mode") {
    const auto prm = load_fixture("toy_reach.prm");
    const auto disc = discretize_prm(prm, {});
    CHECK(disc.size() == 2);
    CHECK(disc.nonterminal_ids().size() == 1);
}
