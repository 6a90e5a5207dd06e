#include "dpspin/ground_state.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace dpspin;

namespace {

GroundStateInstance triangle() {
  GroundStateInstance inst(3);
  inst.add_pair(0, 1, -1);
  inst.add_pair(1, 2, -1);
  inst.add_pair(0, 2, -1);
  return inst;
}

GroundStateInstance chain(std::size_t n) {
  GroundStateInstance inst(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    inst.add_pair(i, i + 1, Rational(1, 8));
    inst.add_pair(i + 1, i, Rational(1, 8));
  }
  inst.fix(0, Spin::Plus);
  inst.fix(n - 1, Spin::Minus);
  return inst;
}

GroundStateInstance flipped(const GroundStateInstance& inst) {
  GroundStateInstance out(inst.num_variables());
  for (std::size_t v = 0; v < inst.num_variables(); ++v) {
    if (inst.fixed()[v]) out.fix(v, flip(*inst.fixed()[v]));
    out.add_unary(v, inst.unary()[v].minus, inst.unary()[v].plus);
    out.set_group(v, inst.groups()[v]);
  }
  for (const auto& p : inst.pairs()) out.add_pair(p.u, p.v, p.weight);
  return out;
}

}  // namespace

TEST_CASE("energy of small assignments") {
  GroundStateInstance one(2);
  one.add_pair(0, 1, 1);
  const std::vector<Spin> split{Spin::Plus, Spin::Minus}, same{Spin::Plus, Spin::Plus};
  CHECK(energy(one, split) == 4);
  CHECK(energy(one, same) == 0);

  GroundStateInstance both(2);
  both.add_pair(0, 1, Rational(1, 8));
  both.add_pair(1, 0, Rational(1, 8));
  CHECK(energy(both, split) == 1);

  CHECK_THROWS_AS(energy(one, std::vector<Spin>{Spin::Plus}), InstanceError);
  one.fix(0, Spin::Minus);
  CHECK_THROWS_AS(energy(one, same), InstanceError);
  GroundStateInstance grouped(2);
  grouped.set_group(1, 0);
  CHECK_THROWS_AS(energy(grouped, split), InstanceError);
}

TEST_CASE("enumeration examples") {
  GroundStateInstance single(1);
  single.add_unary(0, 0, 5);
  const auto s = minimize_enum(single);
  CHECK(s.assignment[0] == Spin::Plus);
  CHECK(s.energy == 0);

  const auto t = minimize_enum(triangle());
  CHECK(t.energy == -8);
  CHECK(t.assignment == std::vector<Spin>{Spin::Plus, Spin::Plus, Spin::Minus});
  CHECK(t.exact);
  CHECK(t.method == SolveMethod::Enumeration);

  GroundStateInstance wide(30);
  CHECK_THROWS_AS(minimize_enum(wide), EnumerationCapExceeded);
}

TEST_CASE("min-cut examples") {
  const auto c = minimize_cut(chain(10));
  CHECK(c.energy == 1);
  CHECK(c.energy_value == doctest::Approx(1.0));
  CHECK(c.method == SolveMethod::MinCut);

  GroundStateInstance decoupled(4);
  for (std::size_t v = 0; v < 4; ++v) {
    decoupled.add_unary(v, static_cast<long>(v) - 1, 1 - static_cast<long>(v));
    decoupled.add_pair(v, (v + 1) % 4, 0);
  }
  Rational expected = 0;
  for (long v = 0; v < 4; ++v) expected += std::min<long>(v - 1, 1 - v);
  CHECK(minimize_cut(decoupled).energy == expected);

  CHECK_THROWS_AS(minimize_cut(triangle()), NonSubmodularError);
  CHECK_FALSE(is_submodular(triangle()));
  CHECK_FALSE(is_switchable(triangle()));
}

TEST_CASE("min-cut equals exhaustive search on random submodular instances") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 250; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(i % 15);
    const auto inst = oracle::random_submodular(rng, n);
    REQUIRE(is_submodular(inst));
    const auto cut = minimize_cut(inst);
    const auto brute = oracle::brute_minimum(inst);
    CHECK(cut.energy == brute);
    CHECK(minimize_enum(inst).energy == brute);
    CHECK(energy(inst, cut.assignment) == cut.energy);
  }
}

TEST_CASE("switching gauge handles balanced antiferromagnetic couplings") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 60; ++i) {
    // Random bipartite sign pattern: couplings across the parts negative.
    const std::size_t n = 10;
    GroundStateInstance inst(n);
    std::vector<int> side(n);
    for (auto& s : side) s = static_cast<int>(rng() % 2);
    for (std::size_t u = 0; u < n; ++u) {
      inst.add_unary(u, Rational(static_cast<long>(rng() % 5), 4), Rational(static_cast<long>(rng() % 5), 4));
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng() % 3 == 0) inst.add_pair(u, v, Rational(static_cast<long>(1 + rng() % 4), 8) * (side[u] == side[v] ? 1 : -1));
    }
    if (i % 2) inst.fix(0, Spin::Minus);
    REQUIRE(is_switchable(inst));
    const auto s = minimize_switched_cut(inst);
    CHECK(s.energy == oracle::brute_minimum(inst));
    CHECK(minimize(inst, SolveOptions{.enumeration_cap = 4}).energy == s.energy);
  }
}

TEST_CASE("annealing gives upper bounds and finds small optima") {
  const auto t = minimize_anneal(triangle(), 1, AnnealSchedule{.sweeps = 2000});
  CHECK(t.energy == -8);
  CHECK_FALSE(t.exact);

  GroundStateInstance single(1);
  single.add_unary(0, 3, -2);
  CHECK(minimize_anneal(single, 9, AnnealSchedule{.sweeps = 1}).energy == -2);

  std::mt19937_64 rng(8);
  for (int i = 0; i < 30; ++i) {
    GroundStateInstance inst(8);
    for (std::size_t u = 0; u < 8; ++u)
      for (std::size_t v = u + 1; v < 8; ++v)
        if (rng() % 2) inst.add_pair(u, v, Rational(static_cast<long>(rng() % 7) - 3, 8));
    const auto a = minimize_anneal(inst, 5, AnnealSchedule{.sweeps = 200});
    CHECK(a.energy >= oracle::brute_minimum(inst));
    CHECK(energy(inst, a.assignment) == a.energy);
    CHECK(minimize_anneal(inst, 5, AnnealSchedule{.sweeps = 200}).assignment == a.assignment);
  }
}

TEST_CASE("dispatch picks the cheapest exact method") {
  GroundStateInstance fixed(2);
  fixed.fix(0, Spin::Plus);
  fixed.fix(1, Spin::Minus);
  fixed.add_pair(0, 1, 1);
  const auto d = minimize(fixed);
  CHECK(d.method == SolveMethod::Direct);
  CHECK(d.energy == 4);

  CHECK(minimize(triangle()).method == SolveMethod::Enumeration);
  CHECK(minimize(chain(40)).method == SolveMethod::MinCut);

  GroundStateInstance frustrated(30);
  for (std::size_t v = 0; v < 30; ++v) frustrated.add_pair(v, (v + 1) % 30, -1);
  frustrated.add_pair(0, 2, -1);
  CHECK_THROWS_AS(minimize(frustrated), NonSubmodularError);
  const auto a = minimize(frustrated, SolveOptions{.allow_anneal = true});
  CHECK(a.method == SolveMethod::Annealing);
  CHECK_FALSE(a.exact);
}

TEST_CASE("spin-flip symmetry and monotonicity") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 60; ++i) {
    auto inst = oracle::random_submodular(rng, 10);
    const Rational base = minimize(inst).energy;
    CHECK(minimize(flipped(inst)).energy == base);
    inst.add_pair(rng() % 10, rng() % 10, Rational(static_cast<long>(rng() % 4), 8));
    CHECK(minimize(inst).energy >= base);
  }
}

TEST_CASE("groups are contracted and conflicting fixes rejected") {
  GroundStateInstance inst(3);
  inst.set_group(1, 0);
  inst.set_group(2, 0);
  inst.add_unary(0, 1, 0);
  inst.add_unary(2, 1, 0);
  inst.add_unary(1, -3, 0);
  const auto s = minimize(inst);
  CHECK(count_free_groups(inst) == 1);
  CHECK(s.energy == -1);
  CHECK(s.assignment == std::vector<Spin>(3, Spin::Plus));

  inst.fix(0, Spin::Plus);
  inst.fix(2, Spin::Minus);
  CHECK_THROWS_AS(minimize(inst), InstanceError);
}
