#include "dpspin/surface_tension.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <string>

using namespace dpspin;

namespace {

std::string fixture(const std::string& name) { return std::string(DPSPIN_FIXTURE_DIR) + "/" + name; }

RationalVector rv(std::initializer_list<long> v) {
  RationalVector out;
  for (long x : v) out.emplace_back(x);
  return out;
}

Rational brute_value(const LatticeModel& m, const ConnectivitySummary& s, int phase, std::vector<std::int64_t> nu,
                     std::int64_t t) {
  Rational norm = 1;
  for (int i = 1; i < m.dimension(); ++i) norm *= t;
  return oracle::brute_cell_minimum(m, s, phase, nu, t) / norm;
}

}  // namespace

TEST_CASE("rational vectors parse") {
  CHECK(parse_rational_vector("1,0") == rv({1, 0}));
  CHECK(parse_rational_vector("1/2,-3")[0] == Rational(1, 2));
  CHECK(format_rational_vector(rv({1, -1})) == "1,-1");
  CHECK_THROWS(parse_rational_vector("1,,2"));
  CHECK_THROWS(parse_rational_vector(""));
}

TEST_CASE("oriented cubes") {
  CHECK(oriented_cube(2, rv({1, 0}), 4).size() == 25);
  CHECK(oriented_cube(2, rv({1, 1}), 4).size() == 13);
  CHECK(oriented_cube(1, rv({-1}), 3).size() == 3);
  const auto frame = orthogonal_frame(rv({1, 2, 0}), 3);
  REQUIRE(frame.size() == 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) {
      Rational d = 0;
      for (std::size_t c = 0; c < 3; ++c) d += frame[i][c] * frame[j][c];
      CHECK(d == 0);
    }
  for (const auto& nu : {std::vector<std::int64_t>{1, 1}, std::vector<std::int64_t>{2, 1}})
    for (std::int64_t t : {3, 4, 6}) {
      std::size_t expected = 0;
      for (const Vec& k : oracle::box_sites(2, -t, t)) expected += oracle::in_oriented_cube(k, nu, t);
      CHECK(oriented_cube(2, rv({static_cast<long>(nu[0]), static_cast<long>(nu[1])}), t).size() == expected);
    }
}

TEST_CASE("one-dimensional chains cost alpha per jump") {
  const auto m = load_model(fixture("m1.json"));
  const auto s = classify(m);
  for (std::int64_t t : {2, 3, 4, 8, 16}) CHECK(cell_value(m, s, 1, rv({1}), t).value == 1);
  const auto row = fhom_estimate(m, s, 1, rv({-1}), {2, 4, 8}, 2);
  CHECK(row.estimate == 1);
  CHECK(row.increment == 0);

  const auto ex62 = load_model(fixture("ex62.json"));
  const auto s62 = classify(ex62);
  CHECK(fhom_estimate(ex62, s62, 1, rv({1}), {2, 4}).estimate == 1);
  CHECK(fhom_estimate(ex62, s62, 2, rv({1}), {2, 4}).estimate == 2);
  CHECK(fhom_total(ex62, s62, rv({1}), {2, 4}) == 3);
}

TEST_CASE("cell values agree with exhaustive search on small cells") {
  for (const char* name : {"fig8.json", "fig9.json", "m1.json", "ex64.json"}) {
    const auto m = load_model(fixture(name));
    const auto s = classify(m);
    const std::vector<std::vector<std::int64_t>> normals =
        m.dimension() == 1 ? std::vector<std::vector<std::int64_t>>{{1}, {-1}}
                           : std::vector<std::vector<std::int64_t>>{{1, 0}, {0, -1}, {1, 1}, {2, 1}};
    for (int phase = 1; phase <= m.num_phases(); ++phase)
      for (const auto& nu : normals)
        for (std::int64_t t : {2, 3, 4}) {
          INFO(name << " phase " << phase << " T " << t);
          RationalVector n;
          for (auto x : nu) n.emplace_back(x);
          CHECK(cell_value(m, s, phase, n, t).value == brute_value(m, s, phase, nu, t));
        }
  }
  std::mt19937_64 rng(17);
  for (int i = 0; i < 25; ++i) {
    const auto m = i % 2 ? oracle::random_model_1d(rng, true) : oracle::random_model_2d(rng);
    const auto s = classify(m);
    const std::vector<std::int64_t> nu = m.dimension() == 1 ? std::vector<std::int64_t>{1} : std::vector<std::int64_t>{1, 1};
    RationalVector n;
    for (auto x : nu) n.emplace_back(x);
    for (std::int64_t t : {2, 3, 4}) CHECK(cell_value(m, s, 1, n, t).value == brute_value(m, s, 1, nu, t));
  }
}

TEST_CASE("point-symmetric models give f(nu) = f(-nu) and normals scale out") {
  for (const char* name : {"fig8.json", "fig9.json"}) {
    const auto m = load_model(fixture(name));
    const auto s = classify(m);
    for (std::int64_t t : {4, 8}) {
      CHECK(cell_value(m, s, 1, rv({1, 0}), t).value == cell_value(m, s, 1, rv({-1, 0}), t).value);
      CHECK(cell_value(m, s, 1, rv({1, 1}), t).value == cell_value(m, s, 1, rv({-1, -1}), t).value);
      CHECK(cell_value(m, s, 1, rv({2, 0}), t).value == cell_value(m, s, 1, rv({1, 0}), t).value);
      CHECK(cell_value(m, s, 1, rv({3, 3}), t).value == cell_value(m, s, 1, rv({1, 1}), t).value);
    }
  }
}

TEST_CASE("fig8 lattice has half the l1 norm along the axes") {
  const auto m = load_model(fixture("fig8.json"));
  const auto s = classify(m);
  const auto row = fhom_estimate(m, s, 1, rv({1, 0}), {8, 16, 32});
  CHECK(row.estimate == Rational(1, 2));
  CHECK(row.values.size() == 3);
  CHECK(row.values[0].free_sites > 0);
}

TEST_CASE("invalid cell requests are rejected") {
  const auto m = load_model(fixture("fig8.json"));
  const auto s = classify(m);
  CHECK_THROWS_AS(cell_value(m, s, 1, rv({0, 0}), 4), std::invalid_argument);
  CHECK_THROWS_AS(cell_value(m, s, 1, rv({1}), 4), std::invalid_argument);
  CHECK_THROWS_AS(cell_value(m, s, 2, rv({1, 0}), 4), std::invalid_argument);
  CHECK_THROWS_AS(cell_value(m, s, 1, rv({1, 0}), 0), std::invalid_argument);
  CHECK_THROWS_AS(fhom_estimate(m, s, 1, rv({1, 0}), {4}), std::invalid_argument);
  CHECK_THROWS_AS(fhom_estimate(m, s, 1, rv({1, 0}), {8, 4}), std::invalid_argument);
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (int h : hits) CHECK(h == 1);
}
