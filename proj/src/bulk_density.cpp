#include "dpspin/bulk_density.hpp"

#include "dpspin/surface_tension.hpp"

#include <boost/pending/disjoint_sets.hpp>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dpspin {

SpinVector parse_spin_vector(const std::string& text) {
  SpinVector z;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad spin '" + item + "'");
    }
    if (used != item.size()) throw std::invalid_argument("bad spin '" + item + "'");
    z.push_back(spin_from_int(v));
  }
  if (z.empty()) throw std::invalid_argument("empty spin vector");
  return z;
}

std::string format_spin_vector(const SpinVector& z) {
  std::string s;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (i) s += ',';
    s += z[i] == Spin::Plus ? "1" : "-1";
  }
  return s;
}

std::vector<SpinVector> all_spin_vectors(int n) {
  std::vector<SpinVector> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    SpinVector z(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] = (code >> (n - 1 - j)) & 1 ? Spin::Minus : Spin::Plus;
    out.push_back(z);
  }
  return out;
}

GroundStateInstance bulk_instance(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z,
                                  std::int64_t side, bool constrained) {
  const int d = model.dimension();
  if (side < 1) throw std::invalid_argument("cube side must be positive");
  if (static_cast<int>(z.size()) != model.num_phases())
    throw std::invalid_argument("spin vector has " + std::to_string(z.size()) + " entries, expected " +
                                std::to_string(model.num_phases()));
  for (int j = 0; j < model.num_phases(); ++j)
    if (summary.infinite_component.at(static_cast<std::size_t>(j)) < 0)
      throw std::invalid_argument("phase " + std::to_string(j + 1) + " has no unique infinite component");

  const auto& rs = model.residues();
  const SiteBox cube = SiteBox::centered_cube(d, side);
  const std::size_t n = cube.size();
  GroundStateInstance inst(n);

  std::vector<std::size_t> rank(n), parent(n);
  boost::disjoint_sets<std::size_t*, std::size_t*> sets(rank.data(), parent.data());
  for (std::size_t i = 0; i < n; ++i) sets.make_set(i);

  for (std::size_t i = 0; i < n; ++i) {
    const Vec k = cube.site(i);
    const std::size_t r = rs.index(k);
    const auto& g = model.forcing(r);
    inst.add_unary(i, g.plus, g.minus);
    for (const auto& b : model.weak_bonds(r)) {
      const Vec t = k + b.offset;
      if (cube.contains(t)) inst.add_pair(i, cube.index(t), b.weight);
    }
    const int label = model.label(r);
    if (label == 0) continue;
    if (summary.in_infinite_component(r)) inst.fix(i, z[static_cast<std::size_t>(label - 1)]);
    for (const auto& b : model.strong_bonds(r)) {
      const Vec t = k + b.offset;
      if (cube.contains(t)) sets.union_set(i, cube.index(t));
    }
  }
  for (std::size_t i = 0; i < n; ++i) inst.set_group(i, sets.find_set(i));
  if (constrained)
    for (const Vec& k : excluded_set(model, summary, side)) inst.fix(cube.index(k), Spin::Plus);
  return inst;
}

namespace {

PhiValue solve_bulk(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z,
                    std::int64_t side, bool constrained, const SolveOptions& options) {
  const Solution sol = minimize(bulk_instance(model, summary, z, side, constrained), options);
  PhiValue pv;
  pv.side = side;
  pv.minimum = sol.energy;
  Rational volume = 1;
  for (int i = 0; i < model.dimension(); ++i) volume *= side;
  pv.value = sol.energy / volume;
  pv.configuration = sol.assignment;
  pv.free_groups = sol.free_groups;
  pv.method = sol.method;
  pv.exact = sol.exact;
  return pv;
}

IslandConstant make_constant(const LatticeModel& model, const ConnectivitySummary& summary, const Rational& a) {
  IslandConstant c;
  const auto p0 = static_cast<std::int64_t>(model.max_weak_neighbourhood());
  c.factor = Rational(std::int64_t{1} << model.dimension()) * (Rational(p0) * a + 2 * model.max_abs_forcing());
  c.radius_sq = summary.island_radius_sq;
  return c;
}

}  // namespace

PhiValue phi_M(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z, std::int64_t side,
               const SolveOptions& options) {
  return solve_bulk(model, summary, z, side, false, options);
}

PhiValue phi_tilde_M(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z,
                     std::int64_t side, const SolveOptions& options) {
  return solve_bulk(model, summary, z, side, true, options);
}

double IslandConstant::value() const { return to_double(factor) * std::sqrt(static_cast<double>(radius_sq)); }

IslandConstant island_constant(const LatticeModel& model, const ConnectivitySummary& summary) {
  std::optional<Rational> max_a;
  for (std::size_t r = 0; r < model.num_residues(); ++r)
    for (const auto& b : model.weak_bonds(r))
      if (!max_a || b.weight > *max_a) max_a = b.weight;
  return make_constant(model, summary, max_a.value_or(Rational(0)));
}

IslandConstant island_constant_strict(const LatticeModel& model, const ConnectivitySummary& summary) {
  return make_constant(model, summary, 8 * model.max_abs_weak_weight());
}

bool within_island_bound(const Rational& difference, const IslandConstant& c, std::int64_t side) {
  // difference <= factor sqrt(R^2) / M  <=>  M difference <= factor R
  const Rational lhs = difference * side;
  if (c.factor >= 0) return lhs <= 0 || lhs * lhs <= c.factor * c.factor * c.radius_sq;
  return lhs <= 0 && lhs * lhs >= c.factor * c.factor * c.radius_sq;
}

TilingConstants tiling_constants(const LatticeModel& model) {
  const Rational base = Rational(8 * model.dimension() * model.weak_range()) *
                        Rational(static_cast<std::int64_t>(model.max_weak_neighbourhood()));
  return {base * model.max_weak_positive(), base * model.max_weak_negative()};
}

PhiRow phi_estimate(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z,
                    const std::vector<std::int64_t>& sides, const SolveOptions& options, unsigned jobs) {
  if (sides.empty()) throw std::invalid_argument("empty list of cube sides");
  for (std::size_t i = 1; i < sides.size(); ++i)
    if (sides[i] <= sides[i - 1]) throw std::invalid_argument("cube sides must be increasing");

  PhiRow row;
  row.z = z;
  row.constant = island_constant(model, summary);
  row.constant_strict = island_constant_strict(model, summary);
  row.tiling = tiling_constants(model);
  row.entries.resize(sides.size());
  parallel_for(2 * sides.size(), jobs, [&](std::size_t t) {
    auto& e = row.entries[t / 2];
    e.side = sides[t / 2];
    if (t % 2 == 0)
      e.phi = phi_M(model, summary, z, e.side, options);
    else
      e.phi_tilde = phi_tilde_M(model, summary, z, e.side, options);
  });
  for (auto& e : row.entries) {
    e.tilde_above = e.phi_tilde.value >= e.phi.value;
    const Rational gap = e.phi_tilde.value - e.phi.value;
    e.island_bound = within_island_bound(gap, row.constant, e.side);
    e.island_bound_strict = within_island_bound(gap, row.constant_strict, e.side);
  }
  for (std::size_t i = 0; i < sides.size(); ++i)
    for (std::size_t k = i + 1; k < sides.size(); ++k)
      if (sides[k] % sides[i] == 0) {
        MonotonicityCheck m;
        m.side = sides[i];
        m.multiple = sides[k];
        m.smaller = row.entries[i].phi.value;
        m.larger = row.entries[k].phi.value;
        m.holds = m.larger >= m.smaller;
        row.monotonicity.push_back(m);
      }
  const auto& last = row.entries.back();
  row.lower = last.phi.value - row.tiling.minus / last.side;
  row.upper = last.phi_tilde.value + row.tiling.plus / last.side;
  row.estimate = last.phi.value;
  row.bracket_valid = last.side % model.period() == 0;
  return row;
}

}  // namespace dpspin
