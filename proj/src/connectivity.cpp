#include "dpspin/connectivity.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <unordered_map>

namespace dpspin {

const char* to_string(ComponentClass c) {
  switch (c) {
    case ComponentClass::InfiniteUnique: return "infinite-unique";
    case ComponentClass::InfiniteMultiple: return "infinite-multiple";
    case ComponentClass::Finite: return "finite";
  }
  return "?";
}

double ConnectivitySummary::island_radius() const { return std::sqrt(static_cast<double>(island_radius_sq)); }

bool ConnectivitySummary::in_infinite_component(std::size_t residue) const {
  const int j = labels[residue];
  if (j <= 0) return false;
  const int c = infinite_component[static_cast<std::size_t>(j - 1)];
  return c >= 0 && component_of[residue] == c;
}

bool ConnectivitySummary::in_island(const Vec& site) const {
  const auto* comp = component_at(residues.index(site));
  return comp && comp->classification == ComponentClass::Finite;
}

const PeriodicComponent* ConnectivitySummary::component_at(std::size_t residue) const {
  const int j = labels[residue];
  if (j <= 0 || component_of[residue] < 0) return nullptr;
  return &phases[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(component_of[residue])];
}

std::vector<Vec> hermite_basis(std::vector<Vec> rows, int dimension) {
  rows.erase(std::remove_if(rows.begin(), rows.end(), [](const Vec& v) { return is_zero(v); }), rows.end());
  std::vector<Vec> basis;
  for (int col = 0; col < dimension && !rows.empty(); ++col) {
    // Euclid on column `col` until a single row keeps a nonzero entry there.
    while (true) {
      auto pivot = rows.end();
      for (auto it = rows.begin(); it != rows.end(); ++it)
        if ((*it)[col] != 0 && (pivot == rows.end() || std::llabs((*it)[col]) < std::llabs((*pivot)[col])))
          pivot = it;
      if (pivot == rows.end()) break;
      bool reduced = false;
      for (auto it = rows.begin(); it != rows.end(); ++it) {
        if (it == pivot || (*it)[col] == 0) continue;
        const std::int64_t q = (*it)[col] / (*pivot)[col];
        *it = *it - scaled(*pivot, q);
        reduced = true;
      }
      if (!reduced) {
        Vec p = *pivot;
        if (p[col] < 0) p = -p;
        basis.push_back(p);
        rows.erase(pivot);
        break;
      }
    }
    rows.erase(std::remove_if(rows.begin(), rows.end(), [](const Vec& v) { return is_zero(v); }), rows.end());
  }
  // Reduce entries above each pivot into [0, pivot).
  for (std::size_t i = 0; i < basis.size(); ++i) {
    int col = 0;
    while (basis[i][col] == 0) ++col;
    for (std::size_t k = 0; k < i; ++k) {
      const std::int64_t q = floor_div(basis[k][col], basis[i][col]);
      basis[k] = basis[k] - scaled(basis[i], q);
    }
  }
  return basis;
}

namespace {

std::int64_t squared_distance(const Vec& a, const Vec& b) {
  const Vec diff = a - b;
  return dot(diff, diff);
}

}  // namespace

ConnectivitySummary classify(const LatticeModel& model, const ClassifyOptions& options) {
  const auto& rs = model.residues();
  const int d = model.dimension();
  const int T = model.period();
  const int N = model.num_phases();

  ConnectivitySummary s;
  s.residues = rs;
  s.phases.resize(static_cast<std::size_t>(N));
  s.infinite_component.assign(static_cast<std::size_t>(N), -1);
  s.labels.resize(rs.size());
  s.component_of.assign(rs.size(), -1);
  s.potential.assign(rs.size(), Vec{});
  s.densities.assign(static_cast<std::size_t>(N), Rational(0));
  s.coarsening_side.assign(static_cast<std::size_t>(N), std::nullopt);
  for (std::size_t r = 0; r < rs.size(); ++r) s.labels[r] = model.label(r);

  for (std::size_t root = 0; root < rs.size(); ++root) {
    const int j = model.label(root);
    if (j < 1 || j > N || s.component_of[root] >= 0) continue;
    auto& comps = s.phases[static_cast<std::size_t>(j - 1)];
    const int cid = static_cast<int>(comps.size());
    PeriodicComponent comp;
    comp.phase = j;

    // Spanning-tree potentials; every edge then contributes its cycle displacement.
    std::vector<Vec> cycles;
    std::deque<std::size_t> queue{root};
    s.component_of[root] = cid;
    s.potential[root] = Vec{};
    std::vector<std::size_t> members;
    while (!queue.empty()) {
      const std::size_t r = queue.front();
      queue.pop_front();
      members.push_back(r);
      const Vec k = rs.coords(r);
      for (const auto& bond : model.strong_bonds(r)) {
        const Vec target = k + bond.offset;
        const std::size_t t = rs.index(target);
        if (model.label(t) != j) continue;
        const Vec step = rs.cell(target);
        if (s.component_of[t] < 0) {
          s.component_of[t] = cid;
          s.potential[t] = s.potential[r] + step;
          queue.push_back(t);
        } else {
          cycles.push_back(s.potential[r] + step - s.potential[t]);
        }
      }
    }
    std::sort(members.begin(), members.end());
    comp.residues = members;
    comp.displacement_basis = hermite_basis(cycles, d);
    if (comp.rank() == 0) {
      comp.classification = ComponentClass::Finite;
      std::int64_t diam = 0;
      for (std::size_t r : members) comp.lift.push_back(rs.coords(r) + scaled(s.potential[r], T));
      for (std::size_t a = 0; a < comp.lift.size(); ++a)
        for (std::size_t b = a + 1; b < comp.lift.size(); ++b)
          diam = std::max(diam, squared_distance(comp.lift[a], comp.lift[b]));
      comp.lift_diameter_sq = diam;
      s.island_radius_sq = std::max(s.island_radius_sq, diam);
    } else if (comp.rank() == d) {
      std::int64_t index = 1;
      for (std::size_t i = 0; i < comp.displacement_basis.size(); ++i) {
        int col = 0;
        while (comp.displacement_basis[i][col] == 0) ++col;
        index *= comp.displacement_basis[i][col];
      }
      comp.displacement_index = index;
      comp.classification = index == 1 ? ComponentClass::InfiniteUnique : ComponentClass::InfiniteMultiple;
    } else {
      comp.classification = ComponentClass::InfiniteMultiple;
    }
    comps.push_back(std::move(comp));
  }

  for (int j = 1; j <= N; ++j) {
    const auto& comps = s.phases[static_cast<std::size_t>(j - 1)];
    if (comps.empty()) continue;  // reported as empty-phase by the local rules
    std::vector<int> infinite;
    for (std::size_t c = 0; c < comps.size(); ++c)
      if (comps[c].classification != ComponentClass::Finite) infinite.push_back(static_cast<int>(c));
    const std::string phase = "phase " + std::to_string(j);
    if (infinite.empty()) {
      s.violations.push_back({"unique-infinite-component", phase, "no infinite strongly connected component"});
    } else if (infinite.size() > 1) {
      s.violations.push_back({"unique-infinite-component", phase,
                              std::to_string(infinite.size()) + " quotient components lift to infinite components"});
    } else if (comps[static_cast<std::size_t>(infinite[0])].classification == ComponentClass::InfiniteMultiple) {
      const auto& c = comps[static_cast<std::size_t>(infinite[0])];
      s.violations.push_back(
          {"unique-infinite-component", phase + " residue " + rs.key(c.residues.front()),
           c.rank() < d ? "displacement group has rank " + std::to_string(c.rank()) + " < " + std::to_string(d)
                        : "displacement group has index " + std::to_string(c.displacement_index)});
    } else {
      const int cj = infinite[0];
      s.infinite_component[static_cast<std::size_t>(j - 1)] = cj;
      s.densities[static_cast<std::size_t>(j - 1)] =
          Rational(static_cast<long long>(comps[static_cast<std::size_t>(cj)].residues.size()),
                   static_cast<long long>(rs.size()));
    }
  }

  if (options.compute_coarsening) {
    for (int j = 1; j <= N; ++j) {
      if (s.infinite_component[static_cast<std::size_t>(j - 1)] < 0) continue;
      try {
        s.coarsening_side[static_cast<std::size_t>(j - 1)] =
            coarsening_side(model, s, j, options.coarsening_cap_multiple);
      } catch (const CoarseningCapExceeded&) {
      }
    }
  }
  return s;
}

bool cube_connectivity_holds(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                             std::int64_t side) {
  const int d = model.dimension();
  const auto& rs = model.residues();
  for (std::size_t anchor_index = 0; anchor_index < rs.size(); ++anchor_index) {
    const Vec anchor = rs.coords(anchor_index);
    const SiteBox inner = SiteBox::cube(d, anchor, side);
    Vec outer_lo = anchor;
    for (int i = 0; i < d; ++i) outer_lo[i] -= side;
    const SiteBox outer = SiteBox::cube(d, outer_lo, 3 * side);

    auto in_cj = [&](const Vec& k) {
      const std::size_t r = rs.index(k);
      return model.label(r) == phase && summary.in_infinite_component(r);
    };
    std::optional<Vec> start;
    for (std::size_t i = 0; i < inner.size() && !start; ++i)
      if (in_cj(inner.site(i))) start = inner.site(i);
    if (!start) continue;

    std::vector<char> seen(outer.size(), 0);
    std::deque<Vec> queue{*start};
    seen[outer.index(*start)] = 1;
    while (!queue.empty()) {
      const Vec k = queue.front();
      queue.pop_front();
      for (const auto& bond : model.strong_bonds(rs.index(k))) {
        const Vec t = k + bond.offset;
        if (!outer.contains(t)) continue;
        const std::size_t idx = outer.index(t);
        if (seen[idx]) continue;
        seen[idx] = 1;
        queue.push_back(t);
      }
    }
    for (std::size_t i = 0; i < inner.size(); ++i) {
      const Vec k = inner.site(i);
      if (in_cj(k) && !seen[outer.index(k)]) return false;
    }
  }
  return true;
}

std::int64_t coarsening_side(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                             int cap_multiple) {
  if (summary.infinite_component.at(static_cast<std::size_t>(phase - 1)) < 0)
    throw std::invalid_argument("phase " + std::to_string(phase) + " has no infinite component");
  const int T = model.period();
  for (int m = 1; m <= cap_multiple; ++m)
    if (cube_connectivity_holds(model, summary, phase, static_cast<std::int64_t>(m) * T))
      return static_cast<std::int64_t>(m) * T;
  throw CoarseningCapExceeded("coarsening side for phase " + std::to_string(phase) + " exceeds " +
                              std::to_string(cap_multiple) + "T");
}

namespace {

// R <= a with R = sqrt(r2), exact.
bool radius_le(std::int64_t r2, std::int64_t a) { return a >= 0 && r2 <= a * a; }
// R < b with R = sqrt(r2), exact.
bool radius_lt(std::int64_t r2, std::int64_t b) { return b > 0 && r2 < b * b; }

/// x in Q_{M-R} = [-(M-R)/2, (M-R)/2)^d.
bool in_shrunken_cube(const Vec& x, int d, std::int64_t side, std::int64_t r2) {
  for (int i = 0; i < d; ++i)
    if (!radius_le(r2, side + 2 * x[i]) || !radius_lt(r2, side - 2 * x[i])) return false;
  return true;
}

}  // namespace

std::vector<Vec> excluded_set(const LatticeModel& model, const ConnectivitySummary& summary, std::int64_t side) {
  const int d = model.dimension();
  const int T = model.period();
  const auto& rs = model.residues();
  const SiteBox cube = SiteBox::centered_cube(d, side);
  const std::int64_t r2 = summary.island_radius_sq;

  // Lifts are keyed by (phase, component, period shift).
  std::map<std::tuple<int, int, Vec>, bool> lift_excluded;
  std::vector<Vec> result;
  for (std::size_t i = 0; i < cube.size(); ++i) {
    const Vec x = cube.site(i);
    const std::size_t r = rs.index(x);
    const auto* comp = summary.component_at(r);
    if (!comp || comp->classification != ComponentClass::Finite) continue;
    const Vec shift = rs.cell(x) - summary.potential[r];
    const auto key = std::make_tuple(comp->phase, summary.component_of[r], shift);
    auto it = lift_excluded.find(key);
    if (it == lift_excluded.end()) {
      bool meets_inner = false;
      for (const Vec& site : comp->lift)
        if (in_shrunken_cube(site + scaled(shift, T), d, side, r2)) {
          meets_inner = true;
          break;
        }
      it = lift_excluded.emplace(key, !meets_inner).first;
    }
    if (it->second) result.push_back(x);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::optional<Rational> coercivity_floor(const LatticeModel& model, const ConnectivitySummary& summary) {
  std::optional<Rational> floor;
  for (std::size_t r = 0; r < model.num_residues(); ++r) {
    if (!summary.in_infinite_component(r)) continue;
    for (const auto& b : model.strong_bonds(r))
      if (!floor || b.weight < *floor) floor = b.weight;
  }
  return floor;
}

}  // namespace dpspin
