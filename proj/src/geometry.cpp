#include "dpspin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace dpspin {

Rational DomainSpec::volume() const {
  Rational v = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

void DomainSpec::check() const {
  if (lo.empty() || lo.size() != hi.size()) throw std::invalid_argument("domain bounds must have equal nonzero length");
  if (lo.size() > static_cast<std::size_t>(kMaxDimension)) throw std::invalid_argument("domain dimension too large");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("domain has empty interior along axis " + std::to_string(i));
}

Spin target_value(const PhaseTarget& target, const RationalVector& x) {
  if (const auto* slab = std::get_if<Slab>(&target)) {
    Rational s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += slab->normal[i] * x[i];
    return s > slab->offset ? Spin::Plus : Spin::Minus;
  }
  for (const auto& box : std::get<BoxUnion>(target)) {
    bool inside = true;
    for (std::size_t i = 0; i < x.size() && inside; ++i) inside = box.lo[i] <= x[i] && x[i] < box.hi[i];
    if (inside) return Spin::Plus;
  }
  return Spin::Minus;
}

std::vector<std::int64_t> primitive_direction(const RationalVector& v) {
  BigInt scale = 1;
  for (const auto& c : v) scale = lcm(scale, boost::multiprecision::denominator(c));
  std::vector<BigInt> ints;
  BigInt g = 0;
  for (const auto& c : v) {
    ints.push_back(boost::multiprecision::numerator(c) * (scale / boost::multiprecision::denominator(c)));
    g = boost::multiprecision::gcd(g, BigInt(abs(ints.back())));
  }
  if (g == 0) throw std::invalid_argument("zero direction");
  std::vector<std::int64_t> out;
  for (const auto& c : ints) out.push_back(BigInt(c / g).convert_to<std::int64_t>());
  return out;
}

namespace {

/// Axis of a coordinate-aligned slab normal, or -1.
int slab_axis(const Slab& s) {
  int axis = -1;
  for (std::size_t i = 0; i < s.normal.size(); ++i)
    if (s.normal[i] != 0) {
      if (axis >= 0) return -1;
      axis = static_cast<int>(i);
    }
  return axis;
}

bool is_general(const PhaseTarget& t) {
  const auto* slab = std::get_if<Slab>(&t);
  return slab && slab_axis(*slab) < 0;
}

void check_target(const MultiphaseTarget& target) {
  target.domain.check();
  const std::size_t d = target.domain.lo.size();
  for (const auto& phase : target.phases) {
    if (const auto* slab = std::get_if<Slab>(&phase)) {
      if (slab->normal.size() != d) throw std::invalid_argument("slab normal has the wrong dimension");
      if (std::all_of(slab->normal.begin(), slab->normal.end(), [](const Rational& c) { return c == 0; }))
        throw std::invalid_argument("slab normal must be nonzero");
      if (slab_axis(*slab) < 0 && d > 2)
        throw std::invalid_argument("oblique slabs are supported in dimension at most 2");
    } else {
      for (const auto& box : std::get<BoxUnion>(phase))
        if (box.lo.size() != d || box.hi.size() != d) throw std::invalid_argument("box has the wrong dimension");
    }
  }
}

/// Rectangular grid refining the domain along every axis-aligned breakpoint.
struct Grid {
  std::vector<std::vector<Rational>> cuts;  // per axis, sorted, including the domain bounds
  std::vector<std::size_t> stride;
  std::size_t cells = 1;

  std::size_t extent(std::size_t axis) const { return cuts[axis].size() - 1; }

  std::vector<std::size_t> multi_index(std::size_t linear) const {
    std::vector<std::size_t> t(cuts.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) t[i] = (linear / stride[i]) % extent(i);
    return t;
  }
};

Grid make_grid(const MultiphaseTarget& target) {
  const auto& dom = target.domain;
  const std::size_t d = dom.lo.size();
  Grid g;
  g.cuts.resize(d);
  auto add = [&](std::size_t axis, const Rational& c) {
    if (dom.lo[axis] < c && c < dom.hi[axis]) g.cuts[axis].push_back(c);
  };
  for (std::size_t i = 0; i < d; ++i) {
    g.cuts[i].push_back(dom.lo[i]);
    g.cuts[i].push_back(dom.hi[i]);
  }
  for (const auto& phase : target.phases) {
    if (const auto* slab = std::get_if<Slab>(&phase)) {
      const int axis = slab_axis(*slab);
      if (axis >= 0) add(static_cast<std::size_t>(axis), slab->offset / slab->normal[static_cast<std::size_t>(axis)]);
    } else {
      for (const auto& box : std::get<BoxUnion>(phase))
        for (std::size_t i = 0; i < d; ++i) {
          add(i, box.lo[i]);
          add(i, box.hi[i]);
        }
    }
  }
  for (auto& c : g.cuts) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  g.stride.assign(d, 1);
  for (std::size_t i = d; i-- > 0;) {
    g.stride[i] = g.cells;
    g.cells *= g.extent(i);
  }
  return g;
}

using Point = std::array<double, 2>;

std::vector<Point> clip(const std::vector<Point>& poly, double nx, double ny, double c, bool keep_above) {
  // Keeps <p, n> >= c (keep_above) or <p, n> <= c.
  auto side = [&](const Point& p) {
    const double s = nx * p[0] + ny * p[1] - c;
    return keep_above ? s : -s;
  };
  std::vector<Point> out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    const double sa = side(a), sb = side(b);
    if (sa >= 0) out.push_back(a);
    if ((sa >= 0) != (sb >= 0)) {
      const double t = sa / (sa - sb);
      out.push_back({a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])});
    }
  }
  return out;
}

double area(const std::vector<Point>& poly) {
  double s = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& a = poly[i];
    const Point& b = poly[(i + 1) % poly.size()];
    s += a[0] * b[1] - a[1] * b[0];
  }
  return std::abs(s) / 2;
}

/// Length of the line <x, n> = c inside the rectangle [x0, x1] x [y0, y1].
double chord(double nx, double ny, double c, double x0, double x1, double y0, double y1) {
  // Parametrize p(t) = p0 + t u with u the unit direction of the line.
  const double norm = std::hypot(nx, ny);
  const double ux = -ny / norm, uy = nx / norm;
  const double px = nx * c / (norm * norm), py = ny * c / (norm * norm);
  double tmin = -1e300, tmax = 1e300;
  auto bound = [&](double p, double u, double lo, double hi) {
    if (u == 0) {
      if (p <= lo || p >= hi) tmax = tmin - 1;
      return;
    }
    double a = (lo - p) / u, b = (hi - p) / u;
    if (a > b) std::swap(a, b);
    tmin = std::max(tmin, a);
    tmax = std::min(tmax, b);
  };
  bound(px, ux, x0, x1);
  bound(py, uy, y0, y1);
  return tmax > tmin ? tmax - tmin : 0.0;
}

RationalVector unit_axis(std::size_t d, std::size_t axis, int sign) {
  RationalVector v(d, Rational(0));
  v[axis] = sign;
  return v;
}

}  // namespace

std::vector<InterfacePiece> interface_pieces(const MultiphaseTarget& target) {
  check_target(target);
  const auto& dom = target.domain;
  const std::size_t d = dom.lo.size();
  const Grid grid = make_grid(target);

  std::map<std::pair<int, std::vector<std::int64_t>>, InterfacePiece> merged;
  auto record = [&](int phase, const RationalVector& normal, double measure) {
    if (measure <= 0) return;
    auto key = std::make_pair(phase, primitive_direction(normal));
    auto it = merged.find(key);
    if (it == merged.end()) it = merged.emplace(key, InterfacePiece{phase, normal, 0.0}).first;
    it->second.measure += measure;
  };

  // Membership of each grid cell for every phase, sampled at the cell centre.
  std::vector<std::vector<Spin>> member(target.phases.size());
  for (std::size_t p = 0; p < target.phases.size(); ++p) {
    if (is_general(target.phases[p])) continue;
    member[p].resize(grid.cells);
    for (std::size_t c = 0; c < grid.cells; ++c) {
      const auto t = grid.multi_index(c);
      RationalVector centre(d);
      for (std::size_t i = 0; i < d; ++i) centre[i] = (grid.cuts[i][t[i]] + grid.cuts[i][t[i] + 1]) / 2;
      member[p][c] = target_value(target.phases[p], centre);
    }
  }

  for (std::size_t p = 0; p < target.phases.size(); ++p) {
    const int phase = static_cast<int>(p) + 1;
    if (is_general(target.phases[p])) {
      const auto& s = std::get<Slab>(target.phases[p]);
      record(phase, s.normal,
             chord(to_double(s.normal[0]), to_double(s.normal[1]), to_double(s.offset), to_double(dom.lo[0]),
                   to_double(dom.hi[0]), to_double(dom.lo[1]), to_double(dom.hi[1])));
      continue;
    }
    for (std::size_t c = 0; c < grid.cells; ++c) {
      const auto t = grid.multi_index(c);
      for (std::size_t axis = 0; axis < d; ++axis) {
        if (t[axis] + 1 >= grid.extent(axis)) continue;
        const std::size_t right = c + grid.stride[axis];
        if (member[p][c] == member[p][right]) continue;
        double face = 1;
        for (std::size_t i = 0; i < d; ++i)
          if (i != axis) face *= to_double(grid.cuts[i][t[i] + 1] - grid.cuts[i][t[i]]);
        record(phase, unit_axis(d, axis, member[p][right] == Spin::Plus ? 1 : -1), face);
      }
    }
  }
  std::vector<InterfacePiece> out;
  for (auto& [key, piece] : merged) out.push_back(piece);
  return out;
}

std::vector<ConstancyCell> constancy_cells(const MultiphaseTarget& target) {
  check_target(target);
  const std::size_t d = target.domain.lo.size();
  const Grid grid = make_grid(target);
  std::vector<std::size_t> general;
  for (std::size_t p = 0; p < target.phases.size(); ++p)
    if (is_general(target.phases[p])) general.push_back(p);

  std::map<SpinVector, double> volumes;
  for (std::size_t c = 0; c < grid.cells; ++c) {
    const auto t = grid.multi_index(c);
    RationalVector centre(d);
    double box_volume = 1;
    for (std::size_t i = 0; i < d; ++i) {
      centre[i] = (grid.cuts[i][t[i]] + grid.cuts[i][t[i] + 1]) / 2;
      box_volume *= to_double(grid.cuts[i][t[i] + 1] - grid.cuts[i][t[i]]);
    }
    SpinVector z(target.phases.size(), Spin::Plus);
    for (std::size_t p = 0; p < target.phases.size(); ++p)
      if (!is_general(target.phases[p])) z[p] = target_value(target.phases[p], centre);
    if (general.empty()) {
      volumes[z] += box_volume;
      continue;
    }
    const double x0 = to_double(grid.cuts[0][t[0]]), x1 = to_double(grid.cuts[0][t[0] + 1]);
    const double y0 = to_double(grid.cuts[1][t[1]]), y1 = to_double(grid.cuts[1][t[1] + 1]);
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << general.size()); ++pattern) {
      std::vector<Point> poly{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
      for (std::size_t g = 0; g < general.size() && !poly.empty(); ++g) {
        const auto& s = std::get<Slab>(target.phases[general[g]]);
        const bool plus = !((pattern >> g) & 1);
        poly = clip(poly, to_double(s.normal[0]), to_double(s.normal[1]), to_double(s.offset), plus);
        z[general[g]] = plus ? Spin::Plus : Spin::Minus;
      }
      if (poly.size() < 3) continue;
      const double a = area(poly);
      if (a > 0) volumes[z] += a;
    }
  }
  std::vector<ConstancyCell> out;
  for (const auto& [z, v] : volumes)
    if (v > 0) out.push_back({z, v});
  return out;
}

}  // namespace dpspin
