#include "dpspin/gamma_limit.hpp"

#include <cmath>
#include <mutex>

namespace dpspin {

namespace {

std::int64_t floor_rational(const Rational& r) {
  const BigInt n = boost::multiprecision::numerator(r);
  const BigInt d = boost::multiprecision::denominator(r);
  BigInt q = n / d;
  if (n % d != 0 && n < 0) q -= 1;
  return q.convert_to<std::int64_t>();
}

std::int64_t ceil_rational(const Rational& r) { return -floor_rational(-r); }

Rational power(const Rational& base, int exponent) {
  Rational p = 1;
  for (int i = 0; i < exponent; ++i) p *= base;
  return p;
}

bool in_cj(const LatticeModel& model, const ConnectivitySummary& summary, const Vec& k, int phase) {
  const std::size_t r = model.residues().index(k);
  return model.label(r) == phase && summary.in_infinite_component(r);
}

RationalVector scaled_point(const Vec& k, const Rational& eps, int d) {
  RationalVector x(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = eps * k[i];
  return x;
}

}  // namespace

SiteBox scaled_sites(const DomainSpec& domain, const Rational& eps) {
  domain.check();
  if (eps <= 0) throw std::invalid_argument("eps must be positive");
  const int d = domain.dimension();
  Vec lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = floor_rational(domain.lo[static_cast<std::size_t>(i)] / eps) + 1;
    hi[i] = ceil_rational(domain.hi[static_cast<std::size_t>(i)] / eps) - 1;
  }
  return SiteBox(d, lo, hi);
}

SpinField constant_field(const DomainSpec& domain, const Rational& eps, Spin value) {
  SpinField f;
  f.eps = eps;
  f.domain = domain;
  f.sites = scaled_sites(domain, eps);
  f.values.assign(f.sites.size(), value);
  return f;
}

void check_field(const SpinField& field, int dimension) {
  if (field.domain.dimension() != dimension)
    throw std::invalid_argument("field dimension " + std::to_string(field.domain.dimension()) +
                                " does not match the model dimension " + std::to_string(dimension));
  const SiteBox expected = scaled_sites(field.domain, field.eps);
  if (expected.lo() != field.sites.lo() || expected.hi() != field.sites.hi())
    throw std::invalid_argument("field sites do not match the scaled domain");
  if (field.values.size() != expected.size())
    throw std::invalid_argument("field has " + std::to_string(field.values.size()) + " values, expected " +
                                std::to_string(expected.size()));
}

Rational F_eps(const LatticeModel& model, const SpinField& field) {
  const int d = model.dimension();
  check_field(field, d);
  const auto& rs = model.residues();
  const auto& box = field.sites;
  Rational strong = 0, weak = 0, bulk = 0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Vec k = box.site(i);
    const std::size_t r = rs.index(k);
    const Spin s = field.values[i];
    for (const auto& b : model.strong_bonds(r)) {
      const Vec t = k + b.offset;
      if (box.contains(t) && field.at(t) != s) strong += 4 * b.weight;
    }
    for (const auto& b : model.weak_bonds(r)) {
      const Vec t = k + b.offset;
      if (box.contains(t) && field.at(t) != s) weak += 4 * b.weight;
    }
    bulk += model.forcing(r).at(s);
  }
  return power(field.eps, d - 1) * strong + power(field.eps, d) * (weak + bulk);
}

std::size_t broken_strong_bonds(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                                const SpinField& field) {
  check_field(field, model.dimension());
  const auto& box = field.sites;
  std::size_t count = 0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Vec k = box.site(i);
    if (!in_cj(model, summary, k, phase)) continue;
    for (const auto& b : model.strong_bonds(model.residues().index(k))) {
      const Vec t = k + b.offset;
      if (k < t && box.contains(t) && field.at(t) != field.values[i]) ++count;
    }
  }
  return count;
}

ExtensionResult extend(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                       const SpinField& field, std::int64_t side) {
  const int d = model.dimension();
  check_field(field, d);
  if (phase < 1 || phase > model.num_phases()) throw ExtensionError("phase out of range");
  if (side <= 0 || side % model.period() != 0)
    throw ExtensionError("cube side " + std::to_string(side) + " is not a positive multiple of the period " +
                         std::to_string(model.period()));
  const auto& known = summary.coarsening_side.at(static_cast<std::size_t>(phase - 1));
  const std::int64_t m0 = known ? *known : coarsening_side(model, summary, phase);
  if (side < m0)
    throw ExtensionError("cube side " + std::to_string(side) + " is below the coarsening side " +
                         std::to_string(m0));

  ExtensionResult out;
  out.field = field;
  out.side = side;
  const auto& box = field.sites;
  if (box.empty()) return out;
  Vec zlo{}, zhi{};
  for (int i = 0; i < d; ++i) {
    zlo[i] = -floor_div(-(box.lo()[i] + side), side);
    zhi[i] = floor_div(box.hi()[i] - 2 * side + 1, side);
    if (zhi[i] < zlo[i]) return out;
  }
  for_each_in_box(d, zlo, zhi, [&](const Vec& z) {
    ++out.family;
    const SiteBox cube = SiteBox::cube(d, scaled(z, side), side);
    std::optional<Spin> common;
    bool constant = true;
    for (std::size_t i = 0; i < cube.size() && constant; ++i) {
      const Vec k = cube.site(i);
      if (!in_cj(model, summary, k, phase)) continue;
      const Spin s = field.at(k);
      if (!common)
        common = s;
      else if (*common != s)
        constant = false;
    }
    if (!constant) {
      ++out.marked;
      return;
    }
    if (!common) return;
    for (std::size_t i = 0; i < cube.size(); ++i) out.field.values[box.index(cube.site(i))] = *common;
  });
  return out;
}

void SurfaceTable::set(int phase, const RationalVector& normal, double value) {
  values_[{phase, primitive_direction(normal)}] = value;
}

std::optional<double> SurfaceTable::lookup(int phase, const RationalVector& normal) const {
  auto dir = primitive_direction(normal);
  if (auto it = values_.find({phase, dir}); it != values_.end()) return it->second;
  for (auto& c : dir) c = -c;
  if (auto it = values_.find({phase, dir}); it != values_.end()) return it->second;
  return std::nullopt;
}

std::optional<double> PhiTable::lookup(const SpinVector& z) const {
  if (auto it = values_.find(z); it != values_.end()) return it->second;
  return std::nullopt;
}

FhomValue F_hom(const MultiphaseTarget& target, const SurfaceTable& surface, const PhiTable& phi) {
  FhomValue v;
  for (const auto& piece : interface_pieces(target)) {
    const auto f = surface.lookup(piece.phase, piece.normal);
    if (!f)
      throw MissingTableEntry("surface table has no entry for phase " + std::to_string(piece.phase) +
                              " and normal " + format_rational_vector(piece.normal));
    v.surface += *f * piece.measure;
  }
  for (const auto& cell : constancy_cells(target)) {
    const auto p = phi.lookup(cell.z);
    if (!p) throw MissingTableEntry("phi table has no entry for z = " + format_spin_vector(cell.z));
    v.bulk += *p * cell.volume;
  }
  return v;
}

std::vector<SpinVector> required_spin_vectors(const MultiphaseTarget& target) {
  std::vector<SpinVector> out;
  for (const auto& cell : constancy_cells(target)) out.push_back(cell.z);
  return out;
}

std::vector<std::pair<int, RationalVector>> required_normals(const MultiphaseTarget& target) {
  std::vector<std::pair<int, RationalVector>> out;
  for (const auto& piece : interface_pieces(target)) out.emplace_back(piece.phase, piece.normal);
  return out;
}

std::pair<SurfaceTable, PhiTable> compute_tables(const LatticeModel& model, const ConnectivitySummary& summary,
                                                 const MultiphaseTarget& target, const TableOptions& options) {
  SurfaceTable surface;
  PhiTable phi;
  for (const auto& [phase, normal] : required_normals(target)) {
    const auto row = fhom_estimate(model, summary, phase, normal, options.cell_sides, options.jobs);
    surface.set(phase, normal, to_double(row.estimate));
  }
  for (const auto& z : required_spin_vectors(target)) {
    const auto row = phi_estimate(model, summary, z, options.cube_sides, options.solve, options.jobs);
    phi.set(z, to_double(row.estimate));
  }
  return {surface, phi};
}

SpinField recovery_config(const LatticeModel& model, const ConnectivitySummary& summary,
                          const MultiphaseTarget& target, const Rational& eps, std::int64_t side,
                          const SolveOptions& options) {
  const int d = model.dimension();
  if (target.domain.dimension() != d) throw std::invalid_argument("target dimension does not match the model");
  if (static_cast<int>(target.phases.size()) != model.num_phases())
    throw std::invalid_argument("target has " + std::to_string(target.phases.size()) + " phases, expected " +
                                std::to_string(model.num_phases()));
  if (side <= 0 || side % model.period() != 0)
    throw std::invalid_argument("cube side must be a positive multiple of the period");

  SpinField field = constant_field(target.domain, eps, Spin::Plus);
  const auto& box = field.sites;
  const auto& rs = model.residues();

  // Target spin on the infinite components, 0 elsewhere.
  std::vector<int> phase_of(box.size(), 0);
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Vec k = box.site(i);
    const std::size_t r = rs.index(k);
    const int label = model.label(r);
    if (label == 0 || !summary.in_infinite_component(r)) continue;
    phase_of[i] = label;
    field.values[i] = target_value(target.phases[static_cast<std::size_t>(label - 1)], scaled_point(k, eps, d));
  }
  if (box.empty()) return field;

  const SiteBox unit = SiteBox::centered_cube(d, side);
  const SiteBox halo = SiteBox::centered_cube(d, 3 * side);
  std::map<SpinVector, std::vector<Spin>> minimizers;
  Vec zlo{}, zhi{};
  for (int i = 0; i < d; ++i) {
    zlo[i] = floor_div(box.lo()[i], side) - 1;
    zhi[i] = floor_div(box.hi()[i], side) + 1;
  }
  for_each_in_box(d, zlo, zhi, [&](const Vec& z) {
    const Vec shift = scaled(z, side);
    const SiteBox cube = unit.translated(shift);
    if (!box.covers(cube)) return;
    const SiteBox around = halo.translated(shift);
    std::vector<std::optional<Spin>> seen(target.phases.size());
    Vec lo{}, hi{};
    for (int i = 0; i < d; ++i) {
      lo[i] = std::max(around.lo()[i], box.lo()[i]);
      hi[i] = std::min(around.hi()[i], box.hi()[i]);
    }
    bool constant = true;
    for_each_in_box(d, lo, hi, [&](const Vec& k) {
      const std::size_t i = box.index(k);
      if (!constant || phase_of[i] == 0) return;
      auto& s = seen[static_cast<std::size_t>(phase_of[i] - 1)];
      if (!s)
        s = field.values[i];
      else if (*s != field.values[i])
        constant = false;
    });
    if (!constant) return;
    SpinVector zvec;
    for (const auto& s : seen) {
      if (!s) return;
      zvec.push_back(*s);
    }
    auto it = minimizers.find(zvec);
    if (it == minimizers.end())
      it = minimizers.emplace(zvec, phi_tilde_M(model, summary, zvec, side, options).configuration).first;
    for (std::size_t i = 0; i < unit.size(); ++i) field.values[box.index(unit.site(i) + shift)] = it->second[i];
  });
  return field;
}

ConvergenceReport converge_report(const LatticeModel& model, const ConnectivitySummary& summary,
                                  const MultiphaseTarget& target, const std::vector<Rational>& eps_list,
                                  std::int64_t side, const SurfaceTable& surface, const PhiTable& phi,
                                  const SolveOptions& options, unsigned jobs) {
  if (eps_list.empty()) throw std::invalid_argument("empty eps list");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("eps list must be decreasing");
  ConvergenceReport report;
  report.reference = F_hom(target, surface, phi);
  report.rows.resize(eps_list.size());
  parallel_for(eps_list.size(), jobs, [&](std::size_t i) {
    auto& row = report.rows[i];
    row.eps = eps_list[i];
    row.energy = F_eps(model, recovery_config(model, summary, target, eps_list[i], side, options));
    row.gap = std::abs(to_double(row.energy) - report.reference.total());
  });
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].gap > report.rows[i - 1].gap) report.gaps_decreasing = false;
  return report;
}

}  // namespace dpspin
