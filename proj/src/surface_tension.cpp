#include "dpspin/surface_tension.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

namespace dpspin {

RationalVector parse_rational_vector(const std::string& text) {
  RationalVector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  if (out.empty()) throw std::invalid_argument("empty vector");
  return out;
}

std::string format_rational_vector(const RationalVector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_rational(v[i]);
  }
  return s;
}

namespace {

Rational rdot(const RationalVector& a, const RationalVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Rational rdot(const RationalVector& a, const Vec& k) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * k[i];
  return s;
}

void check_normal(const RationalVector& normal, int d) {
  if (static_cast<int>(normal.size()) != d)
    throw std::invalid_argument("normal has " + std::to_string(normal.size()) + " components, expected " +
                                std::to_string(d));
  for (const auto& c : normal)
    if (c != 0) return;
  throw std::invalid_argument("normal must be nonzero");
}

}  // namespace

std::vector<RationalVector> orthogonal_frame(const RationalVector& normal, int d) {
  std::vector<RationalVector> frame{normal};
  for (int axis = 0; axis < d && static_cast<int>(frame.size()) < d; ++axis) {
    RationalVector v(static_cast<std::size_t>(d), Rational(0));
    v[static_cast<std::size_t>(axis)] = 1;
    for (const auto& f : frame) {
      const Rational c = rdot(v, f) / rdot(f, f);
      for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] -= c * f[static_cast<std::size_t>(i)];
    }
    bool zero = true;
    for (const auto& c : v) zero = zero && c == 0;
    if (!zero) frame.push_back(v);
  }
  return frame;
}

std::vector<Vec> oriented_cube(int d, const RationalVector& normal, std::int64_t side) {
  check_normal(normal, d);
  const auto frame = orthogonal_frame(normal, d);
  std::vector<Rational> bound;  // T^2 |f|^2
  for (const auto& f : frame) bound.push_back(Rational(side * side) * rdot(f, f));
  // Every point of the cube lies within T sqrt(d) / 2 of the origin.
  const auto reach = static_cast<std::int64_t>(std::ceil(static_cast<double>(side) * std::sqrt(d) / 2.0)) + 1;
  Vec lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = -reach;
    hi[i] = reach;
  }
  std::vector<Vec> out;
  for_each_in_box(d, lo, hi, [&](const Vec& k) {
    for (std::size_t f = 0; f < frame.size(); ++f) {
      const Rational p = rdot(frame[f], k);
      if (4 * p * p > bound[f]) return;
    }
    out.push_back(k);
  });
  return out;
}

CellValue cell_value(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                     const RationalVector& normal, std::int64_t side) {
  const int d = model.dimension();
  check_normal(normal, d);
  if (side < 1) throw std::invalid_argument("cell side must be positive");
  if (phase < 1 || phase > model.num_phases()) throw std::invalid_argument("phase out of range");
  if (summary.infinite_component.at(static_cast<std::size_t>(phase - 1)) < 0)
    throw std::invalid_argument("phase " + std::to_string(phase) + " has no unique infinite component");

  const auto& rs = model.residues();
  auto in_cj = [&](const Vec& k) {
    const std::size_t r = rs.index(k);
    return model.label(r) == phase && summary.in_infinite_component(r);
  };

  std::unordered_map<Vec, std::size_t, VecHash> index;
  std::vector<Vec> sites;
  for (const Vec& k : oriented_cube(d, normal, side))
    if (in_cj(k)) {
      index.emplace(k, sites.size());
      sites.push_back(k);
    }
  const std::size_t free_sites = sites.size();

  struct Pending {
    std::size_t u;
    Vec target;
    Rational weight;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < free_sites; ++i) {
    const Vec k = sites[i];
    for (const auto& b : model.strong_bonds(rs.index(k))) {
      const Vec t = k + b.offset;
      if (!index.count(t)) {
        index.emplace(t, sites.size());
        sites.push_back(t);
      }
      pending.push_back({i, t, b.weight});
    }
  }

  GroundStateInstance inst(sites.size());
  for (std::size_t i = free_sites; i < sites.size(); ++i)
    inst.fix(i, rdot(normal, sites[i]) > 0 ? Spin::Plus : Spin::Minus);
  for (const auto& p : pending) {
    const std::size_t v = index.at(p.target);
    inst.add_pair(p.u, v, p.weight);
    if (v >= free_sites) {
      // The ordered pair starting outside the cube is counted as well.
      auto back = model.pair_weight(p.target, sites[p.u]);
      if (!back) throw std::logic_error("strong bond without its reverse");
      inst.add_pair(v, p.u, *back);
    }
  }

  const Solution sol = minimize_cut(inst);
  CellValue cv;
  cv.side = side;
  cv.minimum = sol.energy;
  Rational norm = 1;
  for (int i = 0; i + 1 < d; ++i) norm *= side;
  cv.value = sol.energy / norm;
  cv.free_sites = free_sites;
  const auto& m0 = summary.coarsening_side.at(static_cast<std::size_t>(phase - 1));
  cv.below_coarsening = m0 && side < *m0;
  return cv;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(jobs, 1u), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

SurfaceRow fhom_estimate(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                         const RationalVector& normal, const std::vector<std::int64_t>& sides, unsigned jobs) {
  check_normal(normal, model.dimension());
  if (sides.size() < 2) throw std::invalid_argument("at least two cell sides are required");
  for (std::size_t i = 1; i < sides.size(); ++i)
    if (sides[i] <= sides[i - 1]) throw std::invalid_argument("cell sides must be increasing");
  SurfaceRow row;
  row.phase = phase;
  row.normal = normal;
  row.values.resize(sides.size());
  parallel_for(sides.size(), jobs,
               [&](std::size_t i) { row.values[i] = cell_value(model, summary, phase, normal, sides[i]); });
  row.estimate = row.values.back().value;
  row.increment = abs(row.values.back().value - row.values[sides.size() - 2].value);
  return row;
}

Rational fhom_total(const LatticeModel& model, const ConnectivitySummary& summary, const RationalVector& normal,
                    const std::vector<std::int64_t>& sides, unsigned jobs) {
  Rational total = 0;
  for (int j = 1; j <= model.num_phases(); ++j)
    total += fhom_estimate(model, summary, j, normal, sides, jobs).estimate;
  return total;
}

}  // namespace dpspin
