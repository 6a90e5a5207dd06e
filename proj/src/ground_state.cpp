#include "dpspin/ground_state.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boykov_kolmogorov_max_flow.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>

namespace dpspin {

const char* to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Direct: return "direct";
    case SolveMethod::Enumeration: return "enumeration";
    case SolveMethod::MinCut: return "mincut";
    case SolveMethod::Annealing: return "annealing";
  }
  return "?";
}

GroundStateInstance::GroundStateInstance(std::size_t num_variables)
    : fixed_(num_variables), unary_(num_variables), group_(num_variables) {
  for (std::size_t v = 0; v < num_variables; ++v) group_[v] = v;
}

void GroundStateInstance::add_pair(std::size_t u, std::size_t v, const Rational& weight) {
  if (u >= num_variables() || v >= num_variables()) throw InstanceError("pair term references a missing variable");
  pairs_.push_back({u, v, weight});
}

void GroundStateInstance::add_unary(std::size_t v, const Rational& plus, const Rational& minus) {
  auto& term = unary_.at(v);
  term.plus += plus;
  term.minus += minus;
}

namespace {

inline int spin_index(Spin s) { return s == Spin::Plus ? 0 : 1; }

std::int64_t to_int64(const BigInt& v) {
  static const BigInt limit = BigInt(1) << 62;
  if (v >= limit || v <= -limit) throw InstanceError("scaled energies exceed 64-bit range");
  return v.convert_to<std::int64_t>();
}

/// Instance with equality groups contracted, fixed groups folded into unary terms and
/// a constant, and all values scaled by a common denominator to integers.
struct Contracted {
  BigInt scale = 1;
  std::size_t num_free = 0;
  std::vector<long> group_of;             // per variable: free index, or -1 when fixed
  std::vector<Spin> fixed_value;          // per variable, meaningful when group_of < 0
  std::vector<std::int64_t> h_plus, h_minus;
  struct Coupling {
    std::size_t a, b;
    std::int64_t weight;  // cost when x_a != x_b
  };
  std::vector<Coupling> couplings;
  std::int64_t constant = 0;

  std::vector<Spin> expand(const std::vector<Spin>& free_values) const {
    std::vector<Spin> x(group_of.size());
    for (std::size_t v = 0; v < x.size(); ++v)
      x[v] = group_of[v] < 0 ? fixed_value[v] : free_values[static_cast<std::size_t>(group_of[v])];
    return x;
  }

  std::int64_t evaluate(const std::vector<Spin>& y) const {
    std::int64_t e = constant;
    for (std::size_t g = 0; g < num_free; ++g) e += y[g] == Spin::Plus ? h_plus[g] : h_minus[g];
    for (const auto& c : couplings)
      if (y[c.a] != y[c.b]) e += c.weight;
    return e;
  }
};

Contracted contract(const GroundStateInstance& inst) {
  const std::size_t n = inst.num_variables();
  Contracted out;

  // Groups in order of first member, so lexicographic order on variables equals
  // lexicographic order on groups.
  std::unordered_map<std::size_t, std::size_t> compact;
  std::vector<std::size_t> group_index(n);
  std::vector<std::optional<Spin>> group_fixed;
  for (std::size_t v = 0; v < n; ++v) {
    auto [it, inserted] = compact.emplace(inst.groups()[v], compact.size());
    if (inserted) group_fixed.emplace_back();
    group_index[v] = it->second;
    if (const auto& f = inst.fixed()[v]) {
      auto& gf = group_fixed[it->second];
      if (gf && *gf != *f) throw InstanceError("equality group contains conflicting fixed values");
      gf = *f;
    }
  }
  std::vector<long> free_of_group(group_fixed.size(), -1);
  for (std::size_t g = 0; g < group_fixed.size(); ++g)
    if (!group_fixed[g]) free_of_group[g] = static_cast<long>(out.num_free++);

  out.group_of.resize(n);
  out.fixed_value.assign(n, Spin::Plus);
  for (std::size_t v = 0; v < n; ++v) {
    out.group_of[v] = free_of_group[group_index[v]];
    if (out.group_of[v] < 0) out.fixed_value[v] = *group_fixed[group_index[v]];
  }

  for (const auto& p : inst.pairs()) out.scale = lcm(out.scale, boost::multiprecision::denominator(p.weight));
  for (const auto& u : inst.unary()) {
    out.scale = lcm(out.scale, boost::multiprecision::denominator(u.plus));
    out.scale = lcm(out.scale, boost::multiprecision::denominator(u.minus));
  }
  auto scaled = [&](const Rational& r) {
    return BigInt(boost::multiprecision::numerator(r) * (out.scale / boost::multiprecision::denominator(r)));
  };

  std::vector<BigInt> hp(out.num_free), hm(out.num_free);
  BigInt constant = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& u = inst.unary()[v];
    if (out.group_of[v] >= 0) {
      hp[static_cast<std::size_t>(out.group_of[v])] += scaled(u.plus);
      hm[static_cast<std::size_t>(out.group_of[v])] += scaled(u.minus);
    } else {
      constant += scaled(out.fixed_value[v] == Spin::Plus ? u.plus : u.minus);
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, BigInt> couplings;
  for (const auto& p : inst.pairs()) {
    const long gu = out.group_of[p.u], gv = out.group_of[p.v];
    if (group_index[p.u] == group_index[p.v]) continue;
    const BigInt cost = 4 * scaled(p.weight);
    if (gu < 0 && gv < 0) {
      if (out.fixed_value[p.u] != out.fixed_value[p.v]) constant += cost;
    } else if (gu < 0 || gv < 0) {
      const std::size_t g = static_cast<std::size_t>(gu < 0 ? gv : gu);
      const Spin anchor = gu < 0 ? out.fixed_value[p.u] : out.fixed_value[p.v];
      (anchor == Spin::Plus ? hm : hp)[g] += cost;
    } else {
      const auto a = static_cast<std::size_t>(gu), b = static_cast<std::size_t>(gv);
      couplings[{std::min(a, b), std::max(a, b)}] += cost;
    }
  }

  BigInt magnitude = abs(constant);
  for (std::size_t g = 0; g < out.num_free; ++g) magnitude += abs(hp[g]) + abs(hm[g]);
  for (const auto& [key, w] : couplings) magnitude += abs(w);
  to_int64(magnitude);  // every partial sum below stays within this bound

  out.constant = to_int64(constant);
  out.h_plus.resize(out.num_free);
  out.h_minus.resize(out.num_free);
  for (std::size_t g = 0; g < out.num_free; ++g) {
    out.h_plus[g] = to_int64(hp[g]);
    out.h_minus[g] = to_int64(hm[g]);
  }
  for (const auto& [key, w] : couplings)
    if (w != 0) out.couplings.push_back({key.first, key.second, to_int64(w)});
  return out;
}

Solution make_solution(const Contracted& c, const std::vector<Spin>& free_values, SolveMethod method, bool exact) {
  Solution s;
  s.assignment = c.expand(free_values);
  const std::int64_t scaled_energy = c.evaluate(free_values);
  s.energy = Rational(BigInt(scaled_energy), c.scale);
  s.energy_value = to_double(s.energy);
  s.method = method;
  s.exact = exact;
  s.free_groups = c.num_free;
  return s;
}

Solution enumerate(const Contracted& c, std::size_t cap) {
  const std::size_t n = c.num_free;
  if (n > cap)
    throw EnumerationCapExceeded(std::to_string(n) + " free groups exceed the enumeration cap of " +
                                 std::to_string(cap));
  if (n > 62) throw EnumerationCapExceeded("enumeration beyond 62 free groups is not supported");
  if (n == 0) return make_solution(c, {}, SolveMethod::Direct, true);

  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> adj(n);
  for (const auto& cp : c.couplings) {
    adj[cp.a].push_back({cp.b, cp.weight});
    adj[cp.b].push_back({cp.a, cp.weight});
  }
  std::vector<Spin> x(n, Spin::Plus);
  std::int64_t e = c.evaluate(x);
  std::int64_t best = e;
  std::uint64_t code = 0, best_code = 0;  // bit (n-1-g) set <=> group g is -1
  const std::uint64_t states = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < states; ++i) {
    const int bit = std::countr_zero(i);
    const std::size_t g = n - 1 - static_cast<std::size_t>(bit);
    const Spin old = x[g];
    const Spin now = flip(old);
    e += (now == Spin::Plus ? c.h_plus[g] : c.h_minus[g]) - (old == Spin::Plus ? c.h_plus[g] : c.h_minus[g]);
    for (const auto& [nb, w] : adj[g]) {
      // Equal before <=> different after.
      e += x[nb] == old ? w : -w;
    }
    x[g] = now;
    code ^= std::uint64_t{1} << bit;
    if (e < best || (e == best && code < best_code)) {
      best = e;
      best_code = code;
    }
  }
  std::vector<Spin> y(n);
  for (std::size_t g = 0; g < n; ++g) y[g] = (best_code >> (n - 1 - g)) & 1 ? Spin::Minus : Spin::Plus;
  return make_solution(c, y, SolveMethod::Enumeration, true);
}

using FlowTraits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
struct FlowVertex {
  boost::default_color_type color = boost::white_color;
  std::int64_t distance = 0;
  FlowTraits::edge_descriptor predecessor;
};
struct FlowEdge {
  std::int64_t capacity = 0;
  std::int64_t residual = 0;
  FlowTraits::edge_descriptor reverse;
};
using FlowGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS, FlowVertex, FlowEdge>;

void add_arc_pair(FlowGraph& g, std::size_t u, std::size_t v, std::int64_t forward, std::int64_t backward) {
  auto e1 = boost::add_edge(u, v, g).first;
  auto e2 = boost::add_edge(v, u, g).first;
  g[e1].capacity = forward;
  g[e2].capacity = backward;
  g[e1].reverse = e2;
  g[e2].reverse = e1;
}

Solution cut(const Contracted& c) {
  const std::size_t n = c.num_free;
  if (n == 0) return make_solution(c, {}, SolveMethod::Direct, true);
  for (const auto& cp : c.couplings)
    if (cp.weight < 0) throw NonSubmodularError("negative coupling between free groups; instance is not submodular");

  // Source side <=> +1. Cutting g->sink pays h_plus, cutting source->g pays h_minus.
  FlowGraph graph(n + 2);
  const std::size_t source = n, sink = n + 1;
  std::int64_t offset = c.constant;
  for (std::size_t g = 0; g < n; ++g) {
    const std::int64_t m = std::min(c.h_plus[g], c.h_minus[g]);
    offset += m;
    if (c.h_plus[g] - m > 0) add_arc_pair(graph, g, sink, c.h_plus[g] - m, 0);
    if (c.h_minus[g] - m > 0) add_arc_pair(graph, source, g, c.h_minus[g] - m, 0);
  }
  for (const auto& cp : c.couplings) add_arc_pair(graph, cp.a, cp.b, cp.weight, cp.weight);

  const std::int64_t flow = boost::boykov_kolmogorov_max_flow(
      graph, boost::get(&FlowEdge::capacity, graph), boost::get(&FlowEdge::residual, graph),
      boost::get(&FlowEdge::reverse, graph), boost::get(&FlowVertex::predecessor, graph),
      boost::get(&FlowVertex::color, graph), boost::get(&FlowVertex::distance, graph),
      boost::get(boost::vertex_index, graph), source, sink);

  const auto source_color = graph[source].color;
  std::vector<Spin> y(n);
  for (std::size_t g = 0; g < n; ++g) y[g] = graph[g].color == source_color ? Spin::Plus : Spin::Minus;
  if (c.evaluate(y) != offset + flow) throw std::logic_error("min-cut labelling does not match the flow value");
  return make_solution(c, y, SolveMethod::MinCut, true);
}

/// Gauge that flips groups so every coupling becomes nonnegative, if one exists.
std::optional<std::vector<char>> balancing_gauge(const Contracted& c) {
  std::vector<std::vector<std::pair<std::size_t, bool>>> adj(c.num_free);  // (neighbour, must differ)
  for (const auto& cp : c.couplings) {
    adj[cp.a].push_back({cp.b, cp.weight < 0});
    adj[cp.b].push_back({cp.a, cp.weight < 0});
  }
  std::vector<int> side(c.num_free, -1);
  for (std::size_t root = 0; root < c.num_free; ++root) {
    if (side[root] >= 0) continue;
    side[root] = 0;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t g = queue.front();
      queue.pop_front();
      for (const auto& [nb, differ] : adj[g]) {
        const int want = differ ? 1 - side[g] : side[g];
        if (side[nb] < 0) {
          side[nb] = want;
          queue.push_back(nb);
        } else if (side[nb] != want) {
          return std::nullopt;
        }
      }
    }
  }
  std::vector<char> gauge(c.num_free);
  for (std::size_t g = 0; g < c.num_free; ++g) gauge[g] = static_cast<char>(side[g]);
  return gauge;
}

Contracted apply_gauge(const Contracted& c, const std::vector<char>& gauge) {
  Contracted out = c;
  for (std::size_t g = 0; g < c.num_free; ++g)
    if (gauge[g]) std::swap(out.h_plus[g], out.h_minus[g]);
  for (auto& cp : out.couplings)
    if (gauge[cp.a] != gauge[cp.b]) {
      // w [x != y] = w - w [x' != y'] when exactly one side is flipped.
      out.constant += cp.weight;
      cp.weight = -cp.weight;
    }
  return out;
}

bool submodular(const Contracted& c) {
  return std::all_of(c.couplings.begin(), c.couplings.end(), [](const auto& cp) { return cp.weight >= 0; });
}

Solution anneal(const Contracted& c, std::uint64_t seed, const AnnealSchedule& schedule) {
  const std::size_t n = c.num_free;
  if (n == 0) return make_solution(c, {}, SolveMethod::Direct, true);
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> adj(n);
  for (const auto& cp : c.couplings) {
    adj[cp.a].push_back({cp.b, cp.weight});
    adj[cp.b].push_back({cp.a, cp.weight});
  }
  auto delta = [&](const std::vector<Spin>& x, std::size_t g) {
    const Spin old = x[g];
    std::int64_t d = (old == Spin::Plus ? c.h_minus[g] - c.h_plus[g] : c.h_plus[g] - c.h_minus[g]);
    for (const auto& [nb, w] : adj[g]) d += x[nb] == old ? w : -w;
    return d;
  };

  std::int64_t scale = 1;
  for (std::size_t g = 0; g < n; ++g) {
    std::int64_t s = std::llabs(c.h_plus[g] - c.h_minus[g]);
    for (const auto& [nb, w] : adj[g]) s += std::llabs(w);
    scale = std::max(scale, s);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Spin> x(n);
  for (auto& s : x) s = rng() & 1 ? Spin::Minus : Spin::Plus;
  std::int64_t e = c.evaluate(x);
  std::vector<Spin> best_x = x;
  std::int64_t best = e;

  const double t0 = schedule.start_temperature * static_cast<double>(scale);
  const double t1 = schedule.end_temperature * static_cast<double>(scale);
  const std::size_t sweeps = std::max<std::size_t>(schedule.sweeps, 1);
  const double ratio = sweeps > 1 ? std::pow(t1 / t0, 1.0 / static_cast<double>(sweeps - 1)) : 1.0;
  double temperature = t0;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep, temperature *= ratio) {
    for (std::size_t g = 0; g < n; ++g) {
      const std::int64_t d = delta(x, g);
      if (d <= 0 || unit(rng) < std::exp(-static_cast<double>(d) / temperature)) {
        x[g] = flip(x[g]);
        e += d;
        if (e < best) {
          best = e;
          best_x = x;
        }
      }
    }
  }
  // Finish with greedy descent from the best state.
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t g = 0; g < n; ++g)
      if (delta(best_x, g) < 0) {
        best_x[g] = flip(best_x[g]);
        improved = true;
      }
  }
  return make_solution(c, best_x, SolveMethod::Annealing, false);
}

}  // namespace

Rational energy(const GroundStateInstance& inst, std::span<const Spin> x) {
  if (x.size() != inst.num_variables())
    throw InstanceError("assignment has " + std::to_string(x.size()) + " entries, expected " +
                        std::to_string(inst.num_variables()));
  std::unordered_map<std::size_t, Spin> group_value;
  for (std::size_t v = 0; v < x.size(); ++v) {
    if (const auto& f = inst.fixed()[v]; f && *f != x[v])
      throw InstanceError("assignment violates the fixed value of variable " + std::to_string(v));
    auto [it, inserted] = group_value.emplace(inst.groups()[v], x[v]);
    if (!inserted && it->second != x[v])
      throw InstanceError("assignment is not constant on the group of variable " + std::to_string(v));
  }
  Rational e = 0;
  for (const auto& p : inst.pairs())
    if (x[p.u] != x[p.v]) e += 4 * p.weight;
  for (std::size_t v = 0; v < x.size(); ++v) e += x[v] == Spin::Plus ? inst.unary()[v].plus : inst.unary()[v].minus;
  return e;
}

std::size_t count_free_groups(const GroundStateInstance& instance) { return contract(instance).num_free; }

Solution minimize_enum(const GroundStateInstance& instance, std::size_t cap) {
  Solution s = enumerate(contract(instance), cap);
  if (s.method == SolveMethod::Direct) s.method = SolveMethod::Enumeration;
  return s;
}

Solution minimize_cut(const GroundStateInstance& instance) {
  Solution s = cut(contract(instance));
  s.method = SolveMethod::MinCut;
  return s;
}

bool is_submodular(const GroundStateInstance& instance) { return submodular(contract(instance)); }

bool is_switchable(const GroundStateInstance& instance) { return balancing_gauge(contract(instance)).has_value(); }

Solution minimize_switched_cut(const GroundStateInstance& instance) {
  const Contracted c = contract(instance);
  const auto gauge = balancing_gauge(c);
  if (!gauge) throw NonSubmodularError("coupling signs are frustrated; no gauge makes the instance submodular");
  Solution switched = cut(apply_gauge(c, *gauge));
  std::vector<Spin> y(c.num_free);
  // Recover free-group values from the assignment of the switched instance.
  for (std::size_t v = 0; v < c.group_of.size(); ++v)
    if (c.group_of[v] >= 0) {
      const auto g = static_cast<std::size_t>(c.group_of[v]);
      y[g] = (*gauge)[g] ? flip(switched.assignment[v]) : switched.assignment[v];
    }
  return make_solution(c, y, SolveMethod::MinCut, true);
}

Solution minimize_anneal(const GroundStateInstance& instance, std::uint64_t seed, const AnnealSchedule& schedule) {
  Solution s = anneal(contract(instance), seed, schedule);
  s.method = SolveMethod::Annealing;
  s.exact = s.free_groups == 0;
  return s;
}

Solution minimize(const GroundStateInstance& instance, const SolveOptions& options) {
  const Contracted c = contract(instance);
  if (c.num_free == 0) return make_solution(c, {}, SolveMethod::Direct, true);
  if (c.num_free <= options.enumeration_cap) return enumerate(c, options.enumeration_cap);
  if (submodular(c)) return cut(c);
  if (auto gauge = balancing_gauge(c)) {
    Solution switched = cut(apply_gauge(c, *gauge));
    std::vector<Spin> y(c.num_free);
    for (std::size_t v = 0; v < c.group_of.size(); ++v)
      if (c.group_of[v] >= 0) {
        const auto g = static_cast<std::size_t>(c.group_of[v]);
        y[g] = (*gauge)[g] ? flip(switched.assignment[v]) : switched.assignment[v];
      }
    return make_solution(c, y, SolveMethod::MinCut, true);
  }
  if (options.allow_anneal) return anneal(c, options.seed, options.schedule);
  throw NonSubmodularError(std::to_string(c.num_free) +
                           " free groups with frustrated negative couplings; enable annealing to get an upper bound");
}

}  // namespace dpspin
