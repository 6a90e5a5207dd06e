#include "cli.hpp"

#include "dpspin/bulk_density.hpp"
#include "dpspin/connectivity.hpp"
#include "dpspin/field_io.hpp"
#include "dpspin/fixtures.hpp"
#include "dpspin/gamma_limit.hpp"
#include "dpspin/geometry.hpp"
#include "dpspin/model.hpp"
#include "dpspin/surface_tension.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef DPSPIN_FIXTURE_DIR
#define DPSPIN_FIXTURE_DIR "fixtures"
#endif

namespace dpspin {

namespace {

using nlohmann::json;

/// Exit code 1: invalid input document, failed validation, failed computation.
class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exit code 2: bad flags or flag values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string format;
  std::string out;
  unsigned jobs = 1;
  std::size_t enum_cap = kDefaultEnumerationCap;
  bool anneal = false;
  std::uint64_t seed = 1;
  std::size_t sweeps = 4000;
  int coarsen_cap = 64;

  SolveOptions solve() const {
    SolveOptions o;
    o.enumeration_cap = enum_cap;
    o.allow_anneal = anneal;
    o.seed = seed;
    o.schedule.sweeps = sweeps;
    return o;
  }
  bool json_output(const char* fallback) const { return (format.empty() ? std::string(fallback) : format) == "json"; }
};

std::optional<long long> env_integer(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used == std::string(v).size() && x > 0) return x;
  } catch (const std::exception&) {
  }
  throw UsageError(std::string("environment variable ") + name + " must be a positive integer");
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "write output to this file instead of stdout");
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--enum-cap", c.enum_cap, "largest number of free groups solved by enumeration");
  sub->add_flag("--anneal", c.anneal, "allow annealing for frustrated instances (upper bounds only)");
  sub->add_option("--seed", c.seed, "annealing seed");
  sub->add_option("--sweeps", c.sweeps, "annealing sweeps")->check(CLI::PositiveNumber);
}

template <typename Fn>
auto as_usage(const std::string& flag, Fn fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::vector<std::int64_t> parse_int_list(const std::string& flag, const std::string& text) {
  return as_usage(flag, [&] {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument("expected positive integers, got '" + item + "'");
      out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
  });
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string decimal(double v) {
  std::ostringstream ss;
  ss << std::setprecision(12) << v;
  return ss.str();
}

std::string decimal(const Rational& r) { return decimal(to_double(r)); }

struct Loaded {
  LatticeModel model;
  ConnectivitySummary summary;
};

json violations_json(const std::vector<Violation>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back({{"rule", v.rule}, {"witness", v.witness}, {"message", v.message}});
  return a;
}

LatticeModel read_model(const std::string& path) {
  try {
    return load_model(path);
  } catch (const ModelParseError& e) {
    throw Failure(e.what());
  } catch (const std::runtime_error& e) {
    throw Failure(e.what());
  }
}

Loaded load_valid(const std::string& path, const Common& c) {
  Loaded l{read_model(path), {}};
  const auto report = validate(l.model);
  if (!report.passed()) {
    std::string msg = "model '" + path + "' is invalid:";
    for (const auto& v : report.violations) msg += "\n  [" + v.rule + "] " + v.witness + ": " + v.message;
    throw Failure(msg);
  }
  ClassifyOptions opts;
  opts.coarsening_cap_multiple = c.coarsen_cap;
  l.summary = classify(l.model, opts);
  return l;
}

template <typename T, typename Fn>
T read_document(const std::string& path, Fn fn) {
  try {
    return fn(path);
  } catch (const std::exception& e) {
    throw Failure(e.what());
  }
}

// ---- subcommands ----------------------------------------------------------

int cmd_validate(const std::string& path, const Common& c, std::ostream& o) {
  const LatticeModel model = read_model(path);
  const auto report = validate(model);
  if (c.json_output("json")) {
    json doc{{"model", path},
             {"dimension", model.dimension()},
             {"period", model.period()},
             {"num_phases", model.num_phases()},
             {"valid", report.passed()},
             {"violations", violations_json(report.violations)}};
    o << doc.dump(2) << "\n";
  } else {
    o << "rule,witness,message\n";
    for (const auto& v : report.violations)
      o << csv_field(v.rule) << "," << csv_field(v.witness) << "," << csv_field(v.message) << "\n";
  }
  return report.passed() ? 0 : 1;
}

int cmd_components(const std::string& path, const Common& c, std::ostream& o) {
  const LatticeModel model = read_model(path);
  const auto local = validate_local(model);
  if (local.has_rule("label-range") || local.has_rule("hard-phase-closure") || local.has_rule("strong-from-soft"))
    throw Failure("model labels or strong bonds are inconsistent; run 'validate' for details");
  ClassifyOptions opts;
  opts.coarsening_cap_multiple = c.coarsen_cap;
  const auto s = classify(model, opts);
  const auto& rs = model.residues();
  if (c.json_output("json")) {
    json phases = json::array();
    for (int j = 1; j <= model.num_phases(); ++j) {
      const auto idx = static_cast<std::size_t>(j - 1);
      json comps = json::array();
      for (std::size_t k = 0; k < s.phases[idx].size(); ++k) {
        const auto& comp = s.phases[idx][k];
        json residues = json::array();
        for (auto r : comp.residues) residues.push_back(rs.key(r));
        json basis = json::array();
        for (const auto& b : comp.displacement_basis) basis.push_back(format_vec(b, model.dimension()));
        json entry{{"index", k},
                   {"classification", to_string(comp.classification)},
                   {"residues", residues},
                   {"rank", comp.rank()},
                   {"displacement_basis", basis},
                   {"displacement_index", comp.displacement_index}};
        if (comp.lift_diameter_sq) entry["lift_diameter_sq"] = *comp.lift_diameter_sq;
        comps.push_back(entry);
      }
      json ph{{"phase", j},
              {"components", comps},
              {"infinite_component", s.infinite_component[idx]},
              {"density", format_rational(s.densities[idx])}};
      if (s.coarsening_side[idx])
        ph["coarsening_side"] = *s.coarsening_side[idx];
      else
        ph["coarsening_side"] = nullptr;
      phases.push_back(ph);
    }
    json doc{{"model", path},
             {"phases", phases},
             {"island_radius_sq", s.island_radius_sq},
             {"violations", violations_json(s.violations)}};
    o << doc.dump(2) << "\n";
  } else {
    o << "phase,component,classification,residues,rank,displacement_index\n";
    for (int j = 1; j <= model.num_phases(); ++j) {
      const auto& comps = s.phases[static_cast<std::size_t>(j - 1)];
      for (std::size_t k = 0; k < comps.size(); ++k)
        o << j << "," << k << "," << to_string(comps[k].classification) << "," << comps[k].residues.size() << ","
          << comps[k].rank() << "," << comps[k].displacement_index << "\n";
    }
  }
  return 0;
}

int cmd_fhom(const std::string& path, int phase, const std::string& normal_text, const std::string& sides_text,
             const Common& c, std::ostream& o, std::ostream& err) {
  const auto normal = as_usage("--normal", [&] { return parse_rational_vector(normal_text); });
  const auto sides = parse_int_list("--T", sides_text);
  const auto l = load_valid(path, c);
  if (static_cast<int>(normal.size()) != l.model.dimension())
    throw UsageError("--normal: expected " + std::to_string(l.model.dimension()) + " components");
  if (phase < 0 || phase > l.model.num_phases()) throw UsageError("--phase: out of range");
  std::vector<SurfaceRow> rows;
  as_usage("--normal/--T", [&] {
    for (int j = 1; j <= l.model.num_phases(); ++j)
      if (phase == 0 || phase == j) rows.push_back(fhom_estimate(l.model, l.summary, j, normal, sides, c.jobs));
    return 0;
  });
  Rational total = 0;
  for (const auto& r : rows) {
    total += r.estimate;
    for (const auto& v : r.values)
      if (v.below_coarsening)
        err << "warning: phase " << r.phase << " cell side " << v.side << " is below the coarsening side\n";
  }
  const std::string nstr = format_rational_vector(normal);
  if (c.json_output("csv")) {
    json out = json::array();
    for (const auto& r : rows) {
      json values = json::array();
      for (const auto& v : r.values)
        values.push_back({{"T", v.side},
                          {"value", format_rational(v.value)},
                          {"decimal", to_double(v.value)},
                          {"free_sites", v.free_sites},
                          {"below_coarsening", v.below_coarsening}});
      out.push_back({{"phase", r.phase},
                     {"normal", nstr},
                     {"values", values},
                     {"estimate", format_rational(r.estimate)},
                     {"increment", format_rational(r.increment)}});
    }
    json doc{{"model", path}, {"rows", out}};
    if (phase == 0) doc["total"] = format_rational(total);
    o << doc.dump(2) << "\n";
  } else {
    o << "phase,normal,T,value,decimal\n";
    for (const auto& r : rows)
      for (const auto& v : r.values)
        o << r.phase << "," << csv_field(nstr) << "," << v.side << "," << format_rational(v.value) << ","
          << decimal(v.value) << "\n";
  }
  return 0;
}

int cmd_phi(const std::string& path, const std::string& z_text, const std::string& sides_text, const Common& c,
            std::ostream& o) {
  const auto sides = parse_int_list("--M", sides_text);
  const auto l = load_valid(path, c);
  std::vector<SpinVector> zs;
  if (z_text.empty())
    zs = all_spin_vectors(l.model.num_phases());
  else
    zs.push_back(as_usage("--z", [&] { return parse_spin_vector(z_text); }));
  for (const auto& z : zs)
    if (static_cast<int>(z.size()) != l.model.num_phases())
      throw UsageError("--z: expected " + std::to_string(l.model.num_phases()) + " spins");
  std::vector<PhiRow> rows;
  for (const auto& z : zs) {
    try {
      rows.push_back(phi_estimate(l.model, l.summary, z, sides, c.solve(), c.jobs));
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--M: ") + e.what());
    } catch (const std::runtime_error& e) {
      throw Failure(e.what());
    }
  }
  if (c.json_output("csv")) {
    json out = json::array();
    for (const auto& r : rows) {
      json entries = json::array();
      for (const auto& e : r.entries)
        entries.push_back({{"M", e.side},
                           {"phi", format_rational(e.phi.value)},
                           {"phi_tilde", format_rational(e.phi_tilde.value)},
                           {"method", to_string(e.phi.method)},
                           {"exact", e.phi.exact && e.phi_tilde.exact},
                           {"free_groups", e.phi.free_groups},
                           {"tilde_above", e.tilde_above},
                           {"island_bound", e.island_bound},
                           {"island_bound_strict", e.island_bound_strict}});
      json mono = json::array();
      for (const auto& m : r.monotonicity)
        mono.push_back({{"M", m.side}, {"KM", m.multiple}, {"holds", m.holds}});
      out.push_back({{"z", format_spin_vector(r.z)},
                     {"entries", entries},
                     {"monotonicity", mono},
                     {"estimate", format_rational(r.estimate)},
                     {"lower", format_rational(r.lower)},
                     {"upper", format_rational(r.upper)},
                     {"bracket_valid", r.bracket_valid},
                     {"island_constant", r.constant.value()},
                     {"island_constant_strict", r.constant_strict.value()}});
    }
    o << json{{"model", path}, {"rows", out}}.dump(2) << "\n";
  } else {
    o << "z,M,phi_M,phi_tilde_M,phi_M_decimal,phi_tilde_M_decimal,method,free_groups\n";
    for (const auto& r : rows)
      for (const auto& e : r.entries)
        o << csv_field(format_spin_vector(r.z)) << "," << e.side << "," << format_rational(e.phi.value) << ","
          << format_rational(e.phi_tilde.value) << "," << decimal(e.phi.value) << "," << decimal(e.phi_tilde.value)
          << "," << to_string(e.phi.method) << "," << e.phi.free_groups << "\n";
  }
  return 0;
}

int cmd_energy(const std::string& model_path, const std::string& field_path, const Common& c, std::ostream& o) {
  const auto l = load_valid(model_path, c);
  const SpinField f = read_document<SpinField>(field_path, load_field);
  Rational e;
  try {
    e = F_eps(l.model, f);
  } catch (const std::invalid_argument& ex) {
    throw Failure(ex.what());
  }
  if (c.json_output("json"))
    o << json{{"eps", format_rational(f.eps)}, {"sites", f.sites.size()}, {"energy", format_rational(e)},
              {"decimal", to_double(e)}}
             .dump(2)
      << "\n";
  else
    o << "eps,sites,energy,decimal\n"
      << format_rational(f.eps) << "," << f.sites.size() << "," << format_rational(e) << "," << decimal(e) << "\n";
  return 0;
}

int cmd_extend(const std::string& model_path, const std::string& field_path, int phase, std::int64_t side,
               const std::string& field_out, const Common& c, std::ostream& o) {
  const auto l = load_valid(model_path, c);
  const SpinField f = read_document<SpinField>(field_path, load_field);
  ExtensionResult r;
  std::size_t broken = 0;
  try {
    r = extend(l.model, l.summary, phase, f, side);
    broken = broken_strong_bonds(l.model, l.summary, phase, f);
  } catch (const ExtensionError& e) {
    throw UsageError(e.what());
  } catch (const std::exception& e) {
    throw Failure(e.what());
  }
  std::size_t bound = broken;
  for (int i = 0; i < l.model.dimension(); ++i) bound *= 3;
  if (!field_out.empty()) {
    std::ofstream fo(field_out);
    if (!fo) throw Failure("cannot write '" + field_out + "'");
    fo << serialize_field(r.field);
  }
  if (c.json_output("json"))
    o << json{{"M", r.side},       {"family", r.family},     {"marked", r.marked},
              {"broken", broken},  {"bound", bound},         {"within_bound", r.marked <= bound}}
             .dump(2)
      << "\n";
  else
    o << "M,family,marked,broken,bound\n"
      << r.side << "," << r.family << "," << r.marked << "," << broken << "," << bound << "\n";
  return 0;
}

TableOptions table_options(const std::string& t_text, const std::string& m_text, const Common& c) {
  TableOptions t;
  t.cell_sides = parse_int_list("--T", t_text);
  t.cube_sides = parse_int_list("--Mphi", m_text);
  t.solve = c.solve();
  t.jobs = c.jobs;
  return t;
}

std::pair<SurfaceTable, PhiTable> tables_for(const Loaded& l, const MultiphaseTarget& target, const TableOptions& t) {
  try {
    return compute_tables(l.model, l.summary, target, t);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::runtime_error& e) {
    throw Failure(e.what());
  }
}

void check_target_shape(const Loaded& l, const MultiphaseTarget& target) {
  if (target.domain.dimension() != l.model.dimension()) throw Failure("target dimension does not match the model");
  if (static_cast<int>(target.phases.size()) != l.model.num_phases())
    throw Failure("target phase count does not match the model");
}

int cmd_gamma_eval(const std::string& model_path, const std::string& target_path, const std::string& t_text,
                   const std::string& m_text, const Common& c, std::ostream& o) {
  const auto l = load_valid(model_path, c);
  const auto target = read_document<MultiphaseTarget>(target_path, load_target);
  check_target_shape(l, target);
  const auto [surface, phi] = tables_for(l, target, table_options(t_text, m_text, c));
  const FhomValue v = F_hom(target, surface, phi);
  if (c.json_output("json")) {
    json pieces = json::array();
    for (const auto& p : interface_pieces(target))
      pieces.push_back({{"phase", p.phase},
                        {"normal", format_rational_vector(p.normal)},
                        {"f_hom", *surface.lookup(p.phase, p.normal)},
                        {"measure", p.measure}});
    json cells = json::array();
    for (const auto& cell : constancy_cells(target))
      cells.push_back({{"z", format_spin_vector(cell.z)}, {"phi", *phi.lookup(cell.z)}, {"volume", cell.volume}});
    o << json{{"surface_terms", pieces}, {"bulk_terms", cells}, {"surface", v.surface}, {"bulk", v.bulk},
              {"total", v.total()}}
             .dump(2)
      << "\n";
  } else {
    o << "term,key,density,measure\n";
    for (const auto& p : interface_pieces(target))
      o << "surface," << csv_field(std::to_string(p.phase) + ":" + format_rational_vector(p.normal)) << ","
        << decimal(*surface.lookup(p.phase, p.normal)) << "," << decimal(p.measure) << "\n";
    for (const auto& cell : constancy_cells(target))
      o << "bulk," << csv_field(format_spin_vector(cell.z)) << "," << decimal(*phi.lookup(cell.z)) << ","
        << decimal(cell.volume) << "\n";
    o << "total,," << decimal(v.total()) << ",\n";
  }
  return 0;
}

int cmd_converge(const std::string& model_path, const std::string& target_path, const std::string& eps_text,
                 std::int64_t side, const std::string& t_text, const std::string& m_text, const Common& c,
                 std::ostream& o) {
  const auto eps = as_usage("--eps", [&] { return parse_rational_vector(eps_text); });
  const auto l = load_valid(model_path, c);
  const auto target = read_document<MultiphaseTarget>(target_path, load_target);
  check_target_shape(l, target);
  const auto [surface, phi] = tables_for(l, target, table_options(t_text, m_text, c));
  ConvergenceReport rep;
  try {
    rep = converge_report(l.model, l.summary, target, eps, side, surface, phi, c.solve(), c.jobs);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::runtime_error& e) {
    throw Failure(e.what());
  }
  if (c.json_output("csv")) {
    json rows = json::array();
    for (const auto& r : rep.rows)
      rows.push_back({{"eps", format_rational(r.eps)}, {"energy", format_rational(r.energy)},
                      {"decimal", to_double(r.energy)}, {"gap", r.gap}});
    o << json{{"F_hom", rep.reference.total()}, {"rows", rows}, {"gaps_decreasing", rep.gaps_decreasing}}.dump(2)
      << "\n";
  } else {
    o << "eps,energy,decimal,F_hom,gap\n";
    for (const auto& r : rep.rows)
      o << format_rational(r.eps) << "," << format_rational(r.energy) << "," << decimal(r.energy) << ","
        << decimal(rep.reference.total()) << "," << decimal(r.gap) << "\n";
  }
  return 0;
}

int cmd_examples(const std::string& dir, const Common& c, std::ostream& o) {
  std::vector<ExampleCheck> checks;
  try {
    checks = run_examples(dir, c.solve(), c.jobs);
  } catch (const std::exception& e) {
    throw Failure(e.what());
  }
  bool all = true;
  if (c.json_output("csv")) {
    json a = json::array();
    for (const auto& ch : checks) {
      all = all && ch.passed;
      json e{{"name", ch.name},         {"fixture", ch.fixture},     {"kind", ch.kind},
             {"expected", ch.expected}, {"computed", ch.computed},   {"tolerance", ch.tolerance},
             {"formula", ch.formula},   {"passed", ch.passed}};
      if (!ch.error.empty()) e["error"] = ch.error;
      a.push_back(e);
    }
    o << json{{"checks", a}, {"passed", all}}.dump(2) << "\n";
  } else {
    o << "status,name,fixture,expected,computed,tolerance\n";
    for (const auto& ch : checks) {
      all = all && ch.passed;
      o << (ch.passed ? "PASS" : "FAIL") << "," << csv_field(ch.name) << "," << ch.fixture << "," << ch.expected << ","
        << csv_field(ch.error.empty() ? ch.computed : "error: " + ch.error) << "," << ch.tolerance << "\n";
    }
  }
  return all ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Double-porosity lattice spin systems: cell problems, bulk densities and limit energies", "dpspin"};
  app.require_subcommand(1);
  Common c;

  std::string model, second, normal, sides, z, eps, field_out, t_list = "8,16", m_list = "8,16";
  std::string fixtures = DPSPIN_FIXTURE_DIR;
  int phase = 0;
  std::int64_t side = 0;

  auto* validate_cmd = app.add_subcommand("validate", "check a model against the structural rules");
  validate_cmd->add_option("model", model, "model JSON")->required();
  auto* components_cmd = app.add_subcommand("components", "periodic connectivity of the hard phases");
  components_cmd->add_option("model", model, "model JSON")->required();
  auto* fhom_cmd = app.add_subcommand("fhom", "interfacial cell values f_T(nu)");
  fhom_cmd->add_option("model", model, "model JSON")->required();
  fhom_cmd->add_option("--phase", phase, "phase (0 = all phases and their total)");
  fhom_cmd->add_option("--normal", normal, "comma-separated rational normal")->required();
  fhom_cmd->add_option("--T", sides, "comma-separated increasing cell sides")->required();
  auto* phi_cmd = app.add_subcommand("phi", "bulk cell values phi_M and the constrained variant");
  phi_cmd->add_option("model", model, "model JSON")->required();
  phi_cmd->add_option("--z", z, "comma-separated spins, one per phase (default: all)");
  phi_cmd->add_option("--M", sides, "comma-separated increasing cube sides")->required();
  auto* energy_cmd = app.add_subcommand("energy", "discrete energy of a spin field");
  energy_cmd->add_option("model", model, "model JSON")->required();
  energy_cmd->add_option("field", second, "field JSON")->required();
  auto* extend_cmd = app.add_subcommand("extend", "coarse-graining extension on an infinite component");
  extend_cmd->add_option("model", model, "model JSON")->required();
  extend_cmd->add_option("field", second, "field JSON")->required();
  extend_cmd->add_option("--phase", phase, "phase")->required();
  extend_cmd->add_option("--M", side, "cube side (multiple of the period)")->required();
  extend_cmd->add_option("--field-out", field_out, "write the extended field here");
  auto* gamma_cmd = app.add_subcommand("gamma-eval", "limit energy of a piecewise-constant target");
  gamma_cmd->add_option("model", model, "model JSON")->required();
  gamma_cmd->add_option("target", second, "target JSON")->required();
  gamma_cmd->add_option("--T", t_list, "cell sides for the surface tension");
  gamma_cmd->add_option("--Mphi", m_list, "cube sides for the bulk density");
  auto* converge_cmd = app.add_subcommand("converge", "recovery energies against the limit energy");
  converge_cmd->add_option("model", model, "model JSON")->required();
  converge_cmd->add_option("target", second, "target JSON")->required();
  converge_cmd->add_option("--eps", eps, "comma-separated decreasing lattice spacings")->required();
  converge_cmd->add_option("--M", side, "cube side of the recovery construction")->required();
  converge_cmd->add_option("--T", t_list, "cell sides for the surface tension");
  converge_cmd->add_option("--Mphi", m_list, "cube sides for the bulk density");
  auto* examples_cmd = app.add_subcommand("examples", "run the bundled fixture suite");
  examples_cmd->add_option("--fixtures", fixtures, "fixture directory");

  for (auto* sub : app.get_subcommands({})) add_common(sub, c);

  try {
    if (auto cap = env_integer("DPSPIN_ENUM_CAP")) c.enum_cap = static_cast<std::size_t>(*cap);
    if (auto cap = env_integer("DPSPIN_COARSEN_CAP")) c.coarsen_cap = static_cast<int>(*cap);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::ostringstream buffer;
  int code = 0;
  try {
    if (*validate_cmd)
      code = cmd_validate(model, c, buffer);
    else if (*components_cmd)
      code = cmd_components(model, c, buffer);
    else if (*fhom_cmd)
      code = cmd_fhom(model, phase, normal, sides, c, buffer, err);
    else if (*phi_cmd)
      code = cmd_phi(model, z, sides, c, buffer);
    else if (*energy_cmd)
      code = cmd_energy(model, second, c, buffer);
    else if (*extend_cmd)
      code = cmd_extend(model, second, phase, side, field_out, c, buffer);
    else if (*gamma_cmd)
      code = cmd_gamma_eval(model, second, t_list, m_list, c, buffer);
    else if (*converge_cmd)
      code = cmd_converge(model, second, eps, side, t_list, m_list, c, buffer);
    else if (*examples_cmd)
      code = cmd_examples(fixtures, c, buffer);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Failure& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (c.out.empty()) {
    out << buffer.str();
  } else {
    std::ofstream f(c.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << c.out << "'\n";
      return 1;
    }
    f << buffer.str();
  }
  return code;
}

}  // namespace dpspin
