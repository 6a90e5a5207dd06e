#include "dpspin/model.hpp"

#include "dpspin/connectivity.hpp"

#include <algorithm>

namespace dpspin {

namespace {

std::vector<Bond>::const_iterator find_offset(const std::vector<Bond>& bonds, const Vec& offset) {
  return std::find_if(bonds.begin(), bonds.end(), [&](const Bond& b) { return b.offset == offset; });
}

std::int64_t sup_norm(const Vec& v) {
  std::int64_t m = 0;
  for (auto c : v) m = std::max<std::int64_t>(m, c < 0 ? -c : c);
  return m;
}

}  // namespace

LatticeModel::LatticeModel(int dimension, int period, int num_phases)
    : residues_(dimension, period),
      num_phases_(num_phases),
      labels_(residues_.size(), 0),
      strong_(residues_.size()),
      weak_(residues_.size()),
      forcing_(residues_.size()) {
  if (num_phases < 1) throw std::invalid_argument("num_phases must be positive");
}

void LatticeModel::set_label(std::size_t residue, int label) { labels_.at(residue) = label; }

void LatticeModel::add_bond(BondKind kind, std::size_t residue, const Vec& offset, const Rational& weight) {
  auto& bonds = (kind == BondKind::Strong ? strong_ : weak_).at(residue);
  if (find_offset(bonds, offset) != bonds.end())
    throw std::invalid_argument("duplicate " + std::string(kind == BondKind::Strong ? "strong" : "weak") +
                                " bond at residue " + residues_.key(residue) + " offset " +
                                format_vec(offset, dimension()));
  bonds.push_back({offset, weight});
}

bool LatticeModel::set_bond_weight(BondKind kind, std::size_t residue, const Vec& offset,
                                   const Rational& weight) {
  auto& bonds = (kind == BondKind::Strong ? strong_ : weak_).at(residue);
  for (auto& b : bonds)
    if (b.offset == offset) {
      b.weight = weight;
      return true;
    }
  return false;
}

void LatticeModel::set_forcing(std::size_t residue, Forcing forcing) { forcing_.at(residue) = std::move(forcing); }

std::optional<Rational> LatticeModel::pair_weight(const Vec& k, const Vec& k2) const {
  const std::size_t r = residues_.index(k);
  const Vec offset = k2 - k;
  if (auto it = find_offset(strong_[r], offset); it != strong_[r].end()) return it->weight;
  if (auto it = find_offset(weak_[r], offset); it != weak_[r].end()) return it->weight;
  return std::nullopt;
}

Rational LatticeModel::max_abs_forcing() const {
  Rational m = 0;
  for (const auto& f : forcing_) m = std::max({m, Rational(abs(f.plus)), Rational(abs(f.minus))});
  return m;
}

Rational LatticeModel::max_abs_weak_weight() const {
  Rational m = 0;
  for (const auto& bonds : weak_)
    for (const auto& b : bonds) m = std::max(m, Rational(abs(b.weight)));
  return m;
}

Rational LatticeModel::max_weak_positive() const {
  Rational m = 0;
  for (const auto& bonds : weak_)
    for (const auto& b : bonds) m = std::max(m, b.weight);
  return m;
}

Rational LatticeModel::max_weak_negative() const {
  Rational m = 0;
  for (const auto& bonds : weak_)
    for (const auto& b : bonds) m = std::max(m, Rational(-b.weight));
  return m;
}

Rational LatticeModel::max_weight() const {
  std::optional<Rational> m;
  for (const auto* table : {&strong_, &weak_})
    for (const auto& bonds : *table)
      for (const auto& b : bonds)
        if (!m || b.weight > *m) m = b.weight;
  return m.value_or(Rational(0));
}

std::size_t LatticeModel::max_weak_neighbourhood() const {
  std::size_t m = 0;
  for (const auto& bonds : weak_) m = std::max(m, bonds.size());
  return m;
}

std::int64_t LatticeModel::weak_range() const {
  std::int64_t m = 0;
  for (const auto& bonds : weak_)
    for (const auto& b : bonds) m = std::max(m, sup_norm(b.offset));
  return m;
}

std::int64_t LatticeModel::strong_range() const {
  std::int64_t m = 0;
  for (const auto& bonds : strong_)
    for (const auto& b : bonds) m = std::max(m, sup_norm(b.offset));
  return m;
}

bool operator==(const LatticeModel& a, const LatticeModel& b) {
  if (a.dimension() != b.dimension() || a.period() != b.period() || a.num_phases_ != b.num_phases_) return false;
  if (a.labels_ != b.labels_) return false;
  auto same_bonds = [](const std::vector<std::vector<Bond>>& x, const std::vector<std::vector<Bond>>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t r = 0; r < x.size(); ++r) {
      if (x[r].size() != y[r].size()) return false;
      for (const auto& bond : x[r]) {
        auto it = find_offset(y[r], bond.offset);
        if (it == y[r].end() || it->weight != bond.weight) return false;
      }
    }
    return true;
  };
  if (!same_bonds(a.strong_, b.strong_) || !same_bonds(a.weak_, b.weak_)) return false;
  for (std::size_t r = 0; r < a.forcing_.size(); ++r)
    if (a.forcing_[r].plus != b.forcing_[r].plus || a.forcing_[r].minus != b.forcing_[r].minus) return false;
  return true;
}

bool ValidationReport::has_rule(std::string_view rule) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

ValidationReport validate_local(const LatticeModel& model) {
  ValidationReport report;
  const auto& rs = model.residues();
  const int d = model.dimension();
  auto add = [&](std::string rule, std::string witness, std::string message) {
    report.violations.push_back({std::move(rule), std::move(witness), std::move(message)});
  };
  auto bond_witness = [&](std::size_t r, const Vec& offset) {
    return "residue " + rs.key(r) + " offset " + format_vec(offset, d);
  };

  std::vector<std::size_t> phase_count(static_cast<std::size_t>(model.num_phases()) + 1, 0);
  for (std::size_t r = 0; r < rs.size(); ++r) {
    const int j = model.label(r);
    if (j < 0 || j > model.num_phases()) {
      add("label-range", "residue " + rs.key(r),
          "label " + std::to_string(j) + " outside 0.." + std::to_string(model.num_phases()));
      continue;
    }
    ++phase_count[static_cast<std::size_t>(j)];
  }
  for (int j = 1; j <= model.num_phases(); ++j)
    if (phase_count[static_cast<std::size_t>(j)] == 0)
      add("empty-phase", "phase " + std::to_string(j), "no residue carries this hard-phase label");

  for (std::size_t r = 0; r < rs.size(); ++r) {
    const Vec k = rs.coords(r);
    const int j = model.label(r);
    for (const auto& bond : model.strong_bonds(r)) {
      const Vec target = k + bond.offset;
      const std::size_t rt = rs.index(target);
      if (is_zero(bond.offset)) {
        add("zero-offset", bond_witness(r, bond.offset), "offset 0 is implicit and may not be declared");
        continue;
      }
      if (j == 0) {
        add("strong-from-soft", bond_witness(r, bond.offset), "strong bond declared at a soft (label 0) residue");
        continue;
      }
      if (model.label(rt) != j) {
        add("hard-phase-closure", bond_witness(r, bond.offset),
            "strong bond leaves phase " + std::to_string(j) + " (target label " + std::to_string(model.label(rt)) +
                ")");
        continue;
      }
      const auto& back = model.strong_bonds(rt);
      auto it = std::find_if(back.begin(), back.end(), [&](const Bond& b) { return b.offset == -bond.offset; });
      if (it == back.end())
        add("hard-phase-closure", bond_witness(r, bond.offset),
            "reverse offset missing at residue " + rs.key(rt));
      else if (it->weight != bond.weight)
        add("symmetry", bond_witness(r, bond.offset),
            "weight " + format_rational(bond.weight) + " differs from reverse weight " + format_rational(it->weight));
      if (bond.weight <= 0)
        add("strong-positivity", bond_witness(r, bond.offset),
            "strong weight " + format_rational(bond.weight) + " is not positive");
    }
    for (const auto& bond : model.weak_bonds(r)) {
      const Vec target = k + bond.offset;
      const std::size_t rt = rs.index(target);
      if (is_zero(bond.offset)) {
        add("zero-offset", bond_witness(r, bond.offset), "offset 0 is implicit and may not be declared");
        continue;
      }
      const int jt = model.label(rt);
      if (!(j == 0 || jt == 0 || j != jt))
        add("weak-admissibility", bond_witness(r, bond.offset),
            "weak bond joins two sites of hard phase " + std::to_string(j));
      const auto& back = model.weak_bonds(rt);
      auto it = std::find_if(back.begin(), back.end(), [&](const Bond& b) { return b.offset == -bond.offset; });
      if (it == back.end())
        add("symmetry", bond_witness(r, bond.offset), "reverse weak bond missing at residue " + rs.key(rt));
      else if (it->weight != bond.weight)
        add("symmetry", bond_witness(r, bond.offset),
            "weight " + format_rational(bond.weight) + " differs from reverse weight " + format_rational(it->weight));
    }
  }
  return report;
}

ValidationReport validate(const LatticeModel& model) {
  ValidationReport report = validate_local(model);
  // Connectivity needs labels in range and closed hard phases.
  if (report.has_rule("label-range") || report.has_rule("hard-phase-closure") || report.has_rule("strong-from-soft"))
    return report;
  ClassifyOptions options;
  options.compute_coarsening = false;
  const ConnectivitySummary summary = classify(model, options);
  for (const auto& v : summary.violations) report.violations.push_back(v);

  const auto& rs = model.residues();
  for (std::size_t r = 0; r < rs.size(); ++r) {
    if (!summary.in_infinite_component(r)) continue;
    for (const auto& bond : model.strong_bonds(r))
      if (bond.weight <= 0)
        report.violations.push_back({"coerciveness",
                                     "residue " + rs.key(r) + " offset " + format_vec(bond.offset, model.dimension()),
                                     "strong weight " + format_rational(bond.weight) +
                                         " on the infinite component is not bounded below by a positive constant"});
  }
  return report;
}

}  // namespace dpspin
