#pragma once

#include "dpspin/lattice.hpp"
#include "dpspin/rational.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dpspin {

enum class Spin : std::int8_t { Plus = 1, Minus = -1 };

inline int value(Spin s) { return static_cast<int>(s); }
inline Spin flip(Spin s) { return s == Spin::Plus ? Spin::Minus : Spin::Plus; }
inline Spin spin_from_int(long v) {
  if (v == 1) return Spin::Plus;
  if (v == -1) return Spin::Minus;
  throw std::invalid_argument("spin must be +1 or -1, got " + std::to_string(v));
}

enum class BondKind { Strong, Weak };

struct Bond {
  Vec offset{};
  Rational weight;
};

struct Forcing {
  Rational plus = 0;
  Rational minus = 0;
  const Rational& at(Spin z) const { return z == Spin::Plus ? plus : minus; }
};

/// T-periodic interaction system: labels J, neighbourhoods P^j with coefficients
/// a_{k,k+i}, and forcing g, all stored per residue class.
///
/// Energies use the ordered-pair convention: every declared directed bond is one
/// summand, so a symmetric unordered bond with directed weight w costs 8w when broken.
class LatticeModel {
 public:
  LatticeModel() = default;
  LatticeModel(int dimension, int period, int num_phases);

  int dimension() const { return residues_.dimension(); }
  int period() const { return residues_.period(); }
  int num_phases() const { return num_phases_; }
  const ResidueSpace& residues() const { return residues_; }
  std::size_t num_residues() const { return residues_.size(); }

  int label(std::size_t residue) const { return labels_[residue]; }
  int label_at(const Vec& site) const { return labels_[residues_.index(site)]; }
  const std::vector<Bond>& strong_bonds(std::size_t residue) const { return strong_[residue]; }
  const std::vector<Bond>& weak_bonds(std::size_t residue) const { return weak_[residue]; }
  const Forcing& forcing(std::size_t residue) const { return forcing_[residue]; }

  void set_label(std::size_t residue, int label);
  /// Throws std::invalid_argument on a duplicate (residue, offset) of the same kind.
  void add_bond(BondKind kind, std::size_t residue, const Vec& offset, const Rational& weight);
  void set_forcing(std::size_t residue, Forcing forcing);
  /// Replaces the weight of an existing bond; returns false if absent.
  bool set_bond_weight(BondKind kind, std::size_t residue, const Vec& offset, const Rational& weight);

  /// a_{k,k2}, or nothing when k2 - k is not a declared offset at k mod T.
  std::optional<Rational> pair_weight(const Vec& k, const Vec& k2) const;
  /// g(k mod T, z).
  const Rational& forcing_value(const Vec& k, Spin z) const { return forcing_[residues_.index(k)].at(z); }

  Rational max_abs_forcing() const;
  /// Largest |a| over weak bonds (0 when there are none).
  Rational max_abs_weak_weight() const;
  /// Largest positive / negative part of weak weights.
  Rational max_weak_positive() const;
  Rational max_weak_negative() const;
  /// Largest a over all bonds.
  Rational max_weight() const;
  /// Largest number of weak offsets declared at one residue.
  std::size_t max_weak_neighbourhood() const;
  /// Largest sup-norm of a weak offset.
  std::int64_t weak_range() const;
  /// Largest sup-norm of a strong offset.
  std::int64_t strong_range() const;

  friend bool operator==(const LatticeModel& a, const LatticeModel& b);

 private:
  ResidueSpace residues_;
  int num_phases_ = 0;
  std::vector<int> labels_;
  std::vector<std::vector<Bond>> strong_;
  std::vector<std::vector<Bond>> weak_;
  std::vector<Forcing> forcing_;
};

struct Violation {
  std::string rule;
  std::string witness;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool passed() const { return violations.empty(); }
  bool has_rule(std::string_view rule) const;
};

/// Local rules only (labels, closure, symmetry, admissibility, positivity of strong weights).
ValidationReport validate_local(const LatticeModel& model);
/// Local rules plus coerciveness on C_j and the unique-infinite-component rule.
ValidationReport validate(const LatticeModel& model);

class ModelParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the JSON model document. Shape errors name the offending field path.
LatticeModel parse_model(std::string_view document);
LatticeModel load_model(const std::string& path);
std::string serialize_model(const LatticeModel& model);

}  // namespace dpspin
