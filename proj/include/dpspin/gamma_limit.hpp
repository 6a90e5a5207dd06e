#pragma once

// Scaled discrete energies on eps Z^d inside a box, the coarse-graining extension
// on the infinite components, the limit functional on piecewise-constant targets,
// and the recovery construction used for convergence experiments.

#include "dpspin/bulk_density.hpp"
#include "dpspin/connectivity.hpp"
#include "dpspin/geometry.hpp"
#include "dpspin/model.hpp"
#include "dpspin/surface_tension.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dpspin {

/// Lattice sites k with lo < eps k < hi componentwise.
SiteBox scaled_sites(const DomainSpec& domain, const Rational& eps);

struct SpinField {
  Rational eps;
  DomainSpec domain;
  SiteBox sites;
  std::vector<Spin> values;  // indexed like sites

  Spin at(const Vec& k) const { return values[sites.index(k)]; }
};

SpinField constant_field(const DomainSpec& domain, const Rational& eps, Spin value);
/// Throws std::invalid_argument when values do not cover Z^eps(domain) exactly.
void check_field(const SpinField& field, int dimension);

/// Strong pairs weighted by eps^(d-1), weak pairs and forcing by eps^d; ordered pairs
/// with both endpoints in the field's domain.
Rational F_eps(const LatticeModel& model, const SpinField& field);

/// Unordered strong bonds of C_j with both ends in the field and different spins.
std::size_t broken_strong_bonds(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                                const SpinField& field);

struct ExtensionResult {
  SpinField field;
  std::size_t marked = 0;  // cubes of the family where the field is not constant on C_j
  std::size_t family = 0;  // cubes whose 3M neighbourhood lies in the domain
  std::int64_t side = 0;
};

class ExtensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Cubes zM + {0..M-1}^d whose concentric 3M cube lies inside the site box are set
/// to the common value of the field on C_j when there is one, and counted otherwise.
/// Requires M to be a multiple of T and at least the coarsening side of phase j.
ExtensionResult extend(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                       const SpinField& field, std::int64_t side);

class MissingTableEntry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// f_hom per (phase, direction of the normal).
class SurfaceTable {
 public:
  void set(int phase, const RationalVector& normal, double value);
  /// Tries nu, then -nu.
  std::optional<double> lookup(int phase, const RationalVector& normal) const;
  bool empty() const { return values_.empty(); }

 private:
  std::map<std::pair<int, std::vector<std::int64_t>>, double> values_;
};

/// phi per spin vector.
class PhiTable {
 public:
  void set(const SpinVector& z, double value) { values_[z] = value; }
  std::optional<double> lookup(const SpinVector& z) const;

 private:
  std::map<SpinVector, double> values_;
};

struct FhomValue {
  double surface = 0;
  double bulk = 0;
  double total() const { return surface + bulk; }
};

/// Sum of f_hom(nu) times interface measure plus phi(z) times constancy volume.
/// Throws MissingTableEntry naming the missing (phase, normal) or z.
FhomValue F_hom(const MultiphaseTarget& target, const SurfaceTable& surface, const PhiTable& phi);

/// Spin vectors with positive volume in the target, and the interface normals it uses.
std::vector<SpinVector> required_spin_vectors(const MultiphaseTarget& target);
std::vector<std::pair<int, RationalVector>> required_normals(const MultiphaseTarget& target);

/// Builds surface and phi tables for a target from cell problems.
struct TableOptions {
  std::vector<std::int64_t> cell_sides{8, 16};
  std::vector<std::int64_t> cube_sides{8, 16};
  SolveOptions solve;
  unsigned jobs = 1;
};
std::pair<SurfaceTable, PhiTable> compute_tables(const LatticeModel& model, const ConnectivitySummary& summary,
                                                 const MultiphaseTarget& target, const TableOptions& options);

/// Recovery field: C_j sites follow the target at eps k; each centred cube zM + Q_M
/// inside the site box whose 3M neighbourhood sees a single spin vector on the C_j
/// receives the constrained bulk minimizer for that vector; all other sites are +1.
SpinField recovery_config(const LatticeModel& model, const ConnectivitySummary& summary,
                          const MultiphaseTarget& target, const Rational& eps, std::int64_t side,
                          const SolveOptions& options = {});

struct ConvergenceRow {
  Rational eps;
  Rational energy;
  double gap = 0;
};

struct ConvergenceReport {
  FhomValue reference;
  std::vector<ConvergenceRow> rows;
  bool gaps_decreasing = true;
};

ConvergenceReport converge_report(const LatticeModel& model, const ConnectivitySummary& summary,
                                  const MultiphaseTarget& target, const std::vector<Rational>& eps_list,
                                  std::int64_t side, const SurfaceTable& surface, const PhiTable& phi,
                                  const SolveOptions& options = {}, unsigned jobs = 1);

}  // namespace dpspin
