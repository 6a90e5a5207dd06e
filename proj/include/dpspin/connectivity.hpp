#pragma once

// Periodic connectivity of the hard phases. Each phase is studied on the quotient
// torus Z^d / T Z^d: residues are vertices, strong offsets are edges labelled by the
// period cell they cross into. The subgroup H of Z^d generated by cycle labels
// decides how a quotient component lifts: H = {0} gives finite islands, H = Z^d a
// single infinite component, anything else several infinite ones.

#include "dpspin/lattice.hpp"
#include "dpspin/model.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace dpspin {

enum class ComponentClass { InfiniteUnique, InfiniteMultiple, Finite };

const char* to_string(ComponentClass c);

struct PeriodicComponent {
  int phase = 0;
  std::vector<std::size_t> residues;
  /// Hermite-reduced generator rows of the displacement subgroup (in units of periods).
  std::vector<Vec> displacement_basis;
  /// [Z^d : H] when H has full rank, 0 otherwise.
  std::int64_t displacement_index = 0;
  ComponentClass classification = ComponentClass::Finite;
  /// One materialized lift (finite components only).
  std::vector<Vec> lift;
  std::optional<std::int64_t> lift_diameter_sq;

  int rank() const { return static_cast<int>(displacement_basis.size()); }
};

struct ConnectivitySummary {
  ResidueSpace residues;
  /// phases[j - 1] lists the quotient components of A_j.
  std::vector<std::vector<PeriodicComponent>> phases;
  /// Index of C_j inside phases[j - 1], or -1 when C_j is missing or ambiguous.
  std::vector<int> infinite_component;
  std::vector<int> labels;
  /// Per residue: component index within its phase (-1 for soft residues).
  std::vector<int> component_of;
  /// Per residue: period-cell offset of the residue in its component's reference lift.
  std::vector<Vec> potential;
  /// K_j = #(C_j residues) / T^d.
  std::vector<Rational> densities;
  /// R^2, the squared Euclidean diameter of the largest island (0 without islands).
  std::int64_t island_radius_sq = 0;
  /// M0 per phase; empty when not computed or when the search hit its cap.
  std::vector<std::optional<std::int64_t>> coarsening_side;
  std::vector<Violation> violations;

  double island_radius() const;
  bool in_infinite_component(std::size_t residue) const;
  bool in_infinite_component(const Vec& site) const { return in_infinite_component(residues.index(site)); }
  /// True when the site belongs to a finite component (an island) of some hard phase.
  bool in_island(const Vec& site) const;
  /// Component containing the residue, or nullptr for soft residues.
  const PeriodicComponent* component_at(std::size_t residue) const;
};

struct ClassifyOptions {
  bool compute_coarsening = true;
  /// The coarsening search stops at cap_multiple * T.
  int coarsening_cap_multiple = 64;
};

ConnectivitySummary classify(const LatticeModel& model, const ClassifyOptions& options = {});

class CoarseningCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True when any two C_j sites in every M-cube (all T^d anchor classes) are joined
/// by a strong path inside the concentric 3M-cube.
bool cube_connectivity_holds(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                             std::int64_t side);

/// Smallest multiple of T satisfying cube_connectivity_holds. Throws CoarseningCapExceeded.
std::int64_t coarsening_side(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                             int cap_multiple = 64);

/// D_M restricted to Q_M: sites of islands that meet Q_M but miss Q_{M-R}. Sorted.
std::vector<Vec> excluded_set(const LatticeModel& model, const ConnectivitySummary& summary, std::int64_t side);

/// Smallest strong weight on the infinite components (the coercivity constant).
std::optional<Rational> coercivity_floor(const LatticeModel& model, const ConnectivitySummary& summary);

/// Hermite-reduced basis of the subgroup of Z^d generated by the given vectors.
std::vector<Vec> hermite_basis(std::vector<Vec> generators, int dimension);

}  // namespace dpspin
