#pragma once

// Piecewise-constant multiphase targets on a box: each phase is +1 on a half-space
// or on a finite union of axis-aligned boxes. Exposes the flat interface pieces with
// their normals and measures, and the volumes of the regions where the spin vector
// is constant.

#include "dpspin/bulk_density.hpp"
#include "dpspin/rational.hpp"
#include "dpspin/surface_tension.hpp"

#include <variant>
#include <vector>

namespace dpspin {

/// Open box (lo_1, hi_1) x ... x (lo_d, hi_d).
struct DomainSpec {
  RationalVector lo;
  RationalVector hi;

  int dimension() const { return static_cast<int>(lo.size()); }
  Rational volume() const;
  /// Throws std::invalid_argument on an empty or malformed box.
  void check() const;
};

/// +1 where <x, normal> > offset, -1 elsewhere.
struct Slab {
  RationalVector normal;
  Rational offset;
};

/// Half-open box [lo, hi).
struct AxisBox {
  RationalVector lo;
  RationalVector hi;
};

/// +1 on the union of the boxes, -1 elsewhere.
using BoxUnion = std::vector<AxisBox>;

using PhaseTarget = std::variant<Slab, BoxUnion>;

struct MultiphaseTarget {
  DomainSpec domain;
  std::vector<PhaseTarget> phases;
};

Spin target_value(const PhaseTarget& target, const RationalVector& x);

/// Integer vector with coprime entries pointing the same way as v (v nonzero).
std::vector<std::int64_t> primitive_direction(const RationalVector& v);

struct InterfacePiece {
  int phase = 0;
  /// Points toward the +1 side.
  RationalVector normal;
  double measure = 0;
};

/// Interfaces inside the open domain, merged per (phase, direction) and sorted.
std::vector<InterfacePiece> interface_pieces(const MultiphaseTarget& target);

struct ConstancyCell {
  SpinVector z;
  double volume = 0;
};

/// Volume of each spin vector realized in the domain (zero-volume vectors omitted), sorted by z.
std::vector<ConstancyCell> constancy_cells(const MultiphaseTarget& target);

}  // namespace dpspin
