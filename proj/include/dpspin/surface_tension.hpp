#pragma once

// Interfacial cell problems on a phase's infinite component: the minimal strong
// energy in a cube Q^nu_T oriented along nu, with the outside frozen to +1 on the
// half-space <k,nu> > 0 and to -1 on the rest, normalized by T^(d-1).

#include "dpspin/connectivity.hpp"
#include "dpspin/ground_state.hpp"
#include "dpspin/model.hpp"
#include "dpspin/rational.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace dpspin {

using RationalVector = std::vector<Rational>;

/// Parses "1,0" or "1/2,-3" into a rational vector.
RationalVector parse_rational_vector(const std::string& text);
std::string format_rational_vector(const RationalVector& v);

/// Lattice points of the closed cube of side T centred at 0 with one face normal to nu.
std::vector<Vec> oriented_cube(int dimension, const RationalVector& normal, std::int64_t side);

/// nu followed by a rational orthogonal completion (Gram-Schmidt against the unit vectors).
std::vector<RationalVector> orthogonal_frame(const RationalVector& normal, int dimension);

struct CellValue {
  std::int64_t side = 0;
  Rational value;    // minimum / T^(d-1)
  Rational minimum;
  std::size_t free_sites = 0;
  bool below_coarsening = false;
};

CellValue cell_value(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                     const RationalVector& normal, std::int64_t side);

struct SurfaceRow {
  int phase = 0;
  RationalVector normal;
  std::vector<CellValue> values;
  Rational estimate;
  Rational increment;
};

/// Cell values for an increasing list of at least two sides (computed in parallel),
/// the last value, and |f_last - f_prev|.
SurfaceRow fhom_estimate(const LatticeModel& model, const ConnectivitySummary& summary, int phase,
                         const RationalVector& normal, const std::vector<std::int64_t>& sides, unsigned jobs = 1);

/// Sum over phases of fhom_estimate.
Rational fhom_total(const LatticeModel& model, const ConnectivitySummary& summary, const RationalVector& normal,
                    const std::vector<std::int64_t>& sides, unsigned jobs = 1);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace dpspin
