#pragma once

// Bulk cell problems: with every infinite hard component frozen to a constant spin
// z_j, optimize the soft sites and islands of the cube Q_M = [-M/2, M/2)^d.

#include "dpspin/connectivity.hpp"
#include "dpspin/ground_state.hpp"
#include "dpspin/model.hpp"
#include "dpspin/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dpspin {

using SpinVector = std::vector<Spin>;

SpinVector parse_spin_vector(const std::string& text);
std::string format_spin_vector(const SpinVector& z);

struct PhiValue {
  std::int64_t side = 0;
  Rational value;  // minimum / M^d
  Rational minimum;
  /// Minimizer on Q_M, indexed like SiteBox::centered_cube(d, M).
  std::vector<Spin> configuration;
  std::size_t free_groups = 0;
  SolveMethod method = SolveMethod::Direct;
  bool exact = true;
};

/// The instance behind phi_M (constrained = false) or its D_M-constrained variant.
GroundStateInstance bulk_instance(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z,
                                  std::int64_t side, bool constrained);

PhiValue phi_M(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z, std::int64_t side,
               const SolveOptions& options = {});
PhiValue phi_tilde_M(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z,
                     std::int64_t side, const SolveOptions& options = {});

/// The island constant c = 2^d R (#P0 max a + 2 max|g|), with max a over weak pairs
/// and #P0 the largest weak neighbourhood. R is irrational in general, so c is kept
/// as factor * sqrt(R^2) and compared exactly through squares.
struct IslandConstant {
  Rational factor;  // 2^d (#P0 max a + 2 max|g|); c = factor * R
  std::int64_t radius_sq = 0;
  double value() const;
};
IslandConstant island_constant(const LatticeModel& model, const ConnectivitySummary& summary);
/// Same shape with 8 #P0 max|a| in place of #P0 max a: every ordered weak pair costs
/// at most 4|a| and is seen from both ends.
IslandConstant island_constant_strict(const LatticeModel& model, const ConnectivitySummary& summary);

/// Exact test of difference <= c / M.
bool within_island_bound(const Rational& difference, const IslandConstant& c, std::int64_t side);

/// Constants of the tiling bracket phi_M - c_minus/M <= phi <= phi~_M + c_plus/M
/// (valid for M a multiple of T): c_pm = 8 d r #P0 max(a_pm) with r the weak range.
struct TilingConstants {
  Rational plus;
  Rational minus;
};
TilingConstants tiling_constants(const LatticeModel& model);

struct PhiEntry {
  std::int64_t side = 0;
  PhiValue phi;
  PhiValue phi_tilde;
  bool tilde_above = true;   // phi~_M >= phi_M
  bool island_bound = true;  // phi_M >= phi~_M - c/M with the island constant
  bool island_bound_strict = true;
};

struct MonotonicityCheck {
  std::int64_t side = 0;
  std::int64_t multiple = 0;
  Rational smaller;  // phi_M
  Rational larger;   // phi_KM
  bool holds = true;
};

struct PhiRow {
  SpinVector z;
  std::vector<PhiEntry> entries;
  std::vector<MonotonicityCheck> monotonicity;
  IslandConstant constant;
  IslandConstant constant_strict;
  TilingConstants tiling;
  Rational lower;     // phi_M - c_minus / M at the last M
  Rational upper;     // phi~_M + c_plus / M at the last M
  Rational estimate;  // phi_M at the last M
  bool bracket_valid = true;  // last M is a multiple of T
};

PhiRow phi_estimate(const LatticeModel& model, const ConnectivitySummary& summary, const SpinVector& z,
                    const std::vector<std::int64_t>& sides, const SolveOptions& options = {}, unsigned jobs = 1);

/// Every z in {+1,-1}^N in lexicographic order (+1 first).
std::vector<SpinVector> all_spin_vectors(int num_phases);

}  // namespace dpspin
