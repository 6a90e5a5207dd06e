#pragma once

// Exact and heuristic minimization of finite binary quadratic energies
//
//   E(x) = sum_{(u,v,w)} w (x_u - x_v)^2 + sum_u h_u(x_u),   x in {+1,-1}^V,
//
// with some variables fixed and some forced equal (equality groups).

#include "dpspin/model.hpp"
#include "dpspin/rational.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace dpspin {

struct PairTerm {
  std::size_t u = 0;
  std::size_t v = 0;
  Rational weight;
};

struct UnaryTerm {
  Rational plus = 0;
  Rational minus = 0;
};

class GroundStateInstance {
 public:
  GroundStateInstance() = default;
  explicit GroundStateInstance(std::size_t num_variables);

  std::size_t num_variables() const { return fixed_.size(); }

  void fix(std::size_t v, Spin value) { fixed_.at(v) = value; }
  void add_pair(std::size_t u, std::size_t v, const Rational& weight);
  void add_unary(std::size_t v, const Rational& plus, const Rational& minus);
  /// Variables sharing a group id are forced equal. Ids are arbitrary integers.
  void set_group(std::size_t v, std::size_t group_id) { group_.at(v) = group_id; }

  const std::vector<std::optional<Spin>>& fixed() const { return fixed_; }
  const std::vector<PairTerm>& pairs() const { return pairs_; }
  const std::vector<UnaryTerm>& unary() const { return unary_; }
  const std::vector<std::size_t>& groups() const { return group_; }

 private:
  std::vector<std::optional<Spin>> fixed_;
  std::vector<PairTerm> pairs_;
  std::vector<UnaryTerm> unary_;
  std::vector<std::size_t> group_;
};

enum class SolveMethod { Direct, Enumeration, MinCut, Annealing };

const char* to_string(SolveMethod m);

struct Solution {
  std::vector<Spin> assignment;
  Rational energy;
  double energy_value = 0.0;
  SolveMethod method = SolveMethod::Direct;
  bool exact = true;
  std::size_t free_groups = 0;
};

class InstanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class EnumerationCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NonSubmodularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultEnumerationCap = 24;

/// Sum of pair and unary terms. Throws InstanceError when the assignment has the
/// wrong size or violates a fixed value or an equality group.
Rational energy(const GroundStateInstance& instance, std::span<const Spin> assignment);

/// Number of equality groups that carry no fixed value.
std::size_t count_free_groups(const GroundStateInstance& instance);

/// Exhaustive search; ties go to the lexicographically smallest assignment (+1 before -1).
Solution minimize_enum(const GroundStateInstance& instance, std::size_t cap = kDefaultEnumerationCap);

/// Max-flow/min-cut. Requires nonnegative aggregate coupling between free groups.
Solution minimize_cut(const GroundStateInstance& instance);

/// True when every coupling between two free groups is nonnegative.
bool is_submodular(const GroundStateInstance& instance);

/// True when flipping a subset of free groups makes the instance submodular
/// (the signed coupling graph is balanced).
bool is_switchable(const GroundStateInstance& instance);

/// Min-cut after the spin-flip gauge that makes all couplings nonnegative.
Solution minimize_switched_cut(const GroundStateInstance& instance);

struct AnnealSchedule {
  std::size_t sweeps = 4000;
  /// Start/end temperatures as multiples of the largest single-flip energy change.
  double start_temperature = 2.0;
  double end_temperature = 1e-3;
};

/// Metropolis annealing with geometric cooling. Deterministic for a given seed.
Solution minimize_anneal(const GroundStateInstance& instance, std::uint64_t seed,
                         const AnnealSchedule& schedule = {});

struct SolveOptions {
  std::size_t enumeration_cap = kDefaultEnumerationCap;
  bool allow_anneal = false;
  std::uint64_t seed = 1;
  AnnealSchedule schedule;
};

/// Enumeration when small, else min-cut (directly or after switching), else
/// annealing when allowed. Throws NonSubmodularError otherwise.
Solution minimize(const GroundStateInstance& instance, const SolveOptions& options = {});

}  // namespace dpspin
