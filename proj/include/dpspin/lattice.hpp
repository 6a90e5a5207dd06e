#pragma once

// Integer lattice primitives shared by every module: fixed-capacity coordinate
// vectors, residue arithmetic modulo the period, and rectangular site boxes.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace dpspin {

inline constexpr int kMaxDimension = 4;

/// Integer vector in Z^d; components beyond the dimension are kept at zero.
using Vec = std::array<std::int64_t, kMaxDimension>;

inline Vec operator+(Vec a, const Vec& b) {
  for (int i = 0; i < kMaxDimension; ++i) a[i] += b[i];
  return a;
}
inline Vec operator-(Vec a, const Vec& b) {
  for (int i = 0; i < kMaxDimension; ++i) a[i] -= b[i];
  return a;
}
inline Vec operator-(Vec a) {
  for (auto& c : a) c = -c;
  return a;
}
inline Vec scaled(Vec a, std::int64_t s) {
  for (auto& c : a) c *= s;
  return a;
}

inline bool is_zero(const Vec& v) {
  for (auto c : v)
    if (c != 0) return false;
  return true;
}

inline std::int64_t dot(const Vec& a, const Vec& b) {
  std::int64_t s = 0;
  for (int i = 0; i < kMaxDimension; ++i) s += a[i] * b[i];
  return s;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
inline std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - b * floor_div(a, b); }

std::string format_vec(const Vec& v, int dimension, char sep = ',');

struct VecHash {
  std::size_t operator()(const Vec& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto c : v) h = (h ^ static_cast<std::size_t>(c)) * 1099511628211ull;
    return h;
  }
};

/// Residue classes of Z^d modulo T Z^d, indexed 0..T^d-1 (first coordinate slowest).
class ResidueSpace {
 public:
  ResidueSpace() = default;
  ResidueSpace(int dimension, int period);

  int dimension() const { return dimension_; }
  int period() const { return period_; }
  std::size_t size() const { return size_; }

  std::size_t index(const Vec& site) const;
  Vec coords(std::size_t index) const;
  /// Componentwise floor(site / T): which period cell the site lies in.
  Vec cell(const Vec& site) const;
  std::string key(std::size_t index) const { return format_vec(coords(index), dimension_); }

 private:
  int dimension_ = 0;
  int period_ = 1;
  std::size_t size_ = 0;
};

/// Inclusive integer box lo..hi in d dimensions, enumerated first-coordinate-slowest.
class SiteBox {
 public:
  SiteBox() = default;
  SiteBox(int dimension, Vec lo, Vec hi);

  /// [lo, lo + side) in every direction.
  static SiteBox cube(int dimension, const Vec& lo, std::int64_t side);
  /// Q_M = [-M/2, M/2)^d intersected with Z^d.
  static SiteBox centered_cube(int dimension, std::int64_t side);

  int dimension() const { return dimension_; }
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  bool contains(const Vec& site) const;
  std::size_t index(const Vec& site) const;
  Vec site(std::size_t index) const;
  std::int64_t extent(int axis) const { return hi_[axis] - lo_[axis] + 1; }

  SiteBox translated(const Vec& shift) const { return SiteBox(dimension_, lo_ + shift, hi_ + shift); }
  /// True when every site of other lies in this box.
  bool covers(const SiteBox& other) const;

 private:
  int dimension_ = 0;
  Vec lo_{};
  Vec hi_{};
  std::size_t size_ = 0;
};

/// Calls fn(v) for every v in {lo..hi} componentwise (first coordinate slowest).
void for_each_in_box(int dimension, const Vec& lo, const Vec& hi, const std::function<void(const Vec&)>& fn);

}  // namespace dpspin
