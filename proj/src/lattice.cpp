#include "dpspin/lattice.hpp"

#include <stdexcept>

namespace dpspin {

std::string format_vec(const Vec& v, int dimension, char sep) {
  std::string s;
  for (int i = 0; i < dimension; ++i) {
    if (i) s += sep;
    s += std::to_string(v[i]);
  }
  return s;
}

ResidueSpace::ResidueSpace(int dimension, int period) : dimension_(dimension), period_(period), size_(1) {
  if (dimension < 1 || dimension > kMaxDimension)
    throw std::invalid_argument("dimension must lie in 1.." + std::to_string(kMaxDimension));
  if (period < 1) throw std::invalid_argument("period must be positive");
  for (int i = 0; i < dimension; ++i) size_ *= static_cast<std::size_t>(period);
}

std::size_t ResidueSpace::index(const Vec& site) const {
  std::size_t idx = 0;
  for (int i = 0; i < dimension_; ++i)
    idx = idx * static_cast<std::size_t>(period_) + static_cast<std::size_t>(floor_mod(site[i], period_));
  return idx;
}

Vec ResidueSpace::coords(std::size_t index) const {
  Vec v{};
  for (int i = dimension_ - 1; i >= 0; --i) {
    v[i] = static_cast<std::int64_t>(index % static_cast<std::size_t>(period_));
    index /= static_cast<std::size_t>(period_);
  }
  return v;
}

Vec ResidueSpace::cell(const Vec& site) const {
  Vec v{};
  for (int i = 0; i < dimension_; ++i) v[i] = floor_div(site[i], period_);
  return v;
}

SiteBox::SiteBox(int dimension, Vec lo, Vec hi) : dimension_(dimension), lo_(lo), hi_(hi), size_(1) {
  for (int i = dimension; i < kMaxDimension; ++i) lo_[i] = hi_[i] = 0;
  for (int i = 0; i < dimension; ++i) {
    if (hi_[i] < lo_[i]) {
      size_ = 0;
      return;
    }
    size_ *= static_cast<std::size_t>(hi_[i] - lo_[i] + 1);
  }
}

SiteBox SiteBox::cube(int dimension, const Vec& lo, std::int64_t side) {
  Vec hi = lo;
  for (int i = 0; i < dimension; ++i) hi[i] = lo[i] + side - 1;
  return SiteBox(dimension, lo, hi);
}

SiteBox SiteBox::centered_cube(int dimension, std::int64_t side) {
  // -side/2 <= k < side/2  <=>  -floor(side/2) <= k <= ceil(side/2) - 1
  Vec lo{}, hi{};
  for (int i = 0; i < dimension; ++i) {
    lo[i] = -(side / 2);
    hi[i] = (side + 1) / 2 - 1;
  }
  return SiteBox(dimension, lo, hi);
}

bool SiteBox::contains(const Vec& site) const {
  if (size_ == 0) return false;
  for (int i = 0; i < dimension_; ++i)
    if (site[i] < lo_[i] || site[i] > hi_[i]) return false;
  return true;
}

std::size_t SiteBox::index(const Vec& site) const {
  std::size_t idx = 0;
  for (int i = 0; i < dimension_; ++i)
    idx = idx * static_cast<std::size_t>(extent(i)) + static_cast<std::size_t>(site[i] - lo_[i]);
  return idx;
}

Vec SiteBox::site(std::size_t index) const {
  Vec v{};
  for (int i = dimension_ - 1; i >= 0; --i) {
    auto e = static_cast<std::size_t>(extent(i));
    v[i] = lo_[i] + static_cast<std::int64_t>(index % e);
    index /= e;
  }
  return v;
}

bool SiteBox::covers(const SiteBox& other) const {
  if (other.empty()) return true;
  if (empty()) return false;
  for (int i = 0; i < dimension_; ++i)
    if (other.lo_[i] < lo_[i] || other.hi_[i] > hi_[i]) return false;
  return true;
}

void for_each_in_box(int dimension, const Vec& lo, const Vec& hi, const std::function<void(const Vec&)>& fn) {
  SiteBox box(dimension, lo, hi);
  for (std::size_t i = 0; i < box.size(); ++i) fn(box.site(i));
}

}  // namespace dpspin
