#ifndef HEUN_ROOTS_HPP
#define HEUN_ROOTS_HPP

#include "heun/errors.hpp"
#include "heun/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace heun {

/// Real, pairwise distinct roots z_1 < ... < z_n of a candidate polynomial solution.
template <Scalar S>
class RootSet {
 public:
  RootSet() = default;

  /// Sorts `roots`; throws DegenerateRoots unless every gap exceeds `min_gap`
  /// (in exact mode the default 0 means "strictly distinct").
  explicit RootSet(std::vector<S> roots, const S& min_gap = S{0}) : roots_(std::move(roots)) {
    std::sort(roots_.begin(), roots_.end());
    for (std::size_t i = 1; i < roots_.size(); ++i) {
      if (!(roots_[i] - roots_[i - 1] > min_gap)) {
        throw DegenerateRoots("roots " + format_scalar(roots_[i - 1]) + " and " + format_scalar(roots_[i]) +
                              " are not distinct");
      }
    }
  }

  std::size_t size() const noexcept { return roots_.size(); }
  bool empty() const noexcept { return roots_.empty(); }
  const S& operator[](std::size_t i) const { return roots_[i]; }
  std::span<const S> values() const noexcept { return roots_; }
  auto begin() const noexcept { return roots_.begin(); }
  auto end() const noexcept { return roots_.end(); }

  friend bool operator==(const RootSet&, const RootSet&) = default;

 private:
  std::vector<S> roots_;
};

template <Scalar To, Scalar From>
RootSet<To> root_set_cast(const RootSet<From>& rs) {
  std::vector<To> out;
  out.reserve(rs.size());
  for (const auto& z : rs) out.push_back(scalar_cast<To>(z));
  return RootSet<To>(std::move(out));
}

}  // namespace heun

#endif  // HEUN_ROOTS_HPP
