#ifndef HEUN_SYMFUNC_HPP
#define HEUN_SYMFUNC_HPP

#include "heun/errors.hpp"
#include "heun/roots.hpp"
#include "heun/scalar.hpp"

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace heun {

/// Weakly decreasing positive parts, at most three. The empty partition indexes m_() = 1.
class Partition {
 public:
  static constexpr std::size_t max_parts = 3;

  Partition() = default;
  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    if (parts_.size() > max_parts) throw std::invalid_argument("partition has more than three parts");
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] < 1) throw std::invalid_argument("partition parts must be positive");
      if (i > 0 && parts_[i] > parts_[i - 1]) throw std::invalid_argument("partition parts must be weakly decreasing");
    }
  }

  std::span<const int> parts() const noexcept { return parts_; }
  std::size_t size() const noexcept { return parts_.size(); }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + std::to_string(parts_[i]);
    return s + ")";
  }

 private:
  std::vector<int> parts_;
};

namespace detail {

/// powers[i][e] = z_i^e for e = 0..max_exp
template <Scalar S>
std::vector<std::vector<S>> power_table(const RootSet<S>& rs, int max_exp) {
  std::vector<std::vector<S>> table(rs.size(), std::vector<S>(static_cast<std::size_t>(max_exp) + 1, S{1}));
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (int e = 1; e <= max_exp; ++e) table[i][e] = table[i][e - 1] * rs[i];
  return table;
}

}  // namespace detail

/// e_l: sum over l-subsets of products; e_0 = 1, e_l = 0 for l > n.
template <Scalar S>
S elementary(const RootSet<S>& rs, int l) {
  if (l < 0) throw std::invalid_argument("elementary: negative index");
  if (l == 0) return S{1};
  if (static_cast<std::size_t>(l) > rs.size()) return S{0};
  // e[j] accumulates e_j of the roots consumed so far
  std::vector<S> e(static_cast<std::size_t>(l) + 1, S{0});
  e[0] = S{1};
  std::size_t seen = 0;
  for (const auto& z : rs) {
    ++seen;
    for (std::size_t j = std::min<std::size_t>(seen, l); j >= 1; --j) e[j] += z * e[j - 1];
  }
  return e[l];
}

/// m_lambda: sum of the distinct monomials z_i^l1 z_j^l2 z_k^l3 over distinct indices.
///
/// Equal parts are summed over increasing indices only, so each distinct
/// monomial is counted once.
template <Scalar S>
S monomial(const RootSet<S>& rs, const Partition& part) {
  auto p = part.parts();
  const std::size_t n = rs.size();
  if (p.empty()) return S{1};
  if (p.size() > n) return S{0};
  auto pw = detail::power_table(rs, p[0]);
  S sum{0};
  switch (p.size()) {
    case 1:
      for (std::size_t i = 0; i < n; ++i) sum += pw[i][p[0]];
      break;
    case 2:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j || (p[0] == p[1] && j < i)) continue;
          sum += pw[i][p[0]] * pw[j][p[1]];
        }
      break;
    default:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (i == j || (p[0] == p[1] && j < i)) continue;
          for (std::size_t k = 0; k < n; ++k) {
            if (k == i || k == j || (p[1] == p[2] && k < j)) continue;
            sum += pw[i][p[0]] * pw[j][p[1]] * pw[k][p[2]];
          }
        }
      break;
  }
  return sum;
}

/// T_m = sum_i z_i^m, with T_0 = n.
template <Scalar S>
S power_sum(const RootSet<S>& rs, int m) {
  if (m < 0) throw std::invalid_argument("power_sum: negative exponent");
  S sum{0};
  for (const auto& z : rs) sum += ipow(z, static_cast<unsigned>(m));
  return sum;
}

/// S_m = sum_i sum_{j != i} z_i^m / (z_i - z_j), evaluated as the literal double sum.
///
/// S_0 = 0 and S_1 = n(n-1)/2 do not depend on the roots and are returned directly.
template <Scalar S>
S s_direct(const RootSet<S>& rs, int m) {
  if (m < 0) throw std::invalid_argument("s_direct: negative exponent");
  const std::size_t n = rs.size();
  if (m == 0) return S{0};
  if (m == 1) {
    const auto nn = static_cast<long long>(n);
    return S(nn * (nn - 1)) / S{2};
  }
  S sum{0};
  for (std::size_t i = 0; i < n; ++i) {
    S zm = ipow(rs[i], static_cast<unsigned>(m));
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      S gap = rs[i] - rs[j];
      if (gap == S{0}) throw DegenerateRoots("s_direct: coincident roots");
      sum += zm / gap;
    }
  }
  return sum;
}

/// S_m = (n-1) m_(m-1) + sum_{p=1}^{floor((m-1)/2)} m_(m-1-p, p), for m >= 2.
template <Scalar S>
S s_closed(const RootSet<S>& rs, int m) {
  if (m < 2) throw std::invalid_argument("s_closed requires m >= 2");
  const auto n = static_cast<long long>(rs.size());
  S sum = S(n - 1) * monomial(rs, Partition{m - 1});
  for (int p = 1; p <= (m - 1) / 2; ++p) sum += monomial(rs, Partition{m - 1 - p, p});
  return sum;
}

}  // namespace heun

#endif  // HEUN_SYMFUNC_HPP
