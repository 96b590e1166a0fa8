#include "heun/instances.hpp"
#include "heun/symfunc.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace heun;
using Q = Rational;

namespace {

RootSet<Q> r123() { return RootSet<Q>({Q{1}, Q{2}, Q{3}}); }

// S_m by its symmetrized form: (1/2) sum_{i != j} sum_{p=0}^{m-1} z_i^{m-1-p} z_j^p.
// Division-free, so it is an independent check of both s_direct and s_closed.
Q s_symmetrized(const RootSet<Q>& rs, int m) {
  Q sum{0};
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < rs.size(); ++j) {
      if (i == j) continue;
      for (int p = 0; p < m; ++p) sum += ipow(rs[i], m - 1 - p) * ipow(rs[j], p);
    }
  return sum / 2;
}

}  // namespace

TEST(Partition, Validation) {
  EXPECT_NO_THROW(Partition({3, 3, 1}));
  EXPECT_THROW(Partition({1, 2}), std::invalid_argument);
  EXPECT_THROW(Partition({2, 0}), std::invalid_argument);
  EXPECT_THROW(Partition({1, 1, 1, 1}), std::invalid_argument);
  EXPECT_EQ(Partition().size(), 0u);
  EXPECT_EQ(Partition({2, 1}).str(), "(2,1)");
}

TEST(Elementary, Examples) {
  EXPECT_EQ(elementary(r123(), 2), Q{11});
  EXPECT_EQ(elementary(r123(), 0), Q{1});
  EXPECT_EQ(elementary(RootSet<Q>{}, 0), Q{1});
  EXPECT_EQ(elementary(RootSet<Q>({Q{1}, Q{2}}), 3), Q{0});
  EXPECT_EQ(elementary(r123(), 3), Q{6});
}

TEST(Monomial, Examples) {
  EXPECT_EQ(monomial(r123(), {2, 1}), Q{48});
  EXPECT_EQ(monomial(r123(), {1, 1}), Q{11});
  EXPECT_EQ(monomial(RootSet<Q>({Q{1}, Q{2}}), {1, 1, 1}), Q{0});
  EXPECT_EQ(monomial(r123(), {}), Q{1});
  EXPECT_EQ(monomial(RootSet<Q>{}, {}), Q{1});
  EXPECT_EQ(monomial(RootSet<Q>{}, {1}), Q{0});
  // 1*4 + 1*9 + 4*9
  EXPECT_EQ(monomial(r123(), {2, 2}), Q{49});
  EXPECT_EQ(monomial(r123(), {1, 1, 1}), Q{6});
  // z1^2 z2 z3 + z1 z2^2 z3 + z1 z2 z3^2 = 6 (1 + 2 + 3)
  EXPECT_EQ(monomial(r123(), {2, 1, 1}), Q{36});
}

TEST(PowerSum, Examples) {
  EXPECT_EQ(power_sum(r123(), 2), Q{14});
  EXPECT_EQ(power_sum(r123(), 0), Q{3});
  EXPECT_EQ(power_sum(RootSet<Q>{}, 4), Q{0});
}

TEST(SDirect, Examples) {
  EXPECT_EQ(s_direct(r123(), 1), Q{3});
  EXPECT_EQ(s_direct(r123(), 2), Q{12});
  EXPECT_EQ(s_direct(r123(), 0), Q{0});
  EXPECT_EQ(s_direct(RootSet<Q>{}, 1), Q{0});
}

TEST(SClosed, Examples) {
  EXPECT_EQ(s_closed(r123(), 2), Q{12});
  EXPECT_EQ(s_closed(r123(), 3), Q{39});
  EXPECT_EQ(s_direct(r123(), 3), Q{39});
  EXPECT_EQ(s_closed(RootSet<Q>({Q{1}, Q{2}}), 2), Q{3});
  EXPECT_EQ(s_direct(RootSet<Q>({Q{1}, Q{2}}), 2), Q{3});
  EXPECT_THROW(s_closed(r123(), 1), std::invalid_argument);
}

TEST(SDirect, FloatRejectsCoincidentRoots) {
  EXPECT_THROW(RootSet<double>({1.0, 1.0}), DegenerateRoots);
}

TEST(SymmetricProperties, ClosedFormMatchesDoubleSumAndSymmetrizedSum) {
  InstanceGenerator gen(2024);
  for (int trial = 0; trial < 60; ++trial) {
    auto rs = gen.roots(static_cast<int>(gen.uniform_int(0, 8)));
    for (int m = 2; m <= 9; ++m) {
      const Q direct = s_direct(rs, m);
      EXPECT_EQ(direct, s_closed(rs, m)) << "m = " << m;
      EXPECT_EQ(direct, s_symmetrized(rs, m)) << "m = " << m;
    }
    EXPECT_EQ(s_direct(rs, 1), s_symmetrized(rs, 1));
  }
}

TEST(SymmetricProperties, AppendixIdentities) {
  InstanceGenerator gen(99);
  for (int trial = 0; trial < 60; ++trial) {
    auto rs = gen.roots(static_cast<int>(gen.uniform_int(0, 8)));
    auto m = [&](Partition p) { return monomial(rs, p); };
    EXPECT_EQ(elementary(rs, 2), m({1, 1}));
    EXPECT_EQ(elementary(rs, 3), m({1, 1, 1}));
    EXPECT_EQ(elementary(rs, 1) * elementary(rs, 1), m({2}) + 2 * m({1, 1}));
    EXPECT_EQ(m({2}) * m({1}), m({3}) + m({2, 1}));
    EXPECT_EQ(m({1, 1}) * m({1}), m({2, 1}) + 3 * m({1, 1, 1}));
    for (int p = 1; p <= 7; ++p) EXPECT_EQ(power_sum(rs, p), m({p}));
  }
}

TEST(SymmetricProperties, InvariantUnderPermutation) {
  InstanceGenerator gen(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto values = gen.distinct_rationals(static_cast<int>(gen.uniform_int(1, 6)));
    RootSet<Q> sorted(values);
    std::reverse(values.begin(), values.end());
    std::rotate(values.begin(), values.begin() + values.size() / 2, values.end());
    RootSet<Q> permuted(values);
    EXPECT_EQ(s_direct(sorted, 4), s_direct(permuted, 4));
    EXPECT_EQ(monomial(sorted, {3, 1}), monomial(permuted, {3, 1}));
    EXPECT_EQ(elementary(sorted, 2), elementary(permuted, 2));
  }
}
