#ifndef HEUN_VERIFY_HPP
#define HEUN_VERIFY_HPP

// Seeded identity suites: the two routes to the integration constants, the
// explicit low-order constants, the closed form of S_m and the symmetric
// polynomial identities, each run over random exact instances.

#include "heun/constants.hpp"
#include "heun/fba.hpp"
#include "heun/instances.hpp"
#include "heun/poly.hpp"
#include "heun/symfunc.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace heun {

enum class Fault {
  none,
  closed_form,  ///< adds a spurious m_(q) term to every closed-form constant
};

struct VerifyOptions {
  int instances = 200;
  int k_min = 3;
  int k_max = 8;
  int n_min = 0;
  int n_max = 6;
  std::uint64_t seed = 1;
  bool exact = true;
  double float_tolerance = 1e-8;
  Fault fault = Fault::none;
  int appendix_instances = 100;
  int symmetric_instances = 100;  ///< root sets for the S_m and identity suites
  int symmetric_n_max = 8;
  int s_m_max = 9;
  int construction_instances = 100;
};

struct SuiteResult {
  std::string suite;
  int instances = 0;
  int passed = 0;
  bool ok = true;
  nlohmann::json counterexample;  ///< null when every instance passed
};

namespace detail {

template <Scalar S>
nlohmann::json scalars_json(std::span<const S> values) {
  auto out = nlohmann::json::array();
  for (const auto& v : values) out.push_back(format_scalar(v));
  return out;
}

inline nlohmann::json instance_json(const OdeSystem<Rational>* sys, int n, const RootSet<Rational>& rs) {
  nlohmann::json j;
  if (sys != nullptr) {
    j["k"] = sys->k();
    j["x_ascending"] = scalars_json(sys->X().coeffs());
    j["y_ascending"] = scalars_json(sys->Y().coeffs());
  }
  j["n"] = n;
  j["roots"] = scalars_json(rs.values());
  return j;
}

/// First mismatch between two coefficient lists, as (index, lhs, rhs).
template <Scalar S>
std::optional<nlohmann::json> compare_lists(std::span<const S> lhs, std::span<const S> rhs, double tol,
                                            const std::string& what) {
  const std::size_t len = std::max(lhs.size(), rhs.size());
  for (std::size_t i = 0; i < len; ++i) {
    const S l = i < lhs.size() ? lhs[i] : S{0};
    const S r = i < rhs.size() ? rhs[i] : S{0};
    if (!scalars_agree(l, r, tol))
      return nlohmann::json{{"quantity", what}, {"index", i}, {"lhs", format_scalar(l)}, {"rhs", format_scalar(r)}};
  }
  return std::nullopt;
}

template <Scalar S>
IntegrationConstants<S> closed_form_under_fault(const OdeSystem<S>& sys, int n, const RootSet<S>& rs, Fault fault) {
  auto c = constants_closed_form(sys, n, rs);
  if (fault == Fault::closed_form)
    for (int q = 1; q <= sys.k() - 2; ++q) c.values[q - 1] += monomial(rs, Partition{q});
  return c;
}

class SuiteRunner {
 public:
  explicit SuiteRunner(std::string name) { result_.suite = std::move(name); }

  /// `check` returns a mismatch description, or nullopt on success.
  void run(const std::function<std::optional<nlohmann::json>()>& check, const std::function<nlohmann::json()>& describe) {
    ++result_.instances;
    std::optional<nlohmann::json> mismatch;
    try {
      mismatch = check();
    } catch (const std::exception& ex) {
      mismatch = nlohmann::json{{"quantity", "exception"}, {"what", ex.what()}};
    }
    if (!mismatch) {
      ++result_.passed;
      return;
    }
    if (result_.ok) {
      nlohmann::json ce = describe();
      ce["mismatch"] = *mismatch;
      result_.counterexample = std::move(ce);
    }
    result_.ok = false;
  }

  SuiteResult take() { return std::move(result_); }

 private:
  SuiteResult result_;
};

inline std::uint64_t suite_seed(std::uint64_t seed, std::uint64_t suite) {
  return seed ^ (0x9E3779B97F4A7C15ULL * (suite + 1));
}

template <Scalar S>
std::optional<nlohmann::json> route_check(const ExactInstance& inst, const VerifyOptions& opt) {
  const auto sys = ode_cast<S>(inst.sys);
  const auto rs = root_set_cast<S>(inst.roots);
  const auto closed = closed_form_under_fault(sys, inst.n, rs, opt.fault);
  const auto solved = solve_constants_system(sys, inst.n, rs);
  const std::span<const S> solved_values(solved.values), closed_values(closed.values);
  if (auto m = compare_lists(solved_values, closed_values, opt.float_tolerance, "solve_constants_system vs constants_closed_form"))
    return m;
  const auto by_fba = fba_coefficients(sys, inst.n, rs);
  const auto by_constants = coefficient_relations(sys, inst.n, closed);
  return compare_lists(by_fba.coeffs(), by_constants.coeffs(), opt.float_tolerance,
                       "fba_coefficients vs coefficient_relations(constants_closed_form)");
}

template <Scalar S>
std::optional<nlohmann::json> appendix_check(const ExactInstance& inst, const VerifyOptions& opt) {
  const auto sys = ode_cast<S>(inst.sys);
  const auto rs = root_set_cast<S>(inst.roots);
  const auto closed = closed_form_under_fault(sys, inst.n, rs, opt.fault);
  for (int q = 1; q <= std::min(3, sys.k() - 2); ++q) {
    const S explicit_value = constants_appendix(sys, inst.n, rs, q);
    if (!scalars_agree(explicit_value, closed.C(q), opt.float_tolerance))
      return nlohmann::json{{"quantity", "constants_appendix vs constants_closed_form"},
                            {"q", q},
                            {"lhs", format_scalar(explicit_value)},
                            {"rhs", format_scalar(closed.C(q))}};
  }
  return std::nullopt;
}

template <Scalar S>
std::optional<nlohmann::json> s_oracle_check(const RootSet<Rational>& exact_roots, const VerifyOptions& opt) {
  const auto rs = root_set_cast<S>(exact_roots);
  for (int m = 2; m <= opt.s_m_max; ++m) {
    const S direct = s_direct(rs, m), closed = s_closed(rs, m);
    if (!scalars_agree(direct, closed, opt.float_tolerance))
      return nlohmann::json{{"quantity", "s_direct vs s_closed"}, {"m", m}, {"lhs", format_scalar(direct)},
                            {"rhs", format_scalar(closed)}};
  }
  return std::nullopt;
}

template <Scalar S>
std::optional<nlohmann::json> identity_check(const RootSet<Rational>& exact_roots, const VerifyOptions& opt) {
  const auto rs = root_set_cast<S>(exact_roots);
  auto m = [&](Partition p) { return monomial(rs, p); };
  auto e = [&](int l) { return elementary(rs, l); };
  const double tol = opt.float_tolerance;
  auto mismatch = [](const char* what, const S& l, const S& r) {
    return nlohmann::json{{"quantity", what}, {"lhs", format_scalar(l)}, {"rhs", format_scalar(r)}};
  };
  if (!scalars_agree(e(2), m({1, 1}), tol)) return mismatch("e_2 = m_(1,1)", e(2), m({1, 1}));
  if (!scalars_agree(e(3), m({1, 1, 1}), tol)) return mismatch("e_3 = m_(1,1,1)", e(3), m({1, 1, 1}));
  if (!scalars_agree(S(e(1) * e(1)), S(m({2}) + S{2} * m({1, 1})), tol))
    return mismatch("e_1^2 = m_(2) + 2 m_(1,1)", e(1) * e(1), m({2}) + S{2} * m({1, 1}));
  if (!scalars_agree(S(m({2}) * m({1})), S(m({3}) + m({2, 1})), tol))
    return mismatch("m_(2) m_(1) = m_(3) + m_(2,1)", m({2}) * m({1}), m({3}) + m({2, 1}));
  if (!scalars_agree(S(m({1, 1}) * m({1})), S(m({2, 1}) + S{3} * m({1, 1, 1})), tol))
    return mismatch("m_(1,1) m_(1) = m_(2,1) + 3 m_(1,1,1)", m({1, 1}) * m({1}), m({2, 1}) + S{3} * m({1, 1, 1}));
  for (int p = 1; p <= 6; ++p)
    if (!scalars_agree(power_sum(rs, p), m({p}), tol)) return mismatch("T_m = m_(m)", power_sum(rs, p), m({p}));
  const auto y = poly_from_roots(rs);
  const long n = static_cast<long>(rs.size());
  for (long j = 0; j <= n; ++j) {
    const S expected = S((n - j) % 2 == 0 ? 1 : -1) * e(static_cast<int>(n - j));
    if (!scalars_agree(y.coeff(static_cast<std::size_t>(j)), expected, tol))
      return mismatch("coefficient of z^m in prod (z - z_i) = (-1)^(n-m) e_(n-m)", y.coeff(static_cast<std::size_t>(j)),
                      expected);
  }
  return std::nullopt;
}

template <Scalar S>
std::optional<nlohmann::json> construction_check(const OdeSystem<Rational>& exact_sys, int n,
                                                 const std::vector<Rational>& constants, const VerifyOptions& opt) {
  const auto sys = ode_cast<S>(exact_sys);
  IntegrationConstants<S> c{sys.k(), n, {}};
  for (const auto& v : constants) c.values.push_back(scalar_cast<S>(v));
  const auto zn = build_zn(sys, n, c);
  if (auto mm = compare_lists(zn.coeffs(), coefficient_relations(sys, n, c).coeffs(), opt.float_tolerance,
                              "build_zn vs coefficient_relations"))
    return mm;
  const S cond = degree_condition(sys, zn, n);
  if (!scalars_agree(cond, S{0}, opt.float_tolerance))
    return nlohmann::json{{"quantity", "degree_condition(build_zn) = 0"}, {"lhs", format_scalar(cond)}, {"rhs", "0"}};
  return std::nullopt;
}

template <class Check>
std::optional<nlohmann::json> dispatch(const VerifyOptions& opt, Check&& check) {
  return opt.exact ? check(Rational{}) : check(double{});
}

}  // namespace detail

inline SuiteResult verify_route_equivalence(const VerifyOptions& opt) {
  InstanceGenerator gen(detail::suite_seed(opt.seed, 0));
  detail::SuiteRunner runner("route_equivalence");
  for (int i = 0; i < opt.instances; ++i) {
    const auto inst = gen.instance(opt.k_min, opt.k_max, opt.n_min, opt.n_max);
    runner.run(
        [&] {
          return detail::dispatch(opt, [&]<class S>(S) { return detail::route_check<S>(inst, opt); });
        },
        [&] { return detail::instance_json(&inst.sys, inst.n, inst.roots); });
  }
  return runner.take();
}

inline SuiteResult verify_appendix(const VerifyOptions& opt) {
  InstanceGenerator gen(detail::suite_seed(opt.seed, 1));
  detail::SuiteRunner runner("appendix");
  for (int i = 0; i < opt.appendix_instances; ++i) {
    const auto inst = gen.instance(std::max(opt.k_min, 3), std::max(opt.k_max, 3), opt.n_min, opt.n_max);
    runner.run(
        [&] {
          return detail::dispatch(opt, [&]<class S>(S) { return detail::appendix_check<S>(inst, opt); });
        },
        [&] { return detail::instance_json(&inst.sys, inst.n, inst.roots); });
  }
  return runner.take();
}

inline SuiteResult verify_s_oracle(const VerifyOptions& opt) {
  InstanceGenerator gen(detail::suite_seed(opt.seed, 2));
  detail::SuiteRunner runner("s_oracle");
  for (int i = 0; i < opt.symmetric_instances; ++i) {
    const int n = static_cast<int>(gen.uniform_int(0, opt.symmetric_n_max));
    const auto rs = gen.roots(n);
    runner.run(
        [&] {
          return detail::dispatch(opt, [&]<class S>(S) { return detail::s_oracle_check<S>(rs, opt); });
        },
        [&] { return detail::instance_json(nullptr, n, rs); });
  }
  return runner.take();
}

inline SuiteResult verify_monomial_identities(const VerifyOptions& opt) {
  InstanceGenerator gen(detail::suite_seed(opt.seed, 3));
  detail::SuiteRunner runner("monomial_identities");
  for (int i = 0; i < opt.symmetric_instances; ++i) {
    const int n = static_cast<int>(gen.uniform_int(0, opt.symmetric_n_max));
    const auto rs = gen.roots(n);
    runner.run(
        [&] {
          return detail::dispatch(opt, [&]<class S>(S) { return detail::identity_check<S>(rs, opt); });
        },
        [&] { return detail::instance_json(nullptr, n, rs); });
  }
  return runner.take();
}

inline SuiteResult verify_construction(const VerifyOptions& opt) {
  InstanceGenerator gen(detail::suite_seed(opt.seed, 4));
  detail::SuiteRunner runner("degree_condition");
  for (int i = 0; i < opt.construction_instances; ++i) {
    const int k = static_cast<int>(gen.uniform_int(std::max(opt.k_min, 2), std::max(opt.k_max, 2)));
    const int n = static_cast<int>(gen.uniform_int(opt.n_min, opt.n_max));
    const auto sys = gen.system(k);
    std::vector<Rational> constants;
    for (int q = 1; q <= k - 2; ++q) constants.push_back(gen.rational());
    runner.run(
        [&] {
          return detail::dispatch(opt, [&]<class S>(S) { return detail::construction_check<S>(sys, n, constants, opt); });
        },
        [&] {
          auto j = detail::instance_json(&sys, n, RootSet<Rational>{});
          j.erase("roots");
          j["constants"] = detail::scalars_json(std::span<const Rational>(constants));
          return j;
        });
  }
  return runner.take();
}

inline std::vector<SuiteResult> run_verification(const VerifyOptions& opt) {
  return {verify_route_equivalence(opt), verify_appendix(opt), verify_s_oracle(opt), verify_monomial_identities(opt),
          verify_construction(opt)};
}

}  // namespace heun

#endif  // HEUN_VERIFY_HPP
