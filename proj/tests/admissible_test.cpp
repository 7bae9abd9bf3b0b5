#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "lot/admissible.hpp"
#include "lot/errors.hpp"
#include "support/oracles.hpp"

using namespace lot;

TEST_SUITE("admissible") {

TEST_CASE("catalogue values and limits") {
  const UPtr half = make_power(0.5);
  CHECK(half->eval(1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(half->eval(4.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(half->normalization() == doctest::Approx(2.0));
  CHECK(half->value_at_zero().is_finite());
  CHECK(half->value_at_zero().raw() == doctest::Approx(0.0));
  CHECK(half->value_at_inf().is_pos_inf());

  const UPtr inv = make_power(-1.0);
  CHECK(inv->eval(2.0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(inv->value_at_zero().is_neg_inf());
  CHECK(inv->value_at_inf().is_finite());
  CHECK(inv->value_at_inf().raw() == doctest::Approx(0.0));

  const UPtr log0 = make_log();
  CHECK(log0->eval(1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(log0->value_at_zero().is_neg_inf());
  CHECK(log0->value_at_inf().is_pos_inf());

  const UPtr shifted = make_shifted_power(0.5);
  CHECK(shifted->eval(1.0) == doctest::Approx(0.0));
  CHECK(make_shifted_log()->eval(1.0) == doctest::Approx(0.0));
}

TEST_CASE("derivatives match finite differences") {
  const std::vector<UPtr> fams = {make_power(0.5), make_power(-1.0),
                                  make_power(0.9), make_log(),
                                  make_shifted_power(-0.5)};
  for (const UPtr& u : fams) {
    for (const double x : {0.3, 1.0, 2.7, 9.0}) {
      const double h = 1e-6 * x;
      const double fd1 = (u->eval(x + h) - u->eval(x - h)) / (2 * h);
      // Differencing d1 (itself checked against eval just below) avoids the
      // rounding blow-up of a second difference of eval.
      const double fd2 = (u->d1(x + h) - u->d1(x - h)) / (2 * h);
      CHECK(u->d1(x) == doctest::Approx(fd1).epsilon(1e-6));
      CHECK(u->d2(x) == doctest::Approx(fd2).epsilon(1e-6));
      CHECK(u->d1(x) > 0.0);
      CHECK(u->d2(x) < 0.0);
      CHECK(u->d1_inverse(u->d1(x)) == doctest::Approx(x).epsilon(1e-12));
    }
  }
}

TEST_CASE("extended evaluation") {
  const UPtr u = make_power(-1.0);
  CHECK(u->eval_extended(ExtendedReal::neg_inf()).is_neg_inf());
  CHECK(u->eval_extended(ExtendedReal::finite(0.0)).is_neg_inf());
  CHECK(u->eval_extended(ExtendedReal::pos_inf()).raw() ==
        doctest::Approx(0.0));
  CHECK(u->eval_extended(ExtendedReal::finite(2.0)).raw() ==
        doctest::Approx(-0.5));

  const UPtr half = make_power(0.5);
  CHECK(half->eval_extended(ExtendedReal::finite(0.0)).raw() ==
        doctest::Approx(0.0));
  CHECK(half->eval_extended(ExtendedReal::pos_inf()).is_pos_inf());
}

TEST_CASE("conjugate against golden-section infimum") {
  // u*(y) = inf_{x>0} [x y - u(x)], evaluated with a from-scratch minimizer.
  for (const UPtr& u : {make_power(0.5), make_power(-1.0), make_log()}) {
    const UPtr star = conjugate(u);
    for (const double y : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const double oracle = [&] {
        const auto f = [&](double x) { return x * y - u->eval(x); };
        const double xm =
            testing::golden_section_minimize(f, 1e-4, 100.0, 1e-11);
        return f(xm);
      }();
      CHECK(star->eval(y) == doctest::Approx(oracle).epsilon(1e-8));
    }
  }
}

TEST_CASE("conjugate involution and self-conjugacy of u_0") {
  const UPtr u = make_power(-0.5);
  const UPtr uss = conjugate(conjugate(u));
  const UPtr log0 = make_log();
  const UPtr log_star = conjugate(log0);
  for (const double x : {0.1, 0.7, 1.0, 3.0, 20.0}) {
    CHECK(uss->eval(x) == doctest::Approx(u->eval(x)).epsilon(1e-10));
    CHECK(log_star->eval(x) == doctest::Approx(log0->eval(x)).epsilon(1e-12));
  }
}

TEST_CASE("shift and rescale calculus") {
  const UPtr base = make_power(0.5);
  const UPtr shifted = shift(base, -3.0);
  const UPtr scaled = rescale(base, 2.0);
  for (const double x : {0.5, 1.0, 4.0}) {
    CHECK(shifted->eval(x) == doctest::Approx(base->eval(x) - 3.0));
    CHECK(shifted->d1(x) == doctest::Approx(base->d1(x)));
    CHECK(scaled->eval(x) == doctest::Approx(base->eval(x / 2.0)));
    CHECK(scaled->d1(x) == doctest::Approx(base->d1(x / 2.0) / 2.0));
  }
  CHECK_THROWS_AS((void)rescale(base, -1.0), PreconditionError);
}

TEST_CASE("admissibility validation") {
  CHECK(validate_admissible(*make_power(0.5)).ok);
  CHECK(validate_admissible(*make_log()).ok);
  CHECK(validate_admissible(*conjugate(make_power(0.9))).ok);

  // A convex profile must be rejected with a named condition.
  struct Convex final : AdmissibleFunction {
    double eval(double x) const override { return x * x; }
    double d1(double x) const override { return 2 * x; }
    double d2(double) const override { return 2.0; }
    double d1_inverse(double y) const override { return y / 2; }
    ExtendedReal value_at_zero() const override {
      return ExtendedReal::finite(0.0);
    }
    ExtendedReal value_at_inf() const override {
      return ExtendedReal::pos_inf();
    }
    std::string label() const override { return "convex"; }
  };
  const Convex bad;
  const AdmissibilityReport report = validate_admissible(bad);
  CHECK_FALSE(report.ok);
  CHECK_FALSE(report.detail.empty());
}

TEST_CASE("spec grammar") {
  CHECK(parse_u_spec("u_p:0.5")->eval(4.0) == doctest::Approx(4.0));
  CHECK(parse_u_spec("u_0")->eval(1.0) == doctest::Approx(0.5));
  CHECK(parse_u_spec("shifted_u_p:-1")->eval(1.0) == doctest::Approx(0.0));
  CHECK(parse_u_spec("shifted_u_0")->eval(std::exp(1.0)) ==
        doctest::Approx(1.0));
  CHECK(parse_u_spec("conjugate(u_p:0.5)")->eval(2.0) ==
        doctest::Approx(make_power(-1.0)->eval(2.0)).epsilon(1e-12));
  CHECK(parse_u_spec("rescale(u_p:0.5,2.0)")->eval(2.0) ==
        doctest::Approx(make_power(0.5)->eval(1.0)));
  CHECK_NOTHROW((void)parse_u_spec("conjugate(rescale(u_0,2.0))"));

  CHECK_THROWS_AS((void)parse_u_spec("u_p:1.5"), ConfigError);
  CHECK_THROWS_AS((void)parse_u_spec("u_p:0"), ConfigError);
  CHECK_THROWS_AS((void)parse_u_spec("bogus"), ConfigError);
  CHECK_THROWS_AS((void)parse_u_spec("conjugate(u_p:0.5"), ConfigError);
  CHECK_THROWS_AS((void)parse_u_spec(""), ConfigError);
}

TEST_CASE("lagrangian-hamiltonian inversion") {
  const UPtr u = make_power(0.5);
  const UPtr star = conjugate(u);
  const Vec v{2.0, 0.6};  // future timelike
  const Vec w = lagrangian_gradient(v, *u);
  const Vec back = hamiltonian_gradient(w, *star);
  CHECK(back[0] == doctest::Approx(v[0]).epsilon(1e-10));
  CHECK(back[1] == doctest::Approx(v[1]).epsilon(1e-10));

  const ExtendedReal null_cost = lagrangian(Vec{1.0, 1.0}, *make_power(-1.0));
  CHECK(null_cost.is_pos_inf());  // -u(0) with u(0) = -inf
  CHECK(lagrangian(Vec{0.5, 1.0}, *u).is_pos_inf());  // spacelike
}

}  // TEST_SUITE
