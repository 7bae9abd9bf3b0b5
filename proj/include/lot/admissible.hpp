#pragma once

#include <memory>
#include <string>

#include "lot/extended_real.hpp"
#include "lot/lorentz.hpp"

namespace lot {

// A cost profile u: (0,inf) -> R with u' > 0, u'' < 0 and u' surjective onto
// (0,inf). Implementations provide exact derivative formulas; admissibility of
// user-supplied functions is validated by grid sampling, not proven.
class AdmissibleFunction {
public:
  virtual ~AdmissibleFunction() = default;

  virtual double eval(double x) const = 0;        // u(x), x > 0
  virtual double d1(double x) const = 0;          // u'(x)
  virtual double d2(double x) const = 0;          // u''(x)
  virtual double d1_inverse(double y) const = 0;  // (u')^{-1}(y), y > 0
  virtual ExtendedReal value_at_zero() const = 0; // limit u(0+)
  virtual ExtendedReal value_at_inf() const = 0;  // limit u(inf)
  virtual std::string label() const = 0;

  // u on the extended line: u(-inf) = -inf, u(0) and u(inf) are the stored
  // limits, finite arguments evaluate normally.
  ExtendedReal eval_extended(ExtendedReal x) const;

  // The normalization constant u(1) that calibrates the transport predicate.
  double normalization() const { return eval(1.0); }
};

using UPtr = std::shared_ptr<const AdmissibleFunction>;

// Non-owning view of a caller-managed function; the view (and anything built
// from it) must not outlive the referenced object.
inline UPtr borrow(const AdmissibleFunction& u) { return UPtr(UPtr{}, &u); }

// Built-in families.
UPtr make_power(double p);          // u_p(x) = x^p / p       (p < 1, p != 0)
UPtr make_log();                    // u_0(x) = 1/2 + log x
UPtr make_shifted_power(double p);  // (x^p - 1) / p
UPtr make_shifted_log();            // log x

// Calculus on admissible functions.
UPtr shift(UPtr u, double c);          // u + c (same derivatives)
UPtr conjugate(UPtr u);                // concave conjugate u*
UPtr rescale(UPtr u, double lambda);   // u_lambda(x) = u(x / lambda)

struct AdmissibilityReport {
  bool ok = true;
  std::string detail;  // first violated condition, empty when ok
};
AdmissibilityReport validate_admissible(const AdmissibleFunction& u,
                                        int grid_points = 1000);

// Config grammar: u_p:<float> | u_0 | shifted_u_p:<float> | shifted_u_0 |
// conjugate(<spec>) | rescale(<spec>,<float>). Throws ConfigError.
UPtr parse_u_spec(const std::string& spec);

// ------------------------------------------------ Lagrangian/Hamiltonian pair
// L(v; u) = -u(|v|_g) for future causal v (0+ limit on the cone), +inf else.
ExtendedReal lagrangian(const Vec& v, const AdmissibleFunction& u);

// DL(v; u) = -u'(|v|_g) v_* / |v|_g for future timelike v (covector result).
Vec lagrangian_gradient(const Vec& v, const AdmissibleFunction& u);

// DH(w; u*) = -(u*)'(|w|_g) w_* / |w|_g for past timelike covectors w; the
// argument is the conjugate function, so its d1 is (u')^{-1}. Inverse of DL.
Vec hamiltonian_gradient(const Vec& w, const AdmissibleFunction& u_star);

}  // namespace lot
