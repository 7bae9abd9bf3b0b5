#include "lot/admissible.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <vector>

#include "lot/errors.hpp"

namespace lot {

ExtendedReal AdmissibleFunction::eval_extended(ExtendedReal x) const {
  if (x.is_neg_inf()) return ExtendedReal::neg_inf();  // u(-inf) := -inf
  if (x.is_pos_inf()) return value_at_inf();
  if (x.raw() <= 0.0) return value_at_zero();
  return ExtendedReal(eval(x.raw()));
}

namespace {

// The power/log family with an additive shift covers u_p, u_0 and their
// shifted variants in one closed form:
//   p != 0:  u(x) = x^p / p + c        p == 0:  u(x) = 1/2 + log x + c
class BuiltinU final : public AdmissibleFunction {
public:
  BuiltinU(double p, double c, std::string label)
      : p_(p), c_(c), label_(std::move(label)) {
    require(p_ < 1.0, "u_p requires p < 1");
  }

  double eval(double x) const override {
    require(x > 0.0, "admissible functions are defined on (0,inf)");
    if (p_ == 0.0) return 0.5 + std::log(x) + c_;
    return std::pow(x, p_) / p_ + c_;
  }
  double d1(double x) const override {
    require(x > 0.0, "admissible functions are defined on (0,inf)");
    if (p_ == 0.0) return 1.0 / x;
    return std::pow(x, p_ - 1.0);
  }
  double d2(double x) const override {
    require(x > 0.0, "admissible functions are defined on (0,inf)");
    if (p_ == 0.0) return -1.0 / (x * x);
    return (p_ - 1.0) * std::pow(x, p_ - 2.0);
  }
  double d1_inverse(double y) const override {
    require(y > 0.0, "u' maps onto (0,inf)");
    if (p_ == 0.0) return 1.0 / y;
    return std::pow(y, 1.0 / (p_ - 1.0));
  }
  ExtendedReal value_at_zero() const override {
    // x^p/p -> 0 for p in (0,1); -inf for p < 0; log x -> -inf.
    if (p_ > 0.0) return ExtendedReal(c_);
    return ExtendedReal::neg_inf();
  }
  ExtendedReal value_at_inf() const override {
    // x^p/p -> +inf for p in (0,1) and the log family; -> 0 for p < 0.
    if (p_ < 0.0) return ExtendedReal(c_);
    return ExtendedReal::pos_inf();
  }
  std::string label() const override { return label_; }

  double p() const { return p_; }
  double c() const { return c_; }

private:
  double p_;
  double c_;
  std::string label_;
};

class ShiftedU final : public AdmissibleFunction {
public:
  ShiftedU(UPtr inner, double c) : inner_(std::move(inner)), c_(c) {}

  double eval(double x) const override { return inner_->eval(x) + c_; }
  double d1(double x) const override { return inner_->d1(x); }
  double d2(double x) const override { return inner_->d2(x); }
  double d1_inverse(double y) const override { return inner_->d1_inverse(y); }
  ExtendedReal value_at_zero() const override {
    return inner_->value_at_zero() + ExtendedReal(c_);
  }
  ExtendedReal value_at_inf() const override {
    return inner_->value_at_inf() + ExtendedReal(c_);
  }
  std::string label() const override {
    std::ostringstream os;
    os << "shift(" << inner_->label() << "," << c_ << ")";
    return os.str();
  }

private:
  UPtr inner_;
  double c_;
};

// Concave conjugate computed analytically from the derivative inverse:
//   u*(x) = x y - u(y) at y = (u')^{-1}(x),   (u*)' = (u')^{-1}.
// The limits swap and negate: u*(0+) = -u(inf), u*(inf) = -u(0+).
class ConjugateU final : public AdmissibleFunction {
public:
  explicit ConjugateU(UPtr inner) : inner_(std::move(inner)) {}

  double eval(double x) const override {
    require(x > 0.0, "admissible functions are defined on (0,inf)");
    const double y = inner_->d1_inverse(x);
    return x * y - inner_->eval(y);
  }
  double d1(double x) const override { return inner_->d1_inverse(x); }
  double d2(double x) const override {
    // d/dx (u')^{-1}(x) = 1 / u''((u')^{-1}(x))
    return 1.0 / inner_->d2(inner_->d1_inverse(x));
  }
  double d1_inverse(double y) const override { return inner_->d1(y); }
  ExtendedReal value_at_zero() const override { return -inner_->value_at_inf(); }
  ExtendedReal value_at_inf() const override { return -inner_->value_at_zero(); }
  std::string label() const override {
    return "conjugate(" + inner_->label() + ")";
  }

private:
  UPtr inner_;
};

class RescaledU final : public AdmissibleFunction {
public:
  RescaledU(UPtr inner, double lambda)
      : inner_(std::move(inner)), lambda_(lambda) {
    require(lambda_ > 0.0, "rescale requires lambda > 0");
  }

  double eval(double x) const override { return inner_->eval(x / lambda_); }
  double d1(double x) const override { return inner_->d1(x / lambda_) / lambda_; }
  double d2(double x) const override {
    return inner_->d2(x / lambda_) / (lambda_ * lambda_);
  }
  double d1_inverse(double y) const override {
    return lambda_ * inner_->d1_inverse(lambda_ * y);
  }
  ExtendedReal value_at_zero() const override { return inner_->value_at_zero(); }
  ExtendedReal value_at_inf() const override { return inner_->value_at_inf(); }
  std::string label() const override {
    std::ostringstream os;
    os << "rescaled(" << inner_->label() << "," << lambda_ << ")";
    return os.str();
  }

private:
  UPtr inner_;
  double lambda_;
};

std::string power_label(double p, bool shifted) {
  std::ostringstream os;
  os << (shifted ? "shifted_u_p[p=" : "u_p[p=") << p << "]";
  return os.str();
}

}  // namespace

UPtr make_power(double p) {
  require(p != 0.0 && p < 1.0, "u_p requires 0 != p < 1");
  return std::make_shared<BuiltinU>(p, 0.0, power_label(p, false));
}

UPtr make_log() { return std::make_shared<BuiltinU>(0.0, 0.0, "u_0"); }

UPtr make_shifted_power(double p) {
  require(p != 0.0 && p < 1.0, "u_p requires 0 != p < 1");
  return std::make_shared<BuiltinU>(p, -1.0 / p, power_label(p, true));
}

UPtr make_shifted_log() {
  return std::make_shared<BuiltinU>(0.0, -0.5, "shifted_u_0");
}

UPtr shift(UPtr u, double c) {
  require(u != nullptr, "null function");
  return std::make_shared<ShiftedU>(std::move(u), c);
}

UPtr conjugate(UPtr u) {
  require(u != nullptr, "null function");
  // Closed form for the builtin family: u_p* = u_q with 1/p + 1/q = 1
  // (u_0 is self-dual) and (u + c)* = u* - c.
  if (auto* b = dynamic_cast<const BuiltinU*>(u.get())) {
    const double p = b->p();
    const double q = (p == 0.0) ? 0.0 : p / (p - 1.0);
    std::ostringstream os;
    os << "conjugate(" << b->label() << ")";
    return std::make_shared<BuiltinU>(q, -b->c(), os.str());
  }
  return std::make_shared<ConjugateU>(std::move(u));
}

UPtr rescale(UPtr u, double lambda) {
  require(u != nullptr, "null function");
  require(lambda > 0.0, "rescale requires lambda > 0");
  if (lambda == 1.0) return u;
  return std::make_shared<RescaledU>(std::move(u), lambda);
}

AdmissibilityReport validate_admissible(const AdmissibleFunction& u,
                                        int grid_points) {
  AdmissibilityReport report;
  auto fail = [&](const std::string& what) {
    report.ok = false;
    report.detail = what;
    return report;
  };

  const double lo = 1e-3, hi = 1e3;
  std::vector<double> xs(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    const double t = static_cast<double>(i) / (grid_points - 1);
    xs[i] = lo * std::pow(hi / lo, t);
  }

  double prev_eval = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double x = xs[i];
    const double g = u.d1(x);
    if (!(g > 0.0)) return fail("u' <= 0 at x=" + std::to_string(x));
    if (!(u.d2(x) < 0.0)) return fail("u'' >= 0 at x=" + std::to_string(x));
    const double back = u.d1_inverse(g);
    if (std::abs(back - x) > 1e-9 * std::max(1.0, x))
      return fail("(u')^{-1} does not invert u' at x=" + std::to_string(x));
    const double e = u.eval(x);
    if (!(e > prev_eval)) return fail("u not strictly increasing at x=" + std::to_string(x));
    prev_eval = e;
  }
  // Strict concavity via decreasing secant slopes across the grid.
  for (int i = 2; i < grid_points; ++i) {
    const double s1 =
        (u.eval(xs[i - 1]) - u.eval(xs[i - 2])) / (xs[i - 1] - xs[i - 2]);
    const double s2 = (u.eval(xs[i]) - u.eval(xs[i - 1])) / (xs[i] - xs[i - 1]);
    if (!(s2 < s1)) return fail("secant slopes not decreasing near x=" + std::to_string(xs[i]));
  }
  return report;
}

namespace {

// Minimal recursive-descent reader for the u-spec grammar.
struct SpecReader {
  const std::string& s;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool consume(const std::string& tok) {
    skip_ws();
    if (s.compare(pos, tok.size(), tok) == 0) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      throw ConfigError("u spec: expected '" + std::string(1, c) + "' at position " +
                        std::to_string(pos) + " in \"" + s + "\"");
    ++pos;
  }
  double number() {
    skip_ws();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin)
      throw ConfigError("u spec: expected a number at position " +
                        std::to_string(pos) + " in \"" + s + "\"");
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }

  UPtr parse() {
    skip_ws();
    if (consume("conjugate(")) {
      UPtr inner = parse();
      expect(')');
      return conjugate(std::move(inner));
    }
    if (consume("rescale(")) {
      UPtr inner = parse();
      expect(',');
      const double lambda = number();
      expect(')');
      if (lambda <= 0.0) throw ConfigError("u spec: rescale needs lambda > 0");
      return rescale(std::move(inner), lambda);
    }
    if (consume("shifted_u_p:")) {
      const double p = number();
      if (p == 0.0 || p >= 1.0) throw ConfigError("u spec: shifted_u_p needs 0 != p < 1");
      return make_shifted_power(p);
    }
    if (consume("shifted_u_0")) return make_shifted_log();
    if (consume("u_p:")) {
      const double p = number();
      if (p == 0.0 || p >= 1.0) throw ConfigError("u spec: u_p needs 0 != p < 1");
      return make_power(p);
    }
    if (consume("u_0")) return make_log();
    throw ConfigError("u spec: unrecognized function at position " +
                      std::to_string(pos) + " in \"" + s + "\"");
  }
};

}  // namespace

UPtr parse_u_spec(const std::string& spec) {
  SpecReader reader{spec};
  UPtr u = reader.parse();
  reader.skip_ws();
  if (reader.pos != spec.size())
    throw ConfigError("u spec: trailing characters in \"" + spec + "\"");
  return u;
}

ExtendedReal lagrangian(const Vec& v, const AdmissibleFunction& u) {
  if (!is_future_causal(v)) return ExtendedReal::pos_inf();
  const double r = causal_norm(v);
  if (r == 0.0) return -u.value_at_zero();  // 0+ limit on the light cone
  return ExtendedReal(-u.eval(r));
}

Vec lagrangian_gradient(const Vec& v, const AdmissibleFunction& u) {
  require(classify_future(v) == Causality::future_timelike,
          "DL needs a future timelike vector");
  const double r = causal_norm(v);
  return vscale(-u.d1(r) / r, lower_index(v));
}

Vec hamiltonian_gradient(const Vec& w, const AdmissibleFunction& u_star) {
  // Past timelike strictly: null covectors are a singular direction and are
  // rejected rather than extended by limits.
  const Vec neg_raised = vscale(-1.0, raise_index(w));
  require(classify_future(neg_raised) == Causality::future_timelike,
          "DH needs a past timelike covector");
  const double r = std::sqrt(interval2(w));
  return vscale(-u_star.d1(r) / r, raise_index(w));
}

}  // namespace lot
