#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "lot/extended_real.hpp"
#include "lot/lorentz.hpp"

namespace lot {

using Matrix = Eigen::MatrixXd;

// Weight function V from the closed-form catalogue, with exact gradient and
// coordinate Hessian ("|x|" below is the Euclidean norm over all coordinates,
// time included).
class Weight {
public:
  enum class Kind { none, quad, linear, gauss };

  static Weight none() { return Weight(Kind::none); }
  // V(x) = (alpha/2) |x|^2
  static Weight quadratic(double alpha) {
    Weight w(Kind::quad);
    w.alpha_ = alpha;
    return w;
  }
  // V(x) = c * x^0
  static Weight linear(double c) {
    Weight w(Kind::linear);
    w.c_ = c;
    return w;
  }
  // V(x) = a * exp(-|x - x0|^2 / (2 sigma^2))
  static Weight gaussian(double a, double sigma, Vec center) {
    Weight w(Kind::gauss);
    w.a_ = a;
    w.sigma_ = sigma;
    w.center_ = std::move(center);
    return w;
  }

  Kind kind() const { return kind_; }
  bool is_zero() const { return kind_ == Kind::none; }

  double value(const Event& x) const;
  Vec gradient(const Event& x) const;   // the differential DV in coordinates
  Matrix hessian(const Event& x) const; // coordinate Hessian (flat connection)

  std::string describe() const;

private:
  explicit Weight(Kind k) : kind_(k) {}
  Kind kind_;
  double alpha_ = 0, c_ = 0, a_ = 0, sigma_ = 1;
  Vec center_;
};

// Flat spacetime R^{1,n-1} with signature (+,-,...,-), weight V, and synthetic
// dimension N in [n, inf]. Time separation, midpoints, and the exponential
// map are exact; Ric = 0 so the Bakry-Emery tensor reduces to the V terms.
class WeightedMinkowski {
public:
  WeightedMinkowski(int dimension, Weight V, double N);

  int dim() const { return dim_; }
  const Weight& V() const { return V_; }
  double N() const { return N_; }
  bool N_is_infinite() const { return std::isinf(N_); }

  // l(x,y): sqrt((dt)^2 - |dx|^2) when future causal (borderline pairs within
  // the cone band count as causal with l = 0), NEG_INF otherwise.
  ExtendedReal time_separation(const Event& x, const Event& y) const;
  double ell_plus(const Event& x, const Event& y) const;  // max(l, 0)
  bool causally_related(const Event& x, const Event& y) const;  // x <= y

  // Affine point x + s(y - x); requires a causal pair.
  Event midpoint(const Event& x, const Event& y, double s) const;

  // Coordinate addition (flat exponential map).
  Event exp_map(const Event& x, const Vec& v) const;

  // Ric^{(N,V)}(v,v) = HessV(v,v) - (DV(v))^2/(N-n) for timelike v (flat
  // Ric = 0; the correction term vanishes at N = inf). The minus sign is the
  // Bakry-Emery convention that makes both directions of the convexity
  // equivalence close: the N-term is spent on the (e')^2/N trace estimate.
  double bakry_emery_ricci(const Event& x, const Vec& v) const;

  // inf over sampled (x in box, unit timelike v) of Ric^{(N,V)}(v,v)/g(v,v);
  // quasi-random sweep plus the coordinate axis directions.
  double timelike_ricci_lower_bound(const Vec& box_lo, const Vec& box_hi,
                                    int samples) const;

private:
  void check_event(const Event& x) const;
  int dim_;
  Weight V_;
  double N_;
};

// --------------------------------------------------- order-completeness shadow
struct ChainVerdict {
  bool ordering_ok = true;
  int offending_index = -1;  // first i with x_i <= x_{i+1} (or x_k <= z) violated
  bool cauchy = false;       // some tail has Euclidean diameter <= eps
  std::vector<double> diameter_tail;  // D_m = diam{x_m, ..., x_k}
};

// Sequence-level check: reports both the ordering validity of the raw samples
// and the Cauchy-modulus verdict (the desk-scale shadow of convergence).
ChainVerdict check_forward_completeness(const std::vector<Event>& points,
                                        const Event& z,
                                        const WeightedMinkowski& st,
                                        double eps);

// Validated chain x_1 <= ... <= x_k <= z; construction throws
// PreconditionError naming the offending index.
class CausalChain {
public:
  CausalChain(std::vector<Event> points, Event bound,
              const WeightedMinkowski& st);
  const std::vector<Event>& points() const { return points_; }
  const Event& bound() const { return bound_; }

private:
  std::vector<Event> points_;
  Event bound_;
};

ChainVerdict check_forward_completeness(const CausalChain& chain,
                                        const WeightedMinkowski& st,
                                        double eps);

// Quasi-random samples of the causal diamond J(x,y) = {z : x <= z <= y}.
std::vector<Event> sample_causal_diamond(const Event& x, const Event& y,
                                         int count,
                                         const WeightedMinkowski& st);

// Spacetime config grammar: "minkowski:<n>" with V one of
// none | quad:alpha=<f> | linear:c=<f> | gauss:a=<f>,sigma=<f> and N a float
// or "inf". Throws ConfigError.
WeightedMinkowski parse_spacetime_spec(const std::string& kind,
                                       const std::string& weight,
                                       const std::string& N);

}  // namespace lot
