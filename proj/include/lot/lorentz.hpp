#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lot/errors.hpp"

namespace lot {

// Coordinates in an orthonormal frame of signature (+,-,...,-); index 0 is time.
// The same flat container serves events, tangent vectors, and covectors; the
// metric is diag(1,-1,...,-1), so raising and lowering are the same involution.
using Vec = std::vector<double>;
using Event = Vec;

inline double minkowski_dot(const Vec& a, const Vec& b) {
  require(a.size() == b.size() && a.size() >= 2, "dimension mismatch");
  double s = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s -= a[i] * b[i];
  return s;
}

// g(v,v); positive for timelike, zero on the light cone, negative for spacelike.
inline double interval2(const Vec& v) { return minkowski_dot(v, v); }

// Index raising/lowering with diag(1,-1,...,-1): flips spatial components.
inline Vec flip_spatial(const Vec& v) {
  Vec w = v;
  for (std::size_t i = 1; i < w.size(); ++i) w[i] = -w[i];
  return w;
}
inline Vec raise_index(const Vec& covector) { return flip_spatial(covector); }
inline Vec lower_index(const Vec& vector) { return flip_spatial(vector); }

inline double euclid_norm(const Vec& v) {
  double s = 0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

inline double spatial_norm(const Vec& v) {
  double s = 0;
  for (std::size_t i = 1; i < v.size(); ++i) s += v[i] * v[i];
  return std::sqrt(s);
}

inline Vec vsub(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline Vec vadd(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
inline Vec vscale(double s, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
  return r;
}

// Light-cone classification tolerance: borderline vectors within this band of
// the cone count as causal (with vanishing Lorentzian norm). Keeps coupling
// feasibility robust against round-off at the cone.
inline double cone_band(double dt, double dr) {
  return 1e-12 * std::max({1.0, std::abs(dt), dr});
}

enum class Causality { future_timelike, future_null, spacelike_or_past };

inline Causality classify_future(const Vec& v) {
  const double dt = v[0];
  const double dr = spatial_norm(v);
  const double band = cone_band(dt, dr);
  if (dt < dr - band) return Causality::spacelike_or_past;
  if (dt <= dr + band) return Causality::future_null;
  return Causality::future_timelike;
}

inline bool is_future_causal(const Vec& v) {
  return classify_future(v) != Causality::spacelike_or_past;
}

// |v|_g for future causal v, with the cone band clamping tiny negatives to 0.
inline double causal_norm(const Vec& v) {
  require(is_future_causal(v), "vector is not future causal");
  if (classify_future(v) == Causality::future_null) return 0.0;
  return std::sqrt(std::max(interval2(v), 0.0));
}

// A covector w is past causal iff its raised vector points to the past cone.
inline bool is_past_causal_covector(const Vec& w) {
  Vec raised = raise_index(w);
  for (double& c : raised) c = -c;  // past cone = -(future cone)
  return is_future_causal(raised);
}

// |w|_g of a causal covector (Lorentzian norm of the raised vector).
inline double covector_norm(const Vec& w) {
  return std::sqrt(std::max(interval2(w), 0.0));  // |w|^2_g = g^{ab} w_a w_b
}

}  // namespace lot
