#include "lot/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "lot/errors.hpp"
#include "lot/kernels.hpp"
#include "lot/support.hpp"

namespace lot {

namespace {

Vec effective_center(const Vec& center, std::size_t dim) {
  if (!center.empty()) return center;
  return Vec(dim, 0.0);
}

}  // namespace

double Weight::value(const Event& x) const {
  switch (kind_) {
    case Kind::none:
      return 0.0;
    case Kind::quad: {
      double s = 0;
      for (double c : x) s += c * c;
      return 0.5 * alpha_ * s;
    }
    case Kind::linear:
      return c_ * x[0];
    case Kind::gauss: {
      const Vec c0 = effective_center(center_, x.size());
      double s = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        s += (x[i] - c0[i]) * (x[i] - c0[i]);
      return a_ * std::exp(-s / (2.0 * sigma_ * sigma_));
    }
  }
  return 0.0;
}

Vec Weight::gradient(const Event& x) const {
  Vec g(x.size(), 0.0);
  switch (kind_) {
    case Kind::none:
      break;
    case Kind::quad:
      for (std::size_t i = 0; i < x.size(); ++i) g[i] = alpha_ * x[i];
      break;
    case Kind::linear:
      g[0] = c_;
      break;
    case Kind::gauss: {
      const Vec c0 = effective_center(center_, x.size());
      const double v = value(x);
      for (std::size_t i = 0; i < x.size(); ++i)
        g[i] = -v * (x[i] - c0[i]) / (sigma_ * sigma_);
      break;
    }
  }
  return g;
}

Matrix Weight::hessian(const Event& x) const {
  const auto n = static_cast<Eigen::Index>(x.size());
  Matrix h = Matrix::Zero(n, n);
  switch (kind_) {
    case Kind::none:
    case Kind::linear:
      break;
    case Kind::quad:
      h = alpha_ * Matrix::Identity(n, n);
      break;
    case Kind::gauss: {
      const Vec c0 = effective_center(center_, x.size());
      const double v = value(x);
      const double s2 = sigma_ * sigma_;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
          const double di = x[i] - c0[i];
          const double dj = x[j] - c0[j];
          h(i, j) = v * (di * dj / (s2 * s2) - (i == j ? 1.0 / s2 : 0.0));
        }
      break;
    }
  }
  return h;
}

std::string Weight::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::none:
      os << "none";
      break;
    case Kind::quad:
      os << "quad:alpha=" << alpha_;
      break;
    case Kind::linear:
      os << "linear:c=" << c_;
      break;
    case Kind::gauss:
      os << "gauss:a=" << a_ << ",sigma=" << sigma_;
      break;
  }
  return os.str();
}

WeightedMinkowski::WeightedMinkowski(int dimension, Weight V, double N)
    : dim_(dimension), V_(std::move(V)), N_(N) {
  require(dim_ >= 2, "spacetime dimension must be >= 2");
  require(std::isinf(N_) || N_ >= dim_, "synthetic dimension N must be in [n, inf]");
  // N = n forces V = 0 by convention.
  require(std::isinf(N_) || N_ > dim_ || V_.is_zero(),
          "N = n requires V = 0");
}

void WeightedMinkowski::check_event(const Event& x) const {
  require(static_cast<int>(x.size()) == dim_, "dimension mismatch");
  for (double c : x) require(std::isfinite(c), "event has non-finite coordinate");
}

ExtendedReal WeightedMinkowski::time_separation(const Event& x,
                                                const Event& y) const {
  check_event(x);
  check_event(y);
  if (dim_ == 2) return ExtendedReal(kernels::ell2d_one(x[0], x[1], y[0], y[1]));
  const double dt = y[0] - x[0];
  double r2 = 0;
  for (int i = 1; i < dim_; ++i) r2 += (y[i] - x[i]) * (y[i] - x[i]);
  const double dr = std::sqrt(r2);
  const double band = 1e-12 * std::max({1.0, std::abs(dt), dr});
  if (dt < dr - band) return ExtendedReal::neg_inf();
  return ExtendedReal(std::sqrt(std::max(dt * dt - r2, 0.0)));
}

double WeightedMinkowski::ell_plus(const Event& x, const Event& y) const {
  const ExtendedReal l = time_separation(x, y);
  return l.is_neg_inf() ? 0.0 : std::max(l.raw(), 0.0);
}

bool WeightedMinkowski::causally_related(const Event& x, const Event& y) const {
  return !time_separation(x, y).is_neg_inf();
}

Event WeightedMinkowski::midpoint(const Event& x, const Event& y,
                                  double s) const {
  require(s >= 0.0 && s <= 1.0, "midpoint parameter must lie in [0,1]");
  require(causally_related(x, y), "midpoint needs a causal pair");
  Event z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + s * (y[i] - x[i]);
  return z;
}

Event WeightedMinkowski::exp_map(const Event& x, const Vec& v) const {
  check_event(x);
  require(v.size() == x.size(), "dimension mismatch");
  return vadd(x, v);
}

double WeightedMinkowski::bakry_emery_ricci(const Event& x,
                                            const Vec& v) const {
  check_event(x);
  require(v.size() == x.size(), "dimension mismatch");
  require(interval2(v) > 0.0, "Bakry-Emery Ricci is evaluated on timelike v");
  const Matrix h = V_.hessian(x);
  Eigen::Map<const Eigen::VectorXd> ve(v.data(), static_cast<Eigen::Index>(v.size()));
  double out = ve.dot(h * ve);
  if (!N_is_infinite() && N_ > dim_) {
    const Vec g = V_.gradient(x);
    double dv = 0;
    for (std::size_t i = 0; i < v.size(); ++i) dv += g[i] * v[i];
    out -= dv * dv / (N_ - dim_);
  }
  return out;
}

double WeightedMinkowski::timelike_ricci_lower_bound(const Vec& box_lo,
                                                     const Vec& box_hi,
                                                     int samples) const {
  require(samples >= 1, "need at least one sample");
  require(static_cast<int>(box_lo.size()) == dim_ &&
              static_cast<int>(box_hi.size()) == dim_,
          "dimension mismatch");
  for (int i = 0; i < dim_; ++i)
    require(box_lo[i] <= box_hi[i], "empty region");

  const int spatial = dim_ - 1;
  double best = std::numeric_limits<double>::infinity();

  auto consider = [&](const Event& x, const Vec& v) {
    // v is unit timelike by construction: g(v,v) = cosh^2 - sinh^2 = 1.
    best = std::min(best, bakry_emery_ricci(x, v));
  };

  // Quasi-random sweep over (box point, rapidity, spatial direction).
  for (int k = 0; k < samples; ++k) {
    const std::vector<double> h =
        support::halton_point(static_cast<std::uint64_t>(k), 2 * dim_);
    Event x(dim_);
    for (int i = 0; i < dim_; ++i)
      x[i] = box_lo[i] + h[i] * (box_hi[i] - box_lo[i]);
    const double chi = 3.0 * h[dim_];
    Vec dir(spatial);
    double norm = 0;
    for (int i = 0; i < spatial; ++i) {
      dir[i] = 2.0 * h[dim_ + 1 + i] - 1.0;
      norm += dir[i] * dir[i];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) {
      dir.assign(spatial, 0.0);
      dir[0] = 1.0;
      norm = 1.0;
    }
    Vec v(dim_);
    v[0] = std::cosh(chi);
    for (int i = 0; i < spatial; ++i) v[i + 1] = std::sinh(chi) * dir[i] / norm;
    consider(x, v);
  }

  // Deterministic axis probes (the analytic infimum for the catalogue weights
  // is attained on pure-time or axis-boosted directions).
  std::vector<Event> probes = {box_lo, box_hi};
  Event mid(dim_);
  for (int i = 0; i < dim_; ++i) mid[i] = 0.5 * (box_lo[i] + box_hi[i]);
  probes.push_back(mid);
  for (const Event& x : probes) {
    for (int axis = 0; axis < spatial; ++axis) {
      for (double chi : {0.0, 0.5, 1.0, 2.0, 3.0}) {
        for (double sgn : {1.0, -1.0}) {
          Vec v(dim_, 0.0);
          v[0] = std::cosh(chi);
          v[axis + 1] = sgn * std::sinh(chi);
          consider(x, v);
        }
      }
    }
  }
  return best;
}

ChainVerdict check_forward_completeness(const std::vector<Event>& points,
                                        const Event& z,
                                        const WeightedMinkowski& st,
                                        double eps) {
  require(!points.empty(), "empty chain");
  require(eps > 0.0, "Cauchy modulus must be positive");
  ChainVerdict v;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!st.causally_related(points[i], points[i + 1])) {
      v.ordering_ok = false;
      v.offending_index = static_cast<int>(i);
      break;
    }
  }
  if (v.ordering_ok && !st.causally_related(points.back(), z)) {
    v.ordering_ok = false;
    v.offending_index = static_cast<int>(points.size()) - 1;
  }

  // Tail diameters in the background Euclidean metric, via suffix recursion
  // D_m = max(D_{m+1}, max_{j>m} |x_m - x_j|).
  const std::size_t k = points.size();
  v.diameter_tail.assign(k, 0.0);
  for (std::size_t m = k; m-- > 0;) {
    double d = (m + 1 < k) ? v.diameter_tail[m + 1] : 0.0;
    for (std::size_t j = m + 1; j < k; ++j)
      d = std::max(d, euclid_norm(vsub(points[m], points[j])));
    v.diameter_tail[m] = d;
  }
  // Desk-scale Cauchy verdict: the second half of the sample must already sit
  // inside an eps-ball (a fixed-modulus shadow of the true Cauchy property).
  v.cauchy = v.diameter_tail[k / 2] <= eps;
  return v;
}

CausalChain::CausalChain(std::vector<Event> points, Event bound,
                         const WeightedMinkowski& st)
    : points_(std::move(points)), bound_(std::move(bound)) {
  require(!points_.empty(), "empty chain");
  for (std::size_t i = 0; i + 1 < points_.size(); ++i)
    require(st.causally_related(points_[i], points_[i + 1]),
            "causal chain ordering violated at index " + std::to_string(i));
  require(st.causally_related(points_.back(), bound_),
          "causal chain bound violated at index " +
              std::to_string(points_.size() - 1));
}

ChainVerdict check_forward_completeness(const CausalChain& chain,
                                        const WeightedMinkowski& st,
                                        double eps) {
  return check_forward_completeness(chain.points(), chain.bound(), st, eps);
}

std::vector<Event> sample_causal_diamond(const Event& x, const Event& y,
                                         int count,
                                         const WeightedMinkowski& st) {
  require(count >= 1, "need at least one sample");
  require(st.causally_related(x, y), "diamond needs a causal pair");
  const int dim = st.dim();
  const double D = y[0] - x[0];
  Vec lo(dim), hi(dim);
  lo[0] = x[0];
  hi[0] = y[0];
  for (int i = 1; i < dim; ++i) {
    lo[i] = std::min(x[i], y[i]) - D;
    hi[i] = std::max(x[i], y[i]) + D;
  }
  std::vector<Event> out;
  out.reserve(count);
  std::uint64_t index = 0;
  const std::uint64_t max_attempts =
      static_cast<std::uint64_t>(count) * 10000ull;
  while (out.size() < static_cast<std::size_t>(count) && index < max_attempts) {
    const std::vector<double> h = support::halton_point(index++, dim);
    Event zc(dim);
    for (int i = 0; i < dim; ++i) zc[i] = lo[i] + h[i] * (hi[i] - lo[i]);
    if (st.causally_related(x, zc) && st.causally_related(zc, y))
      out.push_back(std::move(zc));
  }
  if (out.size() < static_cast<std::size_t>(count))
    throw SolverError("causal diamond sampling starved (degenerate diamond?)");
  return out;
}

namespace {

double parse_param(const std::string& params, const std::string& key) {
  const std::string needle = key + "=";
  const auto pos = params.find(needle);
  if (pos == std::string::npos)
    throw ConfigError("weight spec: missing parameter '" + key + "' in \"" +
                      params + "\"");
  try {
    return std::stod(params.substr(pos + needle.size()));
  } catch (const std::exception&) {
    throw ConfigError("weight spec: bad value for '" + key + "' in \"" +
                      params + "\"");
  }
}

}  // namespace

WeightedMinkowski parse_spacetime_spec(const std::string& kind,
                                       const std::string& weight,
                                       const std::string& N) {
  const std::string prefix = "minkowski:";
  if (kind.rfind(prefix, 0) != 0)
    throw ConfigError("spacetime spec: expected minkowski:<n>, got \"" + kind + "\"");
  int dim = 0;
  try {
    dim = std::stoi(kind.substr(prefix.size()));
  } catch (const std::exception&) {
    throw ConfigError("spacetime spec: bad dimension in \"" + kind + "\"");
  }
  if (dim < 2) throw ConfigError("spacetime spec: dimension must be >= 2");

  Weight V = Weight::none();
  if (weight.empty() || weight == "none") {
    V = Weight::none();
  } else if (weight.rfind("quad:", 0) == 0) {
    V = Weight::quadratic(parse_param(weight.substr(5), "alpha"));
  } else if (weight.rfind("linear:", 0) == 0) {
    V = Weight::linear(parse_param(weight.substr(7), "c"));
  } else if (weight.rfind("gauss:", 0) == 0) {
    const std::string params = weight.substr(6);
    V = Weight::gaussian(parse_param(params, "a"), parse_param(params, "sigma"),
                         {});
  } else {
    throw ConfigError("weight spec: unrecognized \"" + weight + "\"");
  }

  double Nval;
  if (N == "inf" || N.empty()) {
    Nval = std::numeric_limits<double>::infinity();
  } else {
    try {
      Nval = std::stod(N);
    } catch (const std::exception&) {
      throw ConfigError("spacetime spec: bad N \"" + N + "\"");
    }
  }
  if (!std::isinf(Nval)) {
    if (!(Nval >= dim))
      throw ConfigError("spacetime spec: N must be >= the dimension or \"inf\"");
    if (Nval <= dim && !V.is_zero())
      throw ConfigError("spacetime spec: N = n requires weight \"none\"");
  }
  return WeightedMinkowski(dim, V, Nval);
}

}  // namespace lot
