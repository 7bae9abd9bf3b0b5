#include "lot/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "lot/errors.hpp"
#include "lot/kernels.hpp"
#include "lot/support.hpp"

namespace lot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_scale(const Event& z) {
  double s = 1.0;
  for (double c : z) s = std::max(s, std::abs(c));
  return s;
}

}  // namespace

DiscreteMeasure interpolate(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, const Coupling& pi,
                            double s, const WeightedMinkowski& st) {
  require(s >= 0.0 && s <= 1.0, "interpolation parameter must lie in [0,1]");
  require(pi.rows() == mu.size() && pi.cols() == nu.size(),
          "coupling shape does not match the marginals");
  std::vector<Event> atoms;
  std::vector<double> masses;
  for (std::size_t i = 0; i < pi.rows(); ++i)
    for (std::size_t j = 0; j < pi.cols(); ++j) {
      const double m = pi(i, j);
      if (m <= 0.0) continue;
      const ExtendedReal l = st.time_separation(mu.point(i), nu.point(j));
      require(!l.is_neg_inf() && l.raw() > 0.0,
              "coupling mass on a non-timelike edge");
      const Event z = st.midpoint(mu.point(i), nu.point(j), s);
      // Merge coincident midpoints.
      bool merged = false;
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double tol =
            1e-12 * std::max(point_scale(z), point_scale(atoms[k]));
        if (euclid_norm(vsub(z, atoms[k])) <= tol) {
          masses[k] += m;
          merged = true;
          break;
        }
      }
      if (!merged) {
        atoms.push_back(z);
        masses.push_back(m);
      }
    }
  return DiscreteMeasure(std::move(atoms), std::move(masses));
}

GeodesicPath path_from_coupling(const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, const Coupling& pi,
                                double lambda, const WeightedMinkowski& st,
                                int grid_points) {
  require(grid_points >= 2, "grid needs at least two points");
  GeodesicPath path;
  path.coupling = pi;
  path.lambda = lambda;
  path.s_grid.resize(grid_points);
  for (int k = 0; k < grid_points; ++k)
    path.s_grid[k] = static_cast<double>(k) / (grid_points - 1);
  path.s_grid.back() = 1.0;
  path.measures.reserve(grid_points);
  for (double s : path.s_grid)
    path.measures.push_back(interpolate(mu, nu, pi, s, st));
  return path;
}

GeodesicPath build_geodesic(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu,
                            const WeightedMinkowski& st,
                            const AdmissibleFunction& u, int grid_points,
                            double tol) {
  const TransportSolution sol = ell_u(mu, nu, st, u, tol);
  require(sol.lambda.is_finite() && sol.lambda.raw() > 0.0,
          "geodesics need a positive time separation");
  return path_from_coupling(mu, nu, *sol.coupling, sol.lambda.raw(), st,
                            grid_points);
}

double geodesy_defect(const GeodesicPath& path, const WeightedMinkowski& st,
                      const AdmissibleFunction& u, double tol) {
  require(path.measures.size() == path.s_grid.size() &&
              path.s_grid.size() >= 2,
          "invalid path");
  double defect = 0.0;
  for (std::size_t a = 0; a + 1 < path.s_grid.size(); ++a)
    for (std::size_t b = a + 1; b < path.s_grid.size(); ++b) {
      const TransportSolution sol =
          ell_u(path.measures[a], path.measures[b], st, u, tol);
      const double target = (path.s_grid[b] - path.s_grid[a]) * path.lambda;
      const double got = sol.lambda.is_finite() ? sol.lambda.raw() : -kInf;
      defect = std::max(defect, std::abs(got - target));
    }
  return defect;
}

PotentialField PotentialField::affine(Vec a, double b) {
  PotentialField f;
  f.quadratic_ = false;
  const auto n = static_cast<Eigen::Index>(a.size());
  f.Q_ = Matrix::Zero(n, n);
  f.a_ = std::move(a);
  f.b_ = b;
  return f;
}

PotentialField PotentialField::quadratic(Matrix Q, Vec a, double b) {
  PotentialField f;
  require(Q.rows() == Q.cols() &&
              Q.rows() == static_cast<Eigen::Index>(a.size()),
          "quadratic potential shape mismatch");
  require((Q - Q.transpose()).norm() <= 1e-12 * std::max(1.0, Q.norm()),
          "quadratic potential needs a symmetric matrix");
  f.quadratic_ = true;
  f.Q_ = std::move(Q);
  f.a_ = std::move(a);
  f.b_ = b;
  return f;
}

double PotentialField::value(const Event& x) const {
  require(x.size() == a_.size(), "dimension mismatch");
  Eigen::Map<const Eigen::VectorXd> xe(x.data(),
                                       static_cast<Eigen::Index>(x.size()));
  double out = b_;
  for (std::size_t i = 0; i < x.size(); ++i) out += a_[i] * x[i];
  if (quadratic_) out += 0.5 * xe.dot(Q_ * xe);
  return out;
}

Vec PotentialField::gradient(const Event& x) const {
  require(x.size() == a_.size(), "dimension mismatch");
  Vec g = a_;
  if (quadratic_) {
    Eigen::Map<const Eigen::VectorXd> xe(x.data(),
                                         static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd q = Q_ * xe;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += q[i];
  }
  return g;
}

std::string PotentialField::describe() const {
  std::ostringstream os;
  os << (quadratic_ ? "quadratic" : "affine") << ":a=[";
  for (std::size_t i = 0; i < a_.size(); ++i)
    os << (i ? "," : "") << a_[i];
  os << "],b=" << b_;
  return os.str();
}

Matrix hamiltonian_hessian(const Vec& w, const AdmissibleFunction& u_conj) {
  Vec minus_raised = raise_index(w);
  for (double& c : minus_raised) c = -c;
  require(classify_future(minus_raised) == Causality::future_timelike,
          "Hamiltonian Hessian needs a strictly past-timelike covector");
  const double r = covector_norm(w);
  const double a1 = u_conj.d1(r);
  const double b1 = u_conj.d2(r);
  const auto n = static_cast<Eigen::Index>(w.size());
  // D^2H^{ab} = -(a1/r) g^{ab} + (a1 - r b1) w_*^a w_*^b / r^3.
  Matrix out = Matrix::Zero(n, n);
  const Vec ws = raise_index(w);
  const double coef = (a1 - r * b1) / (r * r * r);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b)
      out(a, b) = coef * ws[a] * ws[b];
    out(a, a) -= (a1 / r) * (a == 0 ? 1.0 : -1.0);
  }
  return out;
}

Vec transport_velocity(const Vec& grad_phi, const AdmissibleFunction& u,
                       double lambda) {
  require(lambda > 0.0, "velocity needs lambda > 0");
  const UPtr conj = conjugate(rescale(borrow(u), lambda));
  return hamiltonian_gradient(grad_phi, *conj);
}

TransportMapSample transport_map(const PotentialField& phi,
                                 const AdmissibleFunction& u, double lambda,
                                 double s, const std::vector<Event>& cloud,
                                 const std::vector<double>& mass,
                                 const WeightedMinkowski& st) {
  require(s >= 0.0 && s <= 1.0, "map parameter must lie in [0,1]");
  require(!cloud.empty() && cloud.size() == mass.size(),
          "cloud and masses disagree");
  const UPtr conj = conjugate(rescale(borrow(u), lambda));
  const auto n = static_cast<Eigen::Index>(st.dim());
  TransportMapSample out;
  out.s = s;
  out.base = cloud;
  out.mass = mass;
  out.velocity.reserve(cloud.size());
  out.mapped.reserve(cloud.size());
  out.jacobian.reserve(cloud.size());
  out.det_jacobian.reserve(cloud.size());
  for (const Event& x : cloud) {
    require(static_cast<int>(x.size()) == st.dim(), "dimension mismatch");
    const Vec w = phi.gradient(x);
    const Vec v = hamiltonian_gradient(w, *conj);
    const Matrix Dv = hamiltonian_hessian(w, *conj) * phi.hessian();
    const Matrix A = Matrix::Identity(n, n) + s * Dv;
    const double det = A.determinant();
    if (s < 1.0 && det <= 1e-12)
      throw SolverError("transport map Jacobian degenerates at s = " +
                        std::to_string(s) + " (det = " + std::to_string(det) +
                        ")");
    out.velocity.push_back(v);
    out.mapped.push_back(st.exp_map(x, vscale(s, v)));
    out.dv.push_back(Dv);
    out.jacobian.push_back(A);
    out.det_jacobian.push_back(det);
  }
  return out;
}

NonCrossingVerdict non_crossing_check(
    const std::vector<std::pair<Event, Event>>& pairs, double s,
    const AdmissibleFunction& u, double lambda,
    const WeightedMinkowski& st) {
  require(s > 0.0 && s < 1.0, "crossing check needs s in (0,1)");
  require(lambda > 0.0, "crossing check needs lambda > 0");
  std::vector<double> ells(pairs.size());
  std::vector<Event> mids(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const ExtendedReal l = st.time_separation(pairs[k].first, pairs[k].second);
    require(!l.is_neg_inf() && l.raw() > 0.0, "pairs must be timelike");
    ells[k] = l.raw();
    mids[k] = st.midpoint(pairs[k].first, pairs[k].second, s);
  }
  auto cost = [&](const Event& x, const Event& y) {
    const ExtendedReal l = st.time_separation(x, y);
    if (l.is_neg_inf()) return -kInf;
    if (l.raw() == 0.0) {
      const ExtendedReal z = u.value_at_zero();
      return z.is_neg_inf() ? -kInf : z.raw();
    }
    return u.eval(l.raw() / lambda);
  };
  NonCrossingVerdict verdict;
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a + 1; b < pairs.size(); ++b) {
      const bool same = pairs[a].first == pairs[b].first &&
                        pairs[a].second == pairs[b].second;
      if (same) continue;  // identical pairs trivially coincide
      const double tol =
          1e-12 * std::max(point_scale(mids[a]), point_scale(mids[b]));
      if (euclid_norm(vsub(mids[a], mids[b])) > tol) continue;
      // Collision: check the 2-cycle inequality hypothesis.
      const double lhs = u.eval(ells[a] / lambda) + u.eval(ells[b] / lambda);
      const double cross =
          cost(pairs[b].first, pairs[a].second) +
          cost(pairs[a].first, pairs[b].second);
      double margin;
      if (std::isinf(cross) && cross < 0)
        margin = kInf;  // vacuous right-hand side
      else
        margin = lhs - cross;
      NonCrossingVerdict::Collision c;
      c.a = a;
      c.b = b;
      c.margin = margin;
      c.hypothesis_violated = margin < 0.0;
      if (!c.hypothesis_violated) verdict.ok = false;
      verdict.collisions.push_back(c);
    }
  return verdict;
}

double BoxDensity::value(const Event& x) const {
  require(x.size() == lo.size() && x.size() == hi.size(),
          "dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] < lo[i] || x[i] > hi[i]) return 0.0;
  return 1.0 / volume();
}

double BoxDensity::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    require(hi[i] > lo[i], "degenerate density box");
    v *= hi[i] - lo[i];
  }
  return v;
}

double monge_ampere_residual(const PotentialField& phi, const BoxDensity& rho0,
                             const AdmissibleFunction& u, double lambda,
                             double s, const WeightedMinkowski& st,
                             int points_per_axis) {
  require(points_per_axis >= 2, "need at least two quadrature points");
  const int dim = st.dim();
  require(static_cast<int>(rho0.lo.size()) == dim, "density box dimension");
  const UPtr conj = conjugate(rescale(borrow(u), lambda));

  // Tensor Gauss-Legendre grid over the box.
  std::vector<support::Quadrature> axes;
  for (int a = 0; a < dim; ++a)
    axes.push_back(
        support::gauss_legendre(points_per_axis, rho0.lo[a], rho0.hi[a]));
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= axes[a].nodes.size();

  auto map_point = [&](const Event& x) {
    const Vec v = hamiltonian_gradient(phi.gradient(x), *conj);
    return vadd(x, vscale(s, v));
  };

  std::vector<double> push_terms(total), src_terms(total);
  support::parallel_for(total, [&](std::size_t flat) {
    Event x(dim);
    double wq = 1.0;
    std::size_t rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      const std::size_t k = rest % axes[a].nodes.size();
      rest /= axes[a].nodes.size();
      x[a] = axes[a].nodes[k];
      wq *= axes[a].weights[k];
    }
    // Analytic Jacobian determinant of F_s at x.
    const auto n = static_cast<Eigen::Index>(dim);
    const Matrix Dv = hamiltonian_hessian(phi.gradient(x), *conj) * phi.hessian();
    const double j_an = (Matrix::Identity(n, n) + s * Dv).determinant();
    // Finite-difference Jacobian of the actual map.
    Matrix J(n, n);
    const double h = 1e-5 * point_scale(x);
    for (int b = 0; b < dim; ++b) {
      Event xp = x, xm = x;
      xp[b] += h;
      xm[b] -= h;
      const Event fp = map_point(xp), fm = map_point(xm);
      for (int a = 0; a < dim; ++a) J(a, b) = (fp[a] - fm[a]) / (2.0 * h);
    }
    const double j_fd = J.determinant();
    const double density = rho0.value(x);
    src_terms[flat] = wq * density;
    push_terms[flat] = wq * density * (j_fd / j_an);
  });
  const double source_mass = kernels::pairwise_sum(src_terms);
  const double pushed_mass = kernels::pairwise_sum(push_terms);
  require(source_mass > 0.0, "density box carries no mass");
  return std::abs(pushed_mass - source_mass) / source_mass;
}

}  // namespace lot
