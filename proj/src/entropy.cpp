#include "lot/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "lot/errors.hpp"
#include "lot/kernels.hpp"
#include "lot/support.hpp"

namespace lot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_cloud(const DensityCloud& cloud, double s) {
  const std::size_t n = cloud.base.size();
  require(n > 0, "empty density cloud");
  require(cloud.mass.size() == n && cloud.rho0.size() == n &&
              cloud.jacobian.size() == n && cloud.weight_at_mapped.size() == n,
          "density cloud field lengths disagree");
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    require(cloud.rho0[k] > 0.0, "source density must be positive");
    if (s < 1.0)
      require(cloud.jacobian[k] > 0.0, "nonpositive Jacobian at s < 1");
    total += cloud.mass[k];
  }
  require(std::abs(total - 1.0) <= 1e-10, "cloud mass must sum to 1");
}

}  // namespace

DensityCloud density_snapshot(const PotentialField& phi,
                              const AdmissibleFunction& u, double lambda,
                              double s, const std::vector<Event>& base,
                              const std::vector<double>& mass,
                              const std::vector<double>& rho0,
                              const WeightedMinkowski& st) {
  require(base.size() == mass.size() && base.size() == rho0.size(),
          "cloud field lengths disagree");
  const TransportMapSample sample =
      transport_map(phi, u, lambda, s, base, mass, st);
  DensityCloud cloud;
  cloud.s = s;
  cloud.base = base;
  cloud.mass = mass;
  cloud.rho0 = rho0;
  cloud.jacobian = sample.det_jacobian;
  cloud.weight_at_mapped.resize(base.size());
  for (std::size_t k = 0; k < base.size(); ++k)
    cloud.weight_at_mapped[k] = st.V().value(sample.mapped[k]);
  validate_cloud(cloud, s);
  return cloud;
}

double relative_entropy(const DensityCloud& cloud, double s) {
  validate_cloud(cloud, s);
  const std::size_t n = cloud.base.size();
  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k) {
    require(cloud.jacobian[k] > 0.0, "nonpositive Jacobian");
    terms[k] = std::log(cloud.rho0[k]) - std::log(cloud.jacobian[k]) +
               cloud.weight_at_mapped[k];
  }
  return kernels::pairwise_dot(cloud.mass, terms);
}

JacobianLogDerivs jacobian_log_derivatives(const TransportMapSample& sample) {
  const std::size_t n = sample.base.size();
  require(n > 0, "empty map sample");
  JacobianLogDerivs out;
  out.phi_prime.resize(n);
  out.phi_second.resize(n);
  out.worst_trace_margin = std::numeric_limits<double>::infinity();
  const double dim = sample.base[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    require(std::abs(sample.det_jacobian[k]) > 1e-300,
            "singular Jacobian in log-derivative");
    const Matrix B = sample.dv[k] * sample.jacobian[k].inverse();
    const double tr = B.trace();
    const double tr2 = (B * B).trace();
    out.phi_prime[k] = -tr;
    out.phi_second[k] = tr2;  // + Ric(F', F') = 0 in the flat model
    out.worst_trace_margin =
        std::min(out.worst_trace_margin, tr2 - tr * tr / dim);
  }
  return out;
}

EntropyCurve entropy_curve(const PotentialField& phi,
                           const AdmissibleFunction& u, double lambda,
                           const std::vector<Event>& base,
                           const std::vector<double>& mass,
                           const std::vector<double>& rho0,
                           const WeightedMinkowski& st,
                           const std::vector<double>& s_grid, double K) {
  require(s_grid.size() >= 3, "entropy grid needs at least three points");
  for (std::size_t k = 0; k + 1 < s_grid.size(); ++k)
    require(s_grid[k + 1] > s_grid[k], "grid must increase");
  require(s_grid.front() >= 0.0 && s_grid.back() <= 1.0,
          "grid must lie in [0,1]");
  const double h = s_grid[1] - s_grid[0];
  for (std::size_t k = 0; k + 1 < s_grid.size(); ++k)
    require(std::abs((s_grid[k + 1] - s_grid[k]) - h) <= 1e-12,
            "finite differences need a uniform grid");

  EntropyCurve curve;
  curve.s_grid = s_grid;
  curve.K = K;
  curve.N = st.N();
  curve.lambda = lambda;

  const std::size_t n = base.size();
  const std::size_t m = s_grid.size();
  curve.e.resize(m);
  curve.e1_analytic.resize(m);
  curve.e2_analytic.resize(m);

  // ||ell||_{L^2(pi)} along the map's endpoint coupling.
  {
    const TransportMapSample end =
        transport_map(phi, u, lambda, 1.0, base, mass, st);
    std::vector<double> sq(n);
    for (std::size_t k = 0; k < n; ++k) {
      const ExtendedReal l = st.time_separation(base[k], end.mapped[k]);
      require(!l.is_neg_inf(), "map endpoint is not causal");
      sq[k] = l.raw() * l.raw();
    }
    curve.ell_l2_pi = std::sqrt(kernels::pairwise_dot(mass, sq));
  }

  for (std::size_t gi = 0; gi < m; ++gi) {
    const double s = s_grid[gi];
    const TransportMapSample sample =
        transport_map(phi, u, lambda, s, base, mass, st);
    const JacobianLogDerivs logd = jacobian_log_derivatives(sample);

    std::vector<double> e_terms(n), e1_terms(n), e2_terms(n);
    support::parallel_for(n, [&](std::size_t k) {
      const Event& y = sample.mapped[k];
      e_terms[k] = std::log(rho0[k]) - std::log(sample.det_jacobian[k]) +
                   st.V().value(y);
      const Vec dV = st.V().gradient(y);
      double dV_v = 0.0;
      for (std::size_t a = 0; a < dV.size(); ++a)
        dV_v += dV[a] * sample.velocity[k][a];
      e1_terms[k] = dV_v + logd.phi_prime[k];
      const Matrix H = st.V().hessian(y);
      Eigen::Map<const Eigen::VectorXd> ve(
          sample.velocity[k].data(),
          static_cast<Eigen::Index>(sample.velocity[k].size()));
      e2_terms[k] = logd.phi_second[k] + ve.dot(H * ve);
    });
    curve.e[gi] = kernels::pairwise_dot(mass, e_terms);
    curve.e1_analytic[gi] = kernels::pairwise_dot(mass, e1_terms);
    curve.e2_analytic[gi] = kernels::pairwise_dot(mass, e2_terms);
  }

  curve.e1_fd.assign(m, kNaN);
  curve.e2_fd.assign(m, kNaN);
  for (std::size_t gi = 1; gi + 1 < m; ++gi) {
    curve.e1_fd[gi] = (curve.e[gi + 1] - curve.e[gi - 1]) / (2.0 * h);
    curve.e2_fd[gi] =
        (curve.e[gi + 1] - 2.0 * curve.e[gi] + curve.e[gi - 1]) / (h * h);
  }
  return curve;
}

ConvexityReport convexity_report(const EntropyCurve& curve) {
  const std::size_t m = curve.s_grid.size();
  require(m >= 3, "curve too short");
  ConvexityReport report;
  report.margin_lambda2.resize(m);
  report.margin_l2pi.resize(m);
  const bool n_infinite = std::isinf(curve.N);
  for (std::size_t k = 0; k < m; ++k) {
    const double e1 = curve.e1_analytic[k];
    const double e2 = curve.e2_analytic[k];
    const double nterm = n_infinite ? 0.0 : e1 * e1 / curve.N;
    report.margin_lambda2[k] =
        e2 - nterm - curve.K * curve.lambda * curve.lambda;
    // The intro theorem's right-hand side exactly as typeset (unsquared).
    report.margin_l2pi[k] = e2 - nterm - curve.K * curve.ell_l2_pi;
  }
  report.min_margin_lambda2 = std::numeric_limits<double>::infinity();
  report.min_margin_l2pi = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < m; ++k) {  // interior grid points only
    report.min_margin_lambda2 =
        std::min(report.min_margin_lambda2, report.margin_lambda2[k]);
    report.min_margin_l2pi =
        std::min(report.min_margin_l2pi, report.margin_l2pi[k]);
  }
  report.convex = report.min_margin_lambda2 >= -1e-6;
  return report;
}

double saturation_scale(const std::vector<double>& ell,
                        const std::vector<double>& mass,
                        const AdmissibleFunction& u) {
  require(!ell.empty() && ell.size() == mass.size(),
          "displacement and mass lists disagree");
  double lo = *std::min_element(ell.begin(), ell.end());
  double hi = *std::max_element(ell.begin(), ell.end());
  require(lo > 0.0, "saturation needs strictly timelike displacements");
  const double u1 = u.normalization();
  if (hi - lo <= 1e-15 * hi) return hi;  // rigid displacement
  auto zeta = [&](double lam, double* dz) {
    double z = -u1, d = 0.0;
    for (std::size_t k = 0; k < ell.size(); ++k) {
      const double s = ell[k] / lam;
      z += mass[k] * u.eval(s);
      d -= mass[k] * u.d1(s) * s / lam;
    }
    if (dz) *dz = d;
    return z;
  };
  double lam = 0.5 * (lo + hi);
  for (int it = 0; it < 80; ++it) {
    double dz = 0.0;
    const double z = zeta(lam, &dz);
    if (std::abs(z) <= 1e-14 * std::max(1.0, std::abs(u1))) break;
    if (z > 0)
      lo = lam;
    else
      hi = lam;
    double next = (dz < 0.0) ? lam - z / dz : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - lam) <= 1e-16 * lam) break;
    lam = next;
  }
  return lam;
}

RicciFailureReport ricci_failure_experiment(
    const Vec& v_hat, const std::vector<double>& radii,
    const AdmissibleFunction& u, double K, const WeightedMinkowski& st,
    int particles, int grid_points, std::uint64_t halton_offset) {
  const int dim = st.dim();
  require(static_cast<int>(v_hat.size()) == dim, "dimension mismatch");
  require(std::abs(interval2(v_hat) - 1.0) <= 1e-9 && v_hat[0] > 0.0,
          "v must be unit future timelike");
  require(!radii.empty(), "need at least one radius");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    require(radii[k] > 0.0, "radii must be positive");
    if (k > 0) require(radii[k] < radii[k - 1], "radii must decrease");
  }
  require(particles >= 16, "too few particles");
  require(grid_points >= 3, "grid too short");

  const Event origin(dim, 0.0);
  RicciFailureReport report;
  report.K = K;
  report.N = st.N();
  report.ricci_at_base = st.bakry_emery_ricci(origin, v_hat);
  if (!(report.ricci_at_base < K))
    throw PreconditionError(
        "no convexity violation to exhibit: Ric^(N,V) at the base is " +
        std::to_string(report.ricci_at_base) + " >= K = " + std::to_string(K));
  report.predicted_limit = report.ricci_at_base - K;

  // First-order data: grad phi(origin) = D_x u(ell(x, origin + v)) at x =
  // origin, which is -u'(1) times the lowered direction.
  Vec a = lower_index(v_hat);
  for (double& c : a) c *= -u.d1(1.0);

  // Second-order prescription: zero when V = 0 or N = infinite, else the
  // isotropic choice Dv = -(<DV, v>/(N - n)) I pulled back through D^2H.
  PotentialField phi = PotentialField::affine(a, 0.0);
  if (!st.V().is_zero() && !st.N_is_infinite()) {
    const Vec dV = st.V().gradient(origin);
    double dV_v = 0.0;
    for (int i = 0; i < dim; ++i) dV_v += dV[i] * v_hat[i];
    const double q = -dV_v / (st.N() - dim);
    const UPtr conj = conjugate(borrow(u));
    const Matrix d2h = hamiltonian_hessian(a, *conj);
    Matrix Q = q * d2h.inverse();
    Q = 0.5 * (Q + Q.transpose());  // kill rounding asymmetry
    phi = PotentialField::quadratic(Q, a, 0.0);
  }

  std::vector<double> s_grid(grid_points);
  for (int k = 0; k < grid_points; ++k)
    s_grid[k] = static_cast<double>(k) / (grid_points - 1);
  s_grid.back() = 1.0;

  for (double r : radii) {
    const std::vector<Event> cloud =
        support::halton_ball(dim, r, particles, halton_offset);
    std::vector<double> mass(particles, 1.0 / particles);
    double partial = 0.0;
    for (int k = 0; k + 1 < particles; ++k) partial += mass[k];
    mass[particles - 1] = 1.0 - partial;
    // Uniform density on the ball.
    const double ball_vol = std::pow(std::acos(-1.0), 0.5 * dim) *
                            std::pow(r, dim) /
                            std::tgamma(0.5 * dim + 1.0);
    std::vector<double> rho0(particles, 1.0 / ball_vol);

    // lambda(r) from the saturation equation along the map.
    const TransportMapSample end =
        transport_map(phi, u, 1.0, 1.0, cloud, mass, st);
    std::vector<double> ell(particles);
    for (int k = 0; k < particles; ++k) {
      const ExtendedReal l = st.time_separation(cloud[k], end.mapped[k]);
      require(!l.is_neg_inf() && l.raw() > 0.0,
              "transported pair left the chronology (radius too large)");
      ell[k] = l.raw();
    }
    const double lam = saturation_scale(ell, mass, u);

    const EntropyCurve curve =
        entropy_curve(phi, u, 1.0, cloud, mass, rho0, st, s_grid, K);
    // The curve was built with the map's own unit scale; stamp the measured
    // geodesic scale before computing margins.
    EntropyCurve scaled = curve;
    scaled.lambda = lam;
    const ConvexityReport conv = convexity_report(scaled);

    report.radii.push_back(r);
    report.lambda.push_back(lam);
    report.min_margin.push_back(conv.min_margin_lambda2);
    report.margin_at_zero.push_back(conv.margin_lambda2.front());
    report.final_curve = scaled;
  }
  report.violation_observed = report.min_margin.back() < 0.0;
  return report;
}

}  // namespace lot
