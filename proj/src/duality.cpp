#include "lot/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lot/errors.hpp"
#include "lot/lp.hpp"

namespace lot {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cost_entry(const ExtendedReal& c) {
  return c.is_neg_inf() ? -kInf : c.raw();
}

// Exact-coordinate dedup is enough for midpoint supports built from exact
// affine combinations; near-coincident points stay distinct atoms.
std::vector<Event> dedup(std::vector<Event> pts) {
  std::vector<Event> out;
  for (auto& p : pts) {
    bool seen = false;
    for (const auto& q : out)
      if (q == p) {
        seen = true;
        break;
      }
    if (!seen) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<double> c_transform(const std::vector<double>& phi,
                                const CostMatrix& cost,
                                TransformDirection dir) {
  require(!phi.empty(), "c-transform needs a nonempty source");
  const bool forward = dir == TransformDirection::x_to_y;
  const std::size_t src = forward ? cost.rows : cost.cols;
  const std::size_t dst = forward ? cost.cols : cost.rows;
  require(phi.size() == src, "potential length does not match the cost");
  std::vector<double> out(dst, -kInf);
  for (std::size_t b = 0; b < dst; ++b) {
    double best = -kInf;
    for (std::size_t a = 0; a < src; ++a) {
      const ExtendedReal& c = forward ? cost(a, b) : cost(b, a);
      if (c.is_neg_inf()) continue;
      best = std::max(best, c.raw() - phi[a]);
    }
    out[b] = best;
  }
  return out;
}

CostMatrix cost_between(const std::vector<Event>& X,
                        const std::vector<Event>& Y,
                        const WeightedMinkowski& st,
                        const AdmissibleFunction& u, double lambda) {
  require(lambda > 0.0, "cost needs lambda > 0");
  require(!X.empty() && !Y.empty(), "cost needs nonempty supports");
  CostMatrix C;
  C.rows = X.size();
  C.cols = Y.size();
  C.c.reserve(X.size() * Y.size());
  for (const Event& x : X)
    for (const Event& y : Y) {
      const ExtendedReal l = st.time_separation(x, y);
      if (l.is_neg_inf())
        C.c.push_back(ExtendedReal::neg_inf());
      else if (l.raw() == 0.0)
        C.c.push_back(u.value_at_zero());
      else
        C.c.push_back(ExtendedReal(u.eval(l.raw() / lambda)));
    }
  return C;
}

CycleVerdict check_cyclical_monotonicity(const Coupling& pi,
                                         const CostMatrix& cost,
                                         int max_cycle) {
  require(max_cycle >= 2, "cycle length cap must be >= 2");
  require(pi.rows() == cost.rows && pi.cols() == cost.cols,
          "coupling and cost shapes disagree");
  std::vector<std::pair<std::size_t, std::size_t>> support;
  for (std::size_t i = 0; i < pi.rows(); ++i)
    for (std::size_t j = 0; j < pi.cols(); ++j)
      if (pi(i, j) > 1e-12) support.emplace_back(i, j);

  CycleVerdict verdict;
  verdict.worst_margin = kInf;
  const std::size_t m = support.size();
  if (m < 2) return verdict;

  std::vector<std::size_t> pick;
  std::vector<std::uint8_t> used(m, 0);
  auto margin_of = [&](const std::vector<std::size_t>& cyc) {
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t k = 0; k < cyc.size(); ++k) {
      const auto [i, j] = support[cyc[k]];
      const auto [inext, jnext_unused] = support[cyc[(k + 1) % cyc.size()]];
      (void)jnext_unused;
      lhs += cost_entry(cost(i, j));
      rhs += cost_entry(cost(inext, j));
    }
    // -inf on the left is an outright violation; -inf on the right makes the
    // inequality vacuous (the "inf - inf := -inf" convention on both sides).
    if (std::isinf(lhs) && lhs < 0) return -kInf;
    if (std::isinf(rhs) && rhs < 0) return kInf;
    return lhs - rhs;
  };
  auto consider = [&](const std::vector<std::size_t>& cyc) {
    const double margin = margin_of(cyc);
    if (margin < verdict.worst_margin) {
      verdict.worst_margin = margin;
      verdict.witness.clear();
      for (std::size_t k : cyc) verdict.witness.push_back(support[k]);
    }
  };
  // Ordered tuples of distinct support pairs; rotations revisit the same
  // cycle, which only costs time at desk scale.
  auto grow = [&](auto&& self, int target) -> void {
    if (static_cast<int>(pick.size()) == target) {
      consider(pick);
      return;
    }
    for (std::size_t k = 0; k < m; ++k) {
      if (used[k]) continue;
      used[k] = 1;
      pick.push_back(k);
      self(self, target);
      pick.pop_back();
      used[k] = 0;
    }
  };
  for (int n = 2; n <= max_cycle && n <= static_cast<int>(m); ++n)
    grow(grow, n);
  return verdict;
}

DualCertificate find_u_separation(const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu,
                                  const WeightedMinkowski& st,
                                  const AdmissibleFunction& u, double tol) {
  const EllMatrix E(mu, nu, st);
  for (std::size_t e = 0; e < E.ell.size(); ++e)
    require(E.causal[e] && E.ell[e] > 0.0,
            "u-separation needs a chronological support product (ell > 0)");

  const TransportSolution sol = ell_u(mu, nu, st, u, tol);
  require(sol.lambda.is_finite() && sol.lambda.raw() > 0.0,
          "internal: chronological instance produced a degenerate ell_u");
  const double lambda = sol.lambda.raw();
  InnerSolve inner = solve_inner(E, mu, nu, u, lambda);
  require(inner.feasible, "internal: LP at ell_u is infeasible");

  DualCertificate cert;
  cert.lambda = lambda;
  cert.phi = inner.row_potential;
  cert.psi = inner.col_potential;
  cert.pi = *inner.coupling;

  // Fix the additive gauge so <phi,mu> + <psi,nu> = u(1) exactly.
  const double u1 = u.normalization();
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    total += cert.phi[i] * mu.weight(i);
  for (std::size_t j = 0; j < nu.size(); ++j)
    total += cert.psi[j] * nu.weight(j);
  const double delta = total - u1;
  for (double& v : cert.phi) v -= delta;

  if (std::abs(total - u1) > 1e-6 * std::max(1.0, std::abs(u1)))
    throw SolverError("duality gap above 1e-6: LP dual value " +
                      std::to_string(total) + " vs u(1) " +
                      std::to_string(u1));

  // Condition (i): domination on the support product, and the contact set.
  cert.domination_ok = true;
  double cost_scale = 1.0;
  std::vector<double> c(E.ell.size());
  for (std::size_t e = 0; e < E.ell.size(); ++e) {
    c[e] = u.eval(E.ell[e] / lambda);
    cost_scale = std::max(cost_scale, std::abs(c[e]));
  }
  const double slack_tol = 1e-8 * cost_scale;
  for (std::size_t i = 0; i < E.rows; ++i)
    for (std::size_t j = 0; j < E.cols; ++j) {
      const double slack = cert.phi[i] + cert.psi[j] - c[i * E.cols + j];
      if (slack < -slack_tol) cert.domination_ok = false;
      if (slack <= slack_tol) cert.contact_set.emplace_back(i, j);
    }

  // Condition (ii): supp(pi) inside the contact set, contact set inside
  // {ell > 0} (automatic on a chronological product).
  cert.contact_ok = true;
  std::vector<std::uint8_t> in_S(E.ell.size(), 0);
  for (const auto& [i, j] : cert.contact_set) in_S[i * E.cols + j] = 1;
  for (std::size_t i = 0; i < E.rows; ++i)
    for (std::size_t j = 0; j < E.cols; ++j)
      if (cert.pi(i, j) > 1e-12 && !in_S[i * E.cols + j])
        cert.contact_ok = false;

  // Condition (iii): mass normalization (exact after the gauge shift).
  double check = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    check += cert.phi[i] * mu.weight(i);
  for (std::size_t j = 0; j < nu.size(); ++j)
    check += cert.psi[j] * nu.weight(j);
  cert.mass_ok = std::abs(check - u1) <= 1e-8 * std::max(1.0, std::abs(u1));
  return cert;
}

ExtendedReal dual_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const WeightedMinkowski& st,
                        const AdmissibleFunction& u, double tol) {
  require(tol > 0.0, "tolerance must be positive");
  const EllMatrix E(mu, nu, st);
  const int rows = static_cast<int>(E.rows);
  const int cols = static_cast<int>(E.cols);
  if (!lp::feasible(rows, cols, E.causal, mu.weights(), nu.weights()))
    return ExtendedReal::neg_inf();
  const double u1 = u.normalization();
  const double pred_tol = 1e-12 * std::max(1.0, std::abs(u1));
  const double eta_hi = E.max_causal;
  if (eta_hi <= 0.0) return ExtendedReal(0.0);

  // P(eta): dual optimum at cost u_eta(ell) is <= u(1). By LP duality this
  // is the primal inner value; P is monotone (true upward).
  auto predicate = [&](double eta) {
    const InnerSolve s = solve_inner(E, mu, nu, u, eta);
    if (!s.feasible) return true;  // inf over an empty potential set
    return s.value.raw() <= u1 + pred_tol;
  };
  if (!predicate(eta_hi)) {
    // Weighted average of u(ell/eta_hi) cannot exceed u(1); numerical guard.
    return ExtendedReal(eta_hi);
  }
  double lo = 0.0, hi = eta_hi;
  const double width_tol = tol * std::max(1.0, eta_hi);
  while (hi - lo > width_tol) {
    const double mid = 0.5 * (lo + hi);
    if (predicate(mid))
      hi = mid;
    else
      lo = mid;
  }
  return ExtendedReal(hi);
}

StarshapeVerdict starshape_check(const std::vector<double>& phi,
                                 const AdmissibleFunction& u, double t,
                                 const std::vector<Event>& X,
                                 const std::vector<Event>& Y,
                                 const WeightedMinkowski& st) {
  require(t > 0.0 && t <= 1.0, "interpolation parameter must be in (0,1]");
  require(!X.empty() && !Y.empty(), "empty supports");
  require(phi.size() == X.size(), "potential length does not match X");

  // Precondition: phi is u-convex on (X, Y), i.e. a double-transform
  // fixpoint.
  const CostMatrix c1 = cost_between(X, Y, st, u, 1.0);
  const std::vector<double> psi = c_transform(phi, c1, TransformDirection::x_to_y);
  const std::vector<double> phi_cc =
      c_transform(psi, c1, TransformDirection::y_to_x);
  double scale = 1.0;
  for (double v : phi)
    if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < phi.size(); ++i)
    require(std::abs(phi_cc[i] - phi[i]) <= 1e-9 * scale,
            "phi is not u-convex on (X, Y)");

  // Midpoint support Z_t over causal pairs.
  std::vector<Event> Z;
  for (const Event& x : X)
    for (const Event& y : Y)
      if (st.causally_related(x, y)) Z.push_back(st.midpoint(x, y, t));
  require(!Z.empty(), "no causal pair: Z_t is empty");
  StarshapeVerdict verdict;
  verdict.midpoint_support = dedup(std::move(Z));

  // t^{-1} phi must be its own double (u_t o ell)-transform on (X, Z_t).
  std::vector<double> phi_t(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) phi_t[i] = phi[i] / t;
  const CostMatrix ct =
      cost_between(X, verdict.midpoint_support, st, u, t);
  const std::vector<double> chi =
      c_transform(phi_t, ct, TransformDirection::x_to_y);
  const std::vector<double> phi_t_cc =
      c_transform(chi, ct, TransformDirection::y_to_x);
  verdict.max_deviation = 0.0;
  for (std::size_t i = 0; i < phi_t.size(); ++i) {
    double dev;
    if (std::isfinite(phi_t_cc[i]) && std::isfinite(phi_t[i]))
      dev = std::abs(phi_t_cc[i] - phi_t[i]);
    else
      dev = (phi_t_cc[i] == phi_t[i]) ? 0.0 : kInf;
    verdict.max_deviation = std::max(verdict.max_deviation, dev);
  }
  verdict.ok = verdict.max_deviation <= 1e-7;
  return verdict;
}

}  // namespace lot
