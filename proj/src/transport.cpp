#include "lot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lot/errors.hpp"
#include "lot/kernels.hpp"
#include "lot/lp.hpp"

namespace lot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Predicate tolerance for inner_value(lambda) >= u(1).
double predicate_tol(double u1) { return 1e-12 * std::max(1.0, std::abs(u1)); }

// Saturation tolerance (inner_value == u(1)).
double saturation_tol(double u1) { return 1e-6 * std::max(1.0, std::abs(u1)); }

// Allowed-edge mask at any positive lambda: causal edges, minus ell = 0
// edges when u(0) = -inf (those cost -inf at every scale).
std::vector<std::uint8_t> allowed_mask(const EllMatrix& E,
                                       const AdmissibleFunction& u) {
  std::vector<std::uint8_t> mask = E.causal;
  if (u.value_at_zero().is_neg_inf()) {
    for (std::size_t e = 0; e < mask.size(); ++e)
      if (mask[e] && E.ell[e] == 0.0) mask[e] = 0;
  }
  return mask;
}

}  // namespace

EllMatrix::EllMatrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const WeightedMinkowski& st) {
  require(mu.dim() == st.dim() && nu.dim() == st.dim(),
          "measures live on a different spacetime dimension");
  rows = mu.size();
  cols = nu.size();
  ell.assign(rows * cols, kNegInf);
  causal.assign(rows * cols, 0);
  max_causal = 0.0;
  if (st.dim() == 2) {
    // Batched kernel path; bit-identical to time_separation at dim 2.
    std::vector<double> xt(rows), xx(rows), col(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      xt[i] = mu.point(i)[0];
      xx[i] = mu.point(i)[1];
    }
    for (std::size_t j = 0; j < cols; ++j) {
      kernels::ell_batch_2d(xt.data(), xx.data(), nu.point(j)[0],
                            nu.point(j)[1], col.data(), rows);
      for (std::size_t i = 0; i < rows; ++i) ell[i * cols + j] = col[i];
    }
  } else {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) {
        const ExtendedReal l = st.time_separation(mu.point(i), nu.point(j));
        ell[i * cols + j] = l.is_neg_inf() ? kNegInf : l.raw();
      }
  }
  for (std::size_t e = 0; e < ell.size(); ++e)
    if (ell[e] != kNegInf) {
      causal[e] = 1;
      any_causal = true;
      max_causal = std::max(max_causal, ell[e]);
    }
}

CostMatrix cost_matrix(const EllMatrix& E, const AdmissibleFunction& u,
                       double lambda) {
  require(lambda > 0.0, "cost matrix needs lambda > 0");
  CostMatrix C;
  C.rows = E.rows;
  C.cols = E.cols;
  C.c.reserve(E.ell.size());
  for (std::size_t e = 0; e < E.ell.size(); ++e) {
    if (!E.causal[e]) {
      C.c.push_back(ExtendedReal::neg_inf());
    } else if (E.ell[e] == 0.0) {
      C.c.push_back(u.value_at_zero());
    } else {
      C.c.push_back(ExtendedReal(u.eval(E.ell[e] / lambda)));
    }
  }
  return C;
}

InnerSolve solve_inner(const EllMatrix& E, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu, const AdmissibleFunction& u,
                       double lambda) {
  require(lambda > 0.0, "inner problem needs lambda > 0");
  const std::vector<std::uint8_t> allowed = allowed_mask(E, u);
  InnerSolve out;
  if (!lp::feasible(static_cast<int>(E.rows), static_cast<int>(E.cols),
                    allowed, mu.weights(), nu.weights()))
    return out;  // value stays NEG_INF, coupling absent
  std::vector<double> cost(E.ell.size(), 0.0);
  for (std::size_t e = 0; e < E.ell.size(); ++e) {
    if (!allowed[e]) continue;
    cost[e] = (E.ell[e] == 0.0) ? u.value_at_zero().raw()
                                : u.eval(E.ell[e] / lambda);
  }
  lp::TransportResult r =
      lp::solve_max(static_cast<int>(E.rows), static_cast<int>(E.cols),
                    allowed, cost, mu.weights(), nu.weights());
  out.feasible = true;
  out.value = ExtendedReal(r.value);
  out.coupling = Coupling(E.rows, E.cols, std::move(r.flow));
  out.row_potential = std::move(r.row_potential);
  out.col_potential = std::move(r.col_potential);
  out.lp_iterations = r.iterations;
  return out;
}

bool causal_feasible(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const WeightedMinkowski& st) {
  const EllMatrix E(mu, nu, st);
  return lp::feasible(static_cast<int>(E.rows), static_cast<int>(E.cols),
                      E.causal, mu.weights(), nu.weights());
}

ExtendedReal inner_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const WeightedMinkowski& st,
                         const AdmissibleFunction& u, double lambda) {
  require(lambda > 0.0, "inner_value needs lambda > 0");
  const EllMatrix E(mu, nu, st);
  require(lp::feasible(static_cast<int>(E.rows), static_cast<int>(E.cols),
                       E.causal, mu.weights(), nu.weights()),
          "inner_value requires a causally feasible pair");
  return solve_inner(E, mu, nu, u, lambda).value;
}

TransportSolution ell_u(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const WeightedMinkowski& st,
                        const AdmissibleFunction& u, double tol) {
  require(tol > 0.0, "tolerance must be positive");
  const EllMatrix E(mu, nu, st);
  const int rows = static_cast<int>(E.rows);
  const int cols = static_cast<int>(E.cols);

  TransportSolution sol;
  std::vector<double> causal_flow;
  if (!lp::feasible(rows, cols, E.causal, mu.weights(), nu.weights(),
                    &causal_flow)) {
    sol.lambda = ExtendedReal::neg_inf();
    sol.inner_value = kNegInf;
    return sol;
  }

  const double u1 = u.normalization();
  const double pred_tol = predicate_tol(u1);
  const double sat_tol = saturation_tol(u1);
  const std::vector<std::uint8_t> allowed = allowed_mask(E, u);

  if (u.value_at_zero().is_neg_inf()) {
    if (!lp::feasible(rows, cols, allowed, mu.weights(), nu.weights())) {
      // Every causal coupling is charged -inf; the sup set is empty and the
      // definition's union with {0} applies.
      sol.lambda = ExtendedReal(0.0);
      sol.coupling = Coupling(E.rows, E.cols, std::move(causal_flow));
      sol.inner_value = kNegInf;
      return sol;
    }
  } else {
    // u(0) finite: the predicate can only reach u(1) if some coupling puts
    // positive mass on strictly positive separations.
    std::vector<double> pos_cost(E.ell.size(), 0.0);
    for (std::size_t e = 0; e < E.ell.size(); ++e)
      if (E.causal[e] && E.ell[e] > 0.0) pos_cost[e] = 1.0;
    lp::TransportResult pos = lp::solve_max(rows, cols, E.causal, pos_cost,
                                            mu.weights(), nu.weights());
    ++sol.iterations;
    if (pos.value <= 1e-12) {
      sol.lambda = ExtendedReal(0.0);
      sol.coupling = Coupling(E.rows, E.cols, std::move(pos.flow));
      sol.inner_value = u.value_at_zero().raw();
      return sol;
    }
  }

  const double lambda_hi = E.max_causal;
  require(lambda_hi > 0.0, "internal: positive-mass probe admitted a zero bracket");

  // Degenerate top of the bracket: all optimal mass at ell = lambda_hi.
  InnerSolve top = solve_inner(E, mu, nu, u, lambda_hi);
  ++sol.iterations;
  require(top.feasible, "internal: restricted set vanished at lambda_hi");
  const bool top_ok = top.value.raw() >= u1 - pred_tol;
  sol.bracket_history.emplace_back(lambda_hi, top_ok);
  if (top_ok) {
    sol.lambda = ExtendedReal(lambda_hi);
    sol.coupling = std::move(top.coupling);
    sol.inner_value = top.value.raw();
    sol.saturated = std::abs(sol.inner_value - u1) <= sat_tol;
    return sol;
  }

  // Bisection on the monotone predicate; lambda -> 0+ is structurally true
  // after the probes above, so 0 acts as a virtual true bracket end.
  double lo = 0.0;
  double hi = lambda_hi;
  InnerSolve best;  // solve at the current lo (when lo > 0)
  const double width_tol = tol * std::max(1.0, lambda_hi);
  while (hi - lo > width_tol) {
    const double mid = 0.5 * (lo + hi);
    InnerSolve s = solve_inner(E, mu, nu, u, mid);
    ++sol.iterations;
    require(s.feasible, "internal: restricted set vanished mid-bracket");
    const bool ok = s.value.raw() >= u1 - pred_tol;
    sol.bracket_history.emplace_back(mid, ok);
    if (ok) {
      lo = mid;
      best = std::move(s);
    } else {
      hi = mid;
    }
  }

  if (lo == 0.0) {
    // The whole bracket collapsed at the bottom: ell_u below tol resolution.
    InnerSolve s = solve_inner(E, mu, nu, u, hi);
    ++sol.iterations;
    sol.lambda = ExtendedReal(0.0);
    sol.coupling = std::move(s.coupling);
    sol.inner_value = s.value.raw();
    return sol;
  }

  // Newton polish: chase the root of zeta(lambda) = <pi, u(ell/lambda)> -
  // u(1) on the current optimal vertex, re-optimizing the vertex at each
  // accepted step. zeta is strictly decreasing while pi holds positive-ell
  // mass, and its root is a lower bound for ell_u, so steps stay bracketed.
  double lam = lo;
  for (int round = 0; round < 8; ++round) {
    const Coupling& pi = *best.coupling;
    double x = lam;
    bool moved = false;
    for (int it = 0; it < 40; ++it) {
      double zeta = -u1;
      double dzeta = 0.0;
      for (std::size_t e = 0; e < E.ell.size(); ++e) {
        const double mass = pi.entries()[e];
        if (mass <= 0.0) continue;
        if (E.ell[e] == 0.0) {
          zeta += mass * u.value_at_zero().raw();
        } else {
          const double s = E.ell[e] / x;
          zeta += mass * u.eval(s);
          dzeta -= mass * u.d1(s) * s / x;
        }
      }
      if (dzeta >= 0.0) break;  // no positive-ell mass: nothing to polish
      if (std::abs(zeta) <= 1e-14 * std::max(1.0, std::abs(u1))) break;
      double next = x - zeta / dzeta;
      next = std::min(std::max(next, lo), hi);
      if (next == x) break;
      x = next;
      moved = true;
    }
    if (!moved || x <= lam) break;
    InnerSolve s = solve_inner(E, mu, nu, u, x);
    ++sol.iterations;
    if (!s.feasible || s.value.raw() < u1 - pred_tol) break;
    lam = x;
    best = std::move(s);
    sol.bracket_history.emplace_back(lam, true);
    if (std::abs(s.value.raw() - u1) <= 1e-13 * std::max(1.0, std::abs(u1)))
      break;
  }

  sol.lambda = ExtendedReal(lam);
  sol.coupling = std::move(best.coupling);
  sol.inner_value = best.value.raw();
  sol.saturated = std::abs(sol.inner_value - u1) <= sat_tol;
  return sol;
}

ExtendedReal ell_p_closed_form(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu,
                               const WeightedMinkowski& st, double p) {
  require(p < 1.0, "ell_p needs p < 1");
  const UPtr u = (p == 0.0) ? make_log() : make_power(p);
  const EllMatrix E(mu, nu, st);
  const int rows = static_cast<int>(E.rows);
  const int cols = static_cast<int>(E.cols);
  if (!lp::feasible(rows, cols, E.causal, mu.weights(), nu.weights()))
    return ExtendedReal::neg_inf();
  const std::vector<std::uint8_t> allowed = allowed_mask(E, *u);
  if (!lp::feasible(rows, cols, allowed, mu.weights(), nu.weights()))
    return ExtendedReal(0.0);
  std::vector<double> cost(E.ell.size(), 0.0);
  for (std::size_t e = 0; e < E.ell.size(); ++e) {
    if (!allowed[e]) continue;
    cost[e] = (E.ell[e] == 0.0) ? u->value_at_zero().raw() : u->eval(E.ell[e]);
  }
  const lp::TransportResult r =
      lp::solve_max(rows, cols, allowed, cost, mu.weights(), nu.weights());
  if (p == 0.0) return ExtendedReal(std::exp(r.value - 0.5));
  const double py = p * r.value;
  require(py >= 0.0, "internal: u_p integral left the function's range");
  return ExtendedReal(std::pow(py, 1.0 / p));
}

Coupling glue(const Coupling& pi12, const Coupling& pi23) {
  require(pi12.cols() == pi23.rows(),
          "gluing needs matching middle support sizes");
  const std::size_t mid = pi12.cols();
  double defect = 0.0;
  std::vector<double> m(mid);
  for (std::size_t j = 0; j < mid; ++j) {
    m[j] = pi12.col_sum(j);
    defect = std::max(defect, std::abs(m[j] - pi23.row_sum(j)));
  }
  require(defect <= 1e-10, "gluing middle marginals disagree");
  Coupling out(pi12.rows(), pi23.cols());
  for (std::size_t j = 0; j < mid; ++j) {
    if (m[j] <= 0.0) continue;  // zero-weight middle atoms are skipped
    for (std::size_t i = 0; i < pi12.rows(); ++i) {
      const double a = pi12(i, j);
      if (a <= 0.0) continue;
      for (std::size_t k = 0; k < pi23.cols(); ++k)
        out.at(i, k) += a * pi23(j, k) / m[j];
    }
  }
  return out;
}

ExtendedReal triangle_defect(const DiscreteMeasure& mu1,
                             const DiscreteMeasure& mu2,
                             const DiscreteMeasure& mu3,
                             const WeightedMinkowski& st,
                             const AdmissibleFunction& u, double tol) {
  const TransportSolution s13 = ell_u(mu1, mu3, st, u, tol);
  const TransportSolution s12 = ell_u(mu1, mu2, st, u, tol);
  const TransportSolution s23 = ell_u(mu2, mu3, st, u, tol);
  if (s13.lambda.is_neg_inf() || s12.lambda.is_neg_inf() ||
      s23.lambda.is_neg_inf())
    return ExtendedReal::neg_inf();
  return ExtendedReal(s13.lambda.raw() - s12.lambda.raw() - s23.lambda.raw());
}

}  // namespace lot
