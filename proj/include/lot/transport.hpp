#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lot/admissible.hpp"
#include "lot/extended_real.hpp"
#include "lot/measure.hpp"
#include "lot/spacetime.hpp"

namespace lot {

// Time separations over the support product of two measures. Non-causal
// pairs carry -inf; borderline-null pairs carry exactly 0.
struct EllMatrix {
  EllMatrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
            const WeightedMinkowski& st);

  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> ell;           // -inf off the causal set
  std::vector<std::uint8_t> causal;  // 1 iff ell > -inf
  double max_causal = 0.0;           // max ell over causal edges
  bool any_causal = false;

  double operator()(std::size_t i, std::size_t j) const {
    return ell[i * cols + j];
  }
};

// Rescaled costs c_ij = u(ell_ij / lambda), NEG_INF on non-causal edges and
// on ell = 0 edges when u(0) = -inf.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<ExtendedReal> c;

  const ExtendedReal& operator()(std::size_t i, std::size_t j) const {
    return c[i * cols + j];
  }
};

CostMatrix cost_matrix(const EllMatrix& E, const AdmissibleFunction& u,
                       double lambda);

// One inner LP solve at a fixed lambda.
struct InnerSolve {
  bool feasible = false;  // some coupling avoids the forbidden edges
  ExtendedReal value = ExtendedReal::neg_inf();
  std::optional<Coupling> coupling;
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  int lp_iterations = 0;
};

InnerSolve solve_inner(const EllMatrix& E, const DiscreteMeasure& mu,
                       const DiscreteMeasure& nu, const AdmissibleFunction& u,
                       double lambda);

struct TransportSolution {
  ExtendedReal lambda = ExtendedReal::neg_inf();
  std::optional<Coupling> coupling;
  double inner_value = 0.0;  // integral of u_lambda(ell) at the solution
  bool saturated = false;    // inner_value == u(1) within tolerance
  int iterations = 0;        // inner LP solves
  std::vector<std::pair<double, bool>> bracket_history;  // (lambda, predicate)
};

bool causal_feasible(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                     const WeightedMinkowski& st);

// Precondition: causal_feasible. Returns NEG_INF when every causal coupling
// hits a forbidden (u(0) = -inf) edge.
ExtendedReal inner_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const WeightedMinkowski& st,
                         const AdmissibleFunction& u, double lambda);

// The u-Lorentz-Orlicz-Wasserstein time separation: bisection over lambda on
// the monotone predicate inner_value(lambda) >= u(1), plus a Newton polish on
// the optimal vertex. Returns lambda = NEG_INF when no causal coupling
// exists, and lambda = 0 when the predicate fails for every positive lambda.
TransportSolution ell_u(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const WeightedMinkowski& st,
                        const AdmissibleFunction& u, double tol = 1e-8);

// Closed-form ell_p = u_p^{-1}(sup integral of u_p(ell)); one LP plus one
// inverse evaluation. p = 0 uses exp(sup integral of log(ell)). Serves as an
// independent oracle for ell_u with u = u_p.
ExtendedReal ell_p_closed_form(const DiscreteMeasure& mu,
                               const DiscreteMeasure& nu,
                               const WeightedMinkowski& st, double p);

// Composition of two couplings through their shared middle marginal.
Coupling glue(const Coupling& pi12, const Coupling& pi23);

// ell_u(mu1,mu3) - ell_u(mu1,mu2) - ell_u(mu2,mu3); >= 0 up to solver
// tolerance by the reverse triangle inequality. NEG_INF when any leg is
// causally infeasible.
ExtendedReal triangle_defect(const DiscreteMeasure& mu1,
                             const DiscreteMeasure& mu2,
                             const DiscreteMeasure& mu3,
                             const WeightedMinkowski& st,
                             const AdmissibleFunction& u, double tol = 1e-8);

}  // namespace lot
