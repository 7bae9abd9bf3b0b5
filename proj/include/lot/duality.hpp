#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lot/admissible.hpp"
#include "lot/extended_real.hpp"
#include "lot/measure.hpp"
#include "lot/spacetime.hpp"
#include "lot/transport.hpp"

namespace lot {

enum class TransformDirection { x_to_y, y_to_x };

// Kantorovich transform against the given cost: out(y) = sup_x c(x,y) -
// phi(x) (or the mirrored direction), skipping NEG_INF cost entries. Entries
// with no admissible partner come back as -inf.
std::vector<double> c_transform(const std::vector<double>& phi,
                                const CostMatrix& cost,
                                TransformDirection dir);

// Costs u_lambda(ell(x,y)) between two explicit point lists.
CostMatrix cost_between(const std::vector<Event>& X,
                        const std::vector<Event>& Y,
                        const WeightedMinkowski& st,
                        const AdmissibleFunction& u, double lambda);

struct CycleVerdict {
  double worst_margin = 0.0;  // most negative cycle margin; +inf when none
  std::vector<std::pair<std::size_t, std::size_t>> witness;
};

// Enumerates cycles of support pairs up to max_cycle and reports the worst
// margin sum c(x_i,y_i) - sum c(x_{i+1},y_i). An -inf left-hand side counts
// as a violation; an -inf right-hand side makes the cycle vacuous.
CycleVerdict check_cyclical_monotonicity(const Coupling& pi,
                                         const CostMatrix& cost,
                                         int max_cycle);

struct DualCertificate {
  double lambda = 0.0;
  std::vector<double> phi;
  std::vector<double> psi;
  std::vector<std::pair<std::size_t, std::size_t>> contact_set;
  Coupling pi{1, 1};
  bool domination_ok = false;  // phi + psi >= cost on the support product
  bool contact_ok = false;     // supp pi inside the contact set, ell > 0 there
  bool mass_ok = false;        // <phi,mu> + <psi,nu> = u(1)
  bool valid() const { return domination_ok && contact_ok && mass_ok; }
};

// Solves ell_u, extracts the LP dual potentials at lambda = ell_u, fixes the
// additive gauge, and validates the u-separation conditions. Requires the
// full support product to be chronological (ell > 0).
DualCertificate find_u_separation(const DiscreteMeasure& mu,
                                  const DiscreteMeasure& nu,
                                  const WeightedMinkowski& st,
                                  const AdmissibleFunction& u,
                                  double tol = 1e-8);

// The dual time separation: inf over eta of the predicate "dual optimum at
// cost u_eta(ell) <= u(1)". The inner infimum equals the primal inner value
// by finite LP duality, so the bisection reuses it.
ExtendedReal dual_value(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        const WeightedMinkowski& st,
                        const AdmissibleFunction& u, double tol = 1e-8);

struct StarshapeVerdict {
  bool ok = false;
  double max_deviation = 0.0;
  std::vector<Event> midpoint_support;
};

// Star-shapedness of u-convex potentials: t^{-1} phi must be its own double
// (u_t o ell)-transform relative to (X, Z_t(X,Y)).
StarshapeVerdict starshape_check(const std::vector<double>& phi,
                                 const AdmissibleFunction& u, double t,
                                 const std::vector<Event>& X,
                                 const std::vector<Event>& Y,
                                 const WeightedMinkowski& st);

}  // namespace lot
