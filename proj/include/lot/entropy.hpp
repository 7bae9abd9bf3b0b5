#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lot/admissible.hpp"
#include "lot/geodesic.hpp"
#include "lot/spacetime.hpp"

namespace lot {

// Per-particle bookkeeping for the entropy along a transport map at one
// parameter value: E_V is a plain mass-weighted sum over these fields.
struct DensityCloud {
  double s = 0.0;
  std::vector<Event> base;               // x_k
  std::vector<double> mass;              // m_k, sums to 1
  std::vector<double> rho0;              // source density at x_k, > 0
  std::vector<double> jacobian;          // J_s(x_k), > 0 for s < 1
  std::vector<double> weight_at_mapped;  // V(F_s(x_k))
};

// Builds the bookkeeping by running the transport map at s and evaluating
// the spacetime weight at the mapped points.
DensityCloud density_snapshot(const PotentialField& phi,
                              const AdmissibleFunction& u, double lambda,
                              double s, const std::vector<Event>& base,
                              const std::vector<double>& mass,
                              const std::vector<double>& rho0,
                              const WeightedMinkowski& st);

// E_V(mu_s) = sum_k m_k (log rho0 - log J_s + V(F_s)) with deterministic
// pairwise reduction.
double relative_entropy(const DensityCloud& cloud, double s);

// phi'(s) = -Tr B_s and phi''(s) = Tr(B_s^2) per particle (flat model), with
// B_s = Dv A_s^{-1}; also the worst Tr(B^2) - (Tr B)^2/n margin.
struct JacobianLogDerivs {
  std::vector<double> phi_prime;
  std::vector<double> phi_second;
  double worst_trace_margin = 0.0;
};
JacobianLogDerivs jacobian_log_derivatives(const TransportMapSample& sample);

struct EntropyCurve {
  std::vector<double> s_grid;
  std::vector<double> e;
  std::vector<double> e1_analytic;
  std::vector<double> e2_analytic;
  std::vector<double> e1_fd;  // centered differences; NaN at the endpoints
  std::vector<double> e2_fd;
  double K = 0.0;
  double N = 0.0;
  double lambda = 0.0;
  double ell_l2_pi = 0.0;  // ||ell||_{L^2(pi)} along the map
};

// e(s) on a uniform grid plus analytic first/second derivatives (particle
// sums of the displacement-Hessian integrands) and centered differences.
EntropyCurve entropy_curve(const PotentialField& phi,
                           const AdmissibleFunction& u, double lambda,
                           const std::vector<Event>& base,
                           const std::vector<double>& mass,
                           const std::vector<double>& rho0,
                           const WeightedMinkowski& st,
                           const std::vector<double>& s_grid, double K);

// Solves sum_k m_k u(ell_k / lambda) = u(1) for lambda by a safeguarded
// Newton iteration on the bracket [min ell, max ell]; this is the separation
// value of the coupling concentrated on the given timelike displacements.
double saturation_scale(const std::vector<double>& ell,
                        const std::vector<double>& mass,
                        const AdmissibleFunction& u);

struct ConvexityReport {
  std::vector<double> margin_lambda2;  // e'' - (e')^2/N - K lambda^2
  std::vector<double> margin_l2pi;     // e'' - (e')^2/N - K ||ell||_{L^2(pi)}
  double min_margin_lambda2 = 0.0;     // over interior grid points
  double min_margin_l2pi = 0.0;
  bool convex = false;  // min lambda^2-margin >= -1e-6
};
ConvexityReport convexity_report(const EntropyCurve& curve);

// The converse construction: a uniform ball cloud transported by the
// prescribed potential exhibits a negative convexity margin when the
// Bakry-Emery Ricci bound fails at the base point.
struct RicciFailureReport {
  double ricci_at_base = 0.0;  // Ric^{(N,V)}(v,v) at the origin
  double K = 0.0;
  double N = 0.0;
  double predicted_limit = 0.0;  // ricci_at_base - K (unit-scale geodesic)
  std::vector<double> radii;
  std::vector<double> lambda;      // lambda(r) from the saturation equation
  std::vector<double> min_margin;  // interior lambda^2-margin per radius
  // Analytic margin at s = 0 per radius; this is the quantity whose r -> 0
  // limit the construction pins to ricci_at_base - K.
  std::vector<double> margin_at_zero;
  EntropyCurve final_curve;        // curve at the smallest radius, lambda stamped
  bool violation_observed = false;
};

RicciFailureReport ricci_failure_experiment(const Vec& v_hat,
                                            const std::vector<double>& radii,
                                            const AdmissibleFunction& u,
                                            double K,
                                            const WeightedMinkowski& st,
                                            int particles = 4096,
                                            int grid_points = 9,
                                            std::uint64_t halton_offset = 0);

}  // namespace lot
