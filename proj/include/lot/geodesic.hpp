#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lot/admissible.hpp"
#include "lot/measure.hpp"
#include "lot/spacetime.hpp"
#include "lot/transport.hpp"

namespace lot {

// Midpoint push-forward of a coupling concentrated on timelike edges.
DiscreteMeasure interpolate(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu, const Coupling& pi,
                            double s, const WeightedMinkowski& st);

struct GeodesicPath {
  std::vector<double> s_grid;
  std::vector<DiscreteMeasure> measures;
  Coupling coupling{1, 1};
  double lambda = 0.0;  // ell_u(mu0, mu1)
};

// Solves ell_u and interpolates the optimal coupling on a uniform grid.
GeodesicPath build_geodesic(const DiscreteMeasure& mu,
                            const DiscreteMeasure& nu,
                            const WeightedMinkowski& st,
                            const AdmissibleFunction& u, int grid_points,
                            double tol = 1e-8);

// Same construction from an explicit coupling (negative controls).
GeodesicPath path_from_coupling(const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, const Coupling& pi,
                                double lambda, const WeightedMinkowski& st,
                                int grid_points);

// max over grid pairs s < t of |ell_u(mu_s, mu_t) - (t-s) lambda|.
double geodesy_defect(const GeodesicPath& path, const WeightedMinkowski& st,
                      const AdmissibleFunction& u, double tol = 1e-8);

// Closed-form potential catalogue with analytic gradient and Hessian.
class PotentialField {
 public:
  static PotentialField affine(Vec a, double b);
  static PotentialField quadratic(Matrix Q, Vec a, double b);

  double value(const Event& x) const;
  Vec gradient(const Event& x) const;  // covector components
  const Matrix& hessian() const { return Q_; }
  std::string describe() const;

 private:
  PotentialField() = default;
  bool quadratic_ = false;
  Matrix Q_;
  Vec a_;
  double b_ = 0.0;
};

// Closed-form Hessian of the Hamiltonian H(w) = -u*(|w|_g) at a strictly
// past-timelike covector, with u_conj = u*.
Matrix hamiltonian_hessian(const Vec& w, const AdmissibleFunction& u_conj);

// v = DH(grad_phi) for the conjugate of the lambda-rescaled u.
Vec transport_velocity(const Vec& grad_phi, const AdmissibleFunction& u,
                       double lambda);

struct TransportMapSample {
  double s = 0.0;
  std::vector<Event> base;
  std::vector<double> mass;
  std::vector<Vec> velocity;
  std::vector<Event> mapped;           // F_s(x) = x + s v(x)
  std::vector<Matrix> dv;              // Dv = D^2H(grad phi) Hess phi
  std::vector<Matrix> jacobian;        // A_s = I + s Dv
  std::vector<double> det_jacobian;
};

// F_s over a particle cloud with analytic Jacobians; throws SolverError on a
// degenerate Jacobian at s < 1.
TransportMapSample transport_map(const PotentialField& phi,
                                 const AdmissibleFunction& u, double lambda,
                                 double s, const std::vector<Event>& cloud,
                                 const std::vector<double>& mass,
                                 const WeightedMinkowski& st);

struct NonCrossingVerdict {
  struct Collision {
    std::size_t a = 0;
    std::size_t b = 0;
    double margin = 0.0;             // 2-cycle monotonicity margin
    bool hypothesis_violated = false;  // collision permitted when true
  };
  bool ok = true;  // no collision among pairs satisfying the hypothesis
  std::vector<Collision> collisions;
};

// Midpoints of distinct monotone pairs must be distinct; collisions of pairs
// violating the 2-cycle inequality are flagged but allowed.
NonCrossingVerdict non_crossing_check(
    const std::vector<std::pair<Event, Event>>& pairs, double s,
    const AdmissibleFunction& u, double lambda, const WeightedMinkowski& st);

// Uniform density on an axis-aligned box.
struct BoxDensity {
  Vec lo;
  Vec hi;
  double value(const Event& x) const;
  double volume() const;
};

// Change-of-variables check for rho_0 = rho_s(F_s) JF_s: integrates the
// push-forward density over the mapped box via Gauss-Legendre quadrature
// with a finite-difference Jacobian, against the source mass. Returns the
// relative residual.
double monge_ampere_residual(const PotentialField& phi, const BoxDensity& rho0,
                             const AdmissibleFunction& u, double lambda,
                             double s, const WeightedMinkowski& st,
                             int points_per_axis = 32);

}  // namespace lot
