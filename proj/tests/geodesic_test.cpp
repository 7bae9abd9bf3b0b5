#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "doctest.h"
#include "lot/errors.hpp"
#include "lot/geodesic.hpp"
#include "support/oracles.hpp"

using namespace lot;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

WeightedMinkowski flat2() {
  return WeightedMinkowski(2, Weight::none(), kInf);
}

// Affine potential whose transport field is the constant unit velocity v_hat:
// grad phi = -u'(1) (v_hat)_* inverts through the Hamiltonian to v_hat.
PotentialField drift_potential(const AdmissibleFunction& u, const Vec& v_hat) {
  return PotentialField::affine(vscale(-u.d1(1.0), lower_index(v_hat)), 0.25);
}

}  // namespace

TEST_SUITE("geodesic") {

TEST_CASE("interpolation pushes mass along edge midpoints") {
  const WeightedMinkowski st = flat2();
  const DiscreteMeasure mu({Event{0, -0.5}, Event{0, 0.5}}, {0.5, 0.5});
  const DiscreteMeasure nu({Event{2, -0.5}, Event{2, 0.5}}, {0.5, 0.5});
  Coupling diag(2, 2);
  diag.at(0, 0) = 0.5;
  diag.at(1, 1) = 0.5;
  const DiscreteMeasure mid = interpolate(mu, nu, diag, 0.25, st);
  REQUIRE(mid.size() == 2u);
  CHECK(mid.point(0)[0] == doctest::Approx(0.5));
  CHECK(mid.point(0)[1] == doctest::Approx(-0.5));
  CHECK(mid.weight(0) == doctest::Approx(0.5));

  // Endpoints reproduce the marginals.
  const DiscreteMeasure at0 = interpolate(mu, nu, diag, 0.0, st);
  CHECK(at0.points() == mu.points());
  const DiscreteMeasure at1 = interpolate(mu, nu, diag, 1.0, st);
  CHECK(at1.points() == nu.points());

  // Fan-out from a dirac: at s = 0 both edges collapse onto the source and
  // the masses merge into a single atom.
  const DiscreteMeasure src = DiscreteMeasure::dirac(Event{0, 0});
  const DiscreteMeasure two({Event{2, 0.3}, Event{2, -0.3}}, {0.5, 0.5});
  const Coupling fan = Coupling::product(src, two);
  const DiscreteMeasure collapsed = interpolate(src, two, fan, 0.0, st);
  CHECK(collapsed.size() == 1u);
  CHECK(collapsed.weight(0) == doctest::Approx(1.0));
  CHECK(interpolate(src, two, fan, 0.5, st).size() == 2u);

  // Support edges must be timelike.
  const DiscreteMeasure null_target = DiscreteMeasure::dirac(Event{1, 1});
  const Coupling one(1, 1, {1.0});
  CHECK_THROWS_AS((void)interpolate(src, null_target, one, 0.5, st),
                  PreconditionError);
}

TEST_CASE("geodesics interpolate the separation linearly") {
  const WeightedMinkowski st = flat2();
  const auto u = make_power(0.5);
  const DiscreteMeasure mu({Event{0, -0.4}, Event{0, 0.4}}, {0.5, 0.5});
  const DiscreteMeasure nu({Event{2.2, -0.3}, Event{2.2, 0.5}}, {0.4, 0.6});
  const GeodesicPath path = build_geodesic(mu, nu, st, *u, 5, 1e-10);
  REQUIRE(path.s_grid.size() == 5u);
  CHECK(path.s_grid.front() == 0.0);
  CHECK(path.s_grid.back() == 1.0);
  CHECK(path.lambda > 0.0);

  // ell_u(mu_0, mu_s) = s lambda along the path, checked at the half point.
  const TransportSolution half =
      ell_u(path.measures.front(), path.measures[2], st, *u, 1e-10);
  REQUIRE(half.lambda.is_finite());
  CHECK(half.lambda.raw() ==
        doctest::Approx(0.5 * path.lambda).epsilon(1e-6));

  CHECK(geodesy_defect(path, st, *u, 1e-10) <= 2e-6);

  // A deliberately suboptimal plan fails geodesy by a visible margin. This
  // is the other vertex of the 2x2 polytope: it swaps mass across the
  // crossing edges while keeping the marginals.
  Coupling bad(2, 2);
  bad.at(0, 1) = 0.5;
  bad.at(1, 0) = 0.4;
  bad.at(1, 1) = 0.1;
  const GeodesicPath crooked = path_from_coupling(mu, nu, bad, path.lambda,
                                                  st, 5);
  CHECK(geodesy_defect(crooked, st, *u, 1e-10) > 1e-3);
}

TEST_CASE("potential catalogue derivatives") {
  Matrix Q(2, 2);
  Q << 0.3, 0.1, 0.1, -0.2;
  const PotentialField quad = PotentialField::quadratic(Q, Vec{0.5, -1.0}, 2.0);
  const PotentialField aff = PotentialField::affine(Vec{1.5, 0.5}, -1.0);
  for (const PotentialField* phi : {&quad, &aff}) {
    const Event x{0.8, -0.6};
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i) {
      Event xp = x, xm = x;
      xp[static_cast<std::size_t>(i)] += h;
      xm[static_cast<std::size_t>(i)] -= h;
      const double fd = (phi->value(xp) - phi->value(xm)) / (2 * h);
      CHECK(phi->gradient(x)[static_cast<std::size_t>(i)] ==
            doctest::Approx(fd).epsilon(1e-8));
    }
  }
  CHECK(quad.hessian()(0, 1) == 0.1);

  Matrix asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS((void)PotentialField::quadratic(asym, Vec{0, 0}, 0.0),
                  PreconditionError);
}

TEST_CASE("hamiltonian hessian matches finite differences of the gradient") {
  const auto u = make_power(0.5);
  const auto ustar = conjugate(u);
  // A strictly past-timelike covector away from symmetry axes.
  const Vec w{-1.7, 0.3};
  const Matrix H = hamiltonian_hessian(w, *ustar);
  CHECK(H(0, 1) == doctest::Approx(H(1, 0)).epsilon(1e-12));
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vec wp = w, wm = w;
    wp[static_cast<std::size_t>(i)] += h;
    wm[static_cast<std::size_t>(i)] -= h;
    const Vec gp = hamiltonian_gradient(wp, *ustar);
    const Vec gm = hamiltonian_gradient(wm, *ustar);
    for (int j = 0; j < 2; ++j) {
      const double fd =
          (gp[static_cast<std::size_t>(j)] - gm[static_cast<std::size_t>(j)]) /
          (2 * h);
      CHECK(H(j, i) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
}

TEST_CASE("constant drift maps exactly") {
  const WeightedMinkowski st = flat2();
  const auto u = make_power(0.5);
  const Vec v_hat{1.0, 0.0};
  const PotentialField phi = drift_potential(*u, v_hat);
  const std::vector<Event> cloud{Event{0, -0.3}, Event{0, 0.0}, Event{0, 0.4}};
  const std::vector<double> mass{0.25, 0.5, 0.25};
  const TransportMapSample sample =
      transport_map(phi, *u, 1.0, 0.5, cloud, mass, st);
  REQUIRE(sample.base.size() == 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(sample.velocity[k][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sample.velocity[k][1] == doctest::Approx(0.0));
    CHECK(sample.mapped[k][0] == doctest::Approx(cloud[k][0] + 0.5));
    CHECK(sample.mapped[k][1] == doctest::Approx(cloud[k][1]));
    CHECK(sample.det_jacobian[k] == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("map jacobian agrees with finite differences") {
  const WeightedMinkowski st = flat2();
  const auto u = make_power(0.5);
  Matrix Q(2, 2);
  Q << -0.12, 0.03, 0.03, 0.08;
  const Vec a = vscale(-u->d1(1.0), lower_index(Vec{1.0, 0.0}));
  const PotentialField phi = PotentialField::quadratic(Q, a, 0.0);
  const std::vector<Event> cloud{Event{0.1, -0.2}, Event{-0.1, 0.3}};
  const std::vector<double> mass{0.5, 0.5};
  const double s = 0.6;
  const TransportMapSample sample =
      transport_map(phi, *u, 1.0, s, cloud, mass, st);

  // At s = 0 the map is the identity.
  const TransportMapSample at0 =
      transport_map(phi, *u, 1.0, 0.0, cloud, mass, st);
  CHECK(at0.mapped[0] == cloud[0]);
  CHECK(at0.det_jacobian[0] == doctest::Approx(1.0));

  const double h = 1e-6;
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    for (int c = 0; c < 2; ++c) {
      std::vector<Event> cp = cloud, cm = cloud;
      cp[k][static_cast<std::size_t>(c)] += h;
      cm[k][static_cast<std::size_t>(c)] -= h;
      const TransportMapSample sp =
          transport_map(phi, *u, 1.0, s, cp, mass, st);
      const TransportMapSample sm =
          transport_map(phi, *u, 1.0, s, cm, mass, st);
      for (int r = 0; r < 2; ++r) {
        const double fd = (sp.mapped[k][static_cast<std::size_t>(r)] -
                           sm.mapped[k][static_cast<std::size_t>(r)]) /
                          (2 * h);
        CHECK(sample.jacobian[k](r, c) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("degenerate jacobians are reported before the endpoint") {
  const WeightedMinkowski st = flat2();
  const auto u = make_power(0.5);
  // A strongly contracting quadratic term drives det A_s through zero: at the
  // origin the deformation rate is exactly diag(-60, -30), so the Jacobian
  // determinant (1 - 60s)(1 - 30s) is negative precisely on (1/60, 1/30).
  Matrix Q(2, 2);
  Q << -30.0, 0.0, 0.0, -30.0;
  const Vec a = vscale(-u->d1(1.0), lower_index(Vec{1.0, 0.0}));
  const PotentialField phi = PotentialField::quadratic(Q, a, 0.0);
  const std::vector<Event> cloud{Event{0.0, 0.0}};
  const std::vector<double> mass{1.0};
  CHECK_NOTHROW((void)transport_map(phi, *u, 1.0, 0.01, cloud, mass, st));
  CHECK_THROWS_AS(
      (void)transport_map(phi, *u, 1.0, 0.025, cloud, mass, st), SolverError);
}

TEST_CASE("crossings violate two-cycle monotonicity") {
  const WeightedMinkowski st = flat2();
  const auto u = make_power(0.5);
  // Swapped targets collide at the spatial origin halfway up.
  const std::vector<std::pair<Event, Event>> crossing{
      {Event{0, -0.5}, Event{2, 0.5}}, {Event{0, 0.5}, Event{2, -0.5}}};
  const NonCrossingVerdict v = non_crossing_check(crossing, 0.5, *u, 2.0, st);
  CHECK(v.ok);  // collisions of hypothesis-violating pairs are permitted
  REQUIRE(v.collisions.size() == 1u);
  CHECK(v.collisions[0].hypothesis_violated);
  CHECK(v.collisions[0].margin < 0.0);

  const std::vector<std::pair<Event, Event>> parallel{
      {Event{0, -0.5}, Event{2, -0.5}}, {Event{0, 0.5}, Event{2, 0.5}}};
  const NonCrossingVerdict ok = non_crossing_check(parallel, 0.5, *u, 2.0, st);
  CHECK(ok.ok);
  CHECK(ok.collisions.empty());

  CHECK_THROWS_AS((void)non_crossing_check(parallel, 1.0, *u, 2.0, st),
                  PreconditionError);
}

TEST_CASE("mass transport conserves volume integrals") {
  const WeightedMinkowski st = flat2();
  const auto u = make_power(0.5);
  const BoxDensity rho0{Vec{-0.25, -0.25}, Vec{0.25, 0.25}};

  // Pure translation: exact up to finite-difference noise in the Jacobian.
  const PotentialField drift = drift_potential(*u, Vec{1.0, 0.0});
  CHECK(monge_ampere_residual(drift, rho0, *u, 1.0, 0.7, st, 16) <= 1e-9);

  // Gentle quadratic distortion: exact at modest quadrature order and stable
  // when the order doubles.
  Matrix Q(2, 2);
  Q << -0.1, 0.02, 0.02, 0.06;
  const Vec a = vscale(-u->d1(1.0), lower_index(Vec{1.0, 0.0}));
  const PotentialField phi = PotentialField::quadratic(Q, a, 0.0);
  const double r16 = monge_ampere_residual(phi, rho0, *u, 1.0, 0.5, st, 16);
  const double r32 = monge_ampere_residual(phi, rho0, *u, 1.0, 0.5, st, 32);
  CHECK(r16 <= 1e-5);
  CHECK(r32 <= 1e-6);
}

}  // TEST_SUITE
