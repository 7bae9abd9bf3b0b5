#include "lot/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lot/errors.hpp"
#include "lot/geodesic.hpp"
#include "lot/support.hpp"

namespace lot {

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const std::string& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

}  // namespace

std::vector<std::string> transport_catalogue() {
  return {"one-vs-two", "two-by-two"};
}

std::vector<std::string> entropy_catalogue() {
  return {"forward-quadratic", "converse-flat", "converse-linear"};
}

std::vector<std::string> map_catalogue() { return {"map-quadratic"}; }

MapInstance make_map_instance(const std::string& name) {
  if (name == "map-quadratic") {
    // Gently curved potential over a small box: the gradient stays strictly
    // past timelike, so the map and its Jacobian are smooth on the support.
    Matrix Q(2, 2);
    Q << 0.1, 0.02, 0.02, 0.08;
    return MapInstance{name,
                       WeightedMinkowski(
                           2, Weight::none(),
                           std::numeric_limits<double>::infinity()),
                       make_power(0.5),
                       1.0,
                       0.5,
                       PotentialField::quadratic(Q, {-1.0, 0.0}, 0.0),
                       BoxDensity{{-0.2, -0.2}, {0.2, 0.2}},
                       32,
                       128};
  }
  throw ConfigError("unknown map instance '" + name +
                    "'; catalogue: " + join(map_catalogue()));
}

TransportInstance make_transport_instance(const std::string& name) {
  if (name == "one-vs-two") {
    // One atom facing two collinear timelike targets at separations 1 and 2.
    return TransportInstance{
        name,
        WeightedMinkowski(2, Weight::none(),
                          std::numeric_limits<double>::infinity()),
        make_power(0.5),
        DiscreteMeasure::dirac({0.0, 0.0}),
        DiscreteMeasure({{1.0, 0.0}, {2.0, 0.0}}, {0.5, 0.5})};
  }
  if (name == "two-by-two") {
    // Boosted 2x2 instance with all pairs strictly timelike.
    return TransportInstance{
        name,
        WeightedMinkowski(2, Weight::none(),
                          std::numeric_limits<double>::infinity()),
        make_power(0.5),
        DiscreteMeasure({{0.0, 0.0}, {0.1, 0.3}}, {0.6, 0.4}),
        DiscreteMeasure({{2.0, 0.2}, {2.2, -0.4}}, {0.5, 0.5})};
  }
  throw ConfigError("unknown transport instance '" + name +
                    "'; catalogue: " + join(transport_catalogue()));
}

EntropyInstance make_entropy_instance(const std::string& name) {
  if (name == "forward-quadratic") {
    // Quadratic weight, infinite synthetic dimension, unit time translation.
    // Certified bound K = alpha; the margin is alpha(|v|^2_eucl - lambda^2),
    // zero for a purely timelike translation.
    return EntropyInstance{name,
                           WeightedMinkowski(
                               2, Weight::quadratic(0.3),
                               std::numeric_limits<double>::infinity()),
                           make_power(0.5),
                           0.3,
                           {1.0, 0.0},
                           {0.25},
                           2048,
                           11,
                           false};
  }
  if (name == "converse-flat") {
    // Unweighted flat model: Ric = 0 < K = 1, margins sit at -lambda^2 = -1.
    return EntropyInstance{name,
                           WeightedMinkowski(
                               2, Weight::none(),
                               std::numeric_limits<double>::infinity()),
                           make_power(0.5),
                           1.0,
                           {1.0, 0.0},
                           {0.2, 0.1, 0.05},
                           4096,
                           9,
                           true};
  }
  if (name == "converse-linear") {
    // Linear weight with finite N: Ric^{(N,V)}(v,v) = -c^2/(N-n) = -0.5 at
    // v = (1,0), so margins approach -0.5 - K = -1.5 as r -> 0.
    return EntropyInstance{name,
                           WeightedMinkowski(2, Weight::linear(1.0), 4.0),
                           make_power(0.5),
                           1.0,
                           {1.0, 0.0},
                           {0.2, 0.1, 0.05},
                           4096,
                           9,
                           true};
  }
  throw ConfigError("unknown entropy instance '" + name +
                    "'; catalogue: " + join(entropy_catalogue()));
}

EntropyRun run_entropy_instance(const EntropyInstance& exp) {
  EntropyRun run;
  run.name = exp.name;
  run.converse = exp.converse;
  run.K = exp.K;

  if (exp.converse) {
    run.failure =
        ricci_failure_experiment(exp.v_hat, exp.radii, *exp.u, exp.K, exp.st,
                                 exp.particles, exp.grid_points, exp.seed);
    run.curve = run.failure.final_curve;
    run.report = convexity_report(run.curve);
    run.lambda = run.failure.lambda.back();
    run.certified_K = run.failure.ricci_at_base;  // the violated direction
    run.margins_ok = run.failure.violation_observed;
    return run;
  }

  const int dim = exp.st.dim();
  require(static_cast<int>(exp.v_hat.size()) == dim, "dimension mismatch");
  require(exp.radii.size() == 1,
          "forward instances use a single cloud radius");
  const double r = exp.radii.front();

  // Uniform ball cloud translated rigidly along v_hat (affine potential).
  const std::vector<Event> cloud =
      support::halton_ball(dim, r, exp.particles, exp.seed);
  std::vector<double> mass(exp.particles, 1.0 / exp.particles);
  double partial = 0.0;
  for (int k = 0; k + 1 < exp.particles; ++k) partial += mass[k];
  mass[exp.particles - 1] = 1.0 - partial;
  const double ball_vol = std::pow(std::acos(-1.0), 0.5 * dim) *
                          std::pow(r, dim) / std::tgamma(0.5 * dim + 1.0);
  const std::vector<double> rho0(exp.particles, 1.0 / ball_vol);

  Vec a = lower_index(exp.v_hat);
  for (double& c : a) c *= -exp.u->d1(1.0);
  const PotentialField phi = PotentialField::affine(a, 0.0);

  std::vector<double> s_grid(exp.grid_points);
  for (int k = 0; k < exp.grid_points; ++k)
    s_grid[k] = static_cast<double>(k) / (exp.grid_points - 1);
  s_grid.back() = 1.0;

  // Measured geodesic scale of the map's endpoint coupling.
  const TransportMapSample end =
      transport_map(phi, *exp.u, 1.0, 1.0, cloud, mass, exp.st);
  std::vector<double> ell(exp.particles);
  for (int k = 0; k < exp.particles; ++k) {
    const ExtendedReal l = exp.st.time_separation(cloud[k], end.mapped[k]);
    require(!l.is_neg_inf() && l.raw() > 0.0,
            "translated pair left the chronology");
    ell[k] = l.raw();
  }
  run.lambda = saturation_scale(ell, mass, *exp.u);

  EntropyCurve curve = entropy_curve(phi, *exp.u, 1.0, cloud, mass, rho0,
                                     exp.st, s_grid, exp.K);
  curve.lambda = run.lambda;
  run.curve = curve;
  run.report = convexity_report(curve);

  // Certify the Ricci bound over the box swept by the geodesic.
  Vec box_lo(dim, 0.0), box_hi(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    double lo = cloud[0][i], hi = cloud[0][i];
    for (int k = 0; k < exp.particles; ++k) {
      lo = std::min({lo, cloud[k][i], end.mapped[k][i]});
      hi = std::max({hi, cloud[k][i], end.mapped[k][i]});
    }
    box_lo[i] = lo;
    box_hi[i] = hi;
  }
  run.certified_K = exp.st.timelike_ricci_lower_bound(box_lo, box_hi, 512);
  run.margins_ok = run.report.min_margin_lambda2 >= -1e-6;
  return run;
}

}  // namespace lot
