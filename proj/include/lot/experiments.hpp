#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lot/admissible.hpp"
#include "lot/entropy.hpp"
#include "lot/geodesic.hpp"
#include "lot/measure.hpp"
#include "lot/spacetime.hpp"

namespace lot {

// Named, reproducible instances shared by the CLI and the test suites. Every
// instance is generated deterministically (quasi-random clouds with recorded
// offsets), so repeat runs produce byte-identical artifacts.

// Two measures plus the ambient model: the unit of work for the transport,
// duality, and geodesic commands.
struct TransportInstance {
  std::string name;
  WeightedMinkowski st;
  UPtr u;
  DiscreteMeasure mu;
  DiscreteMeasure nu;
};

// A convexity experiment: a uniform ball cloud translated along v_hat.
// Forward instances certify a Ricci bound and check the margin stays
// nonnegative; converse instances sweep decreasing radii and expect a
// negative margin.
struct EntropyInstance {
  std::string name;
  WeightedMinkowski st;
  UPtr u;
  double K = 0.0;
  Vec v_hat;
  std::vector<double> radii;  // decreasing; back() is the headline radius
  int particles = 4096;
  int grid_points = 9;
  bool converse = false;
  std::uint64_t seed = 0;  // Halton offset for the cloud sampler
};

// Map-level instance: a closed-form potential over a box density, for the
// transport-map and mass-conservation commands.
struct MapInstance {
  std::string name;
  WeightedMinkowski st;
  UPtr u;
  double lambda = 1.0;
  double s = 0.5;
  PotentialField phi;
  BoxDensity rho0;
  int points_per_axis = 32;
  int cloud = 128;  // particles sampled from the box for the map artifact
};

// Catalogue lookups; unknown names throw ConfigError listing the catalogue.
TransportInstance make_transport_instance(const std::string& name);
EntropyInstance make_entropy_instance(const std::string& name);
MapInstance make_map_instance(const std::string& name);
std::vector<std::string> transport_catalogue();
std::vector<std::string> entropy_catalogue();
std::vector<std::string> map_catalogue();

struct EntropyRun {
  std::string name;
  bool converse = false;
  double K = 0.0;
  double certified_K = 0.0;  // sampled Ricci lower bound over the swept box
  double lambda = 0.0;       // geodesic scale of the reported curve
  EntropyCurve curve;        // smallest-radius curve for converse runs
  ConvexityReport report;
  RicciFailureReport failure;  // populated for converse runs only
  bool margins_ok = false;     // forward: min margin >= -1e-6;
                               // converse: violation observed
};

EntropyRun run_entropy_instance(const EntropyInstance& exp);

}  // namespace lot
