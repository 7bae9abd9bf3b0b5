#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "lot/errors.hpp"
#include "lot/measure.hpp"

using namespace lot;

TEST_SUITE("measure") {

TEST_CASE("constructor validates its inputs") {
  CHECK_THROWS_AS(DiscreteMeasure({}, {}), PreconditionError);
  CHECK_THROWS_AS(DiscreteMeasure({Event{0, 0}}, {0.5}), PreconditionError);
  CHECK_THROWS_AS(DiscreteMeasure({Event{0, 0}, Event{1, 0}}, {1.5, -0.5}),
                  PreconditionError);
  CHECK_THROWS_AS(DiscreteMeasure({Event{0, 0}, Event{1, 0}}, {1.0, 0.0}),
                  PreconditionError);
  CHECK_THROWS_AS(DiscreteMeasure({Event{0, 0}, Event{0, 0}}, {0.5, 0.5}),
                  PreconditionError);  // duplicate atoms
  CHECK_THROWS_AS(DiscreteMeasure({Event{0, 0}, Event{1, 0, 0}}, {0.5, 0.5}),
                  PreconditionError);  // mixed dimensions
  CHECK_THROWS_AS(DiscreteMeasure({Event{0}}, {1.0}), PreconditionError);
  CHECK_THROWS_AS(
      DiscreteMeasure({Event{0, std::numeric_limits<double>::quiet_NaN()}},
                      {1.0}),
      PreconditionError);
}

TEST_CASE("uniform weights sum to one exactly") {
  for (std::size_t n : {1u, 3u, 7u, 100u}) {
    std::vector<Event> pts;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back(Event{static_cast<double>(i), 0.0});
    const DiscreteMeasure m = DiscreteMeasure::uniform(pts);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += m.weight(i);
    CHECK(s == 1.0);
  }
  const DiscreteMeasure d = DiscreteMeasure::dirac(Event{2, 3});
  CHECK(d.size() == 1u);
  CHECK(d.weight(0) == 1.0);
}

TEST_CASE("json round trip is value exact") {
  const DiscreteMeasure m({Event{0.1, -1.0 / 3.0}, Event{2.0, 1e-17},
                           Event{3.7e5, 0.125}},
                          {0.3, 0.3, 0.4});
  const DiscreteMeasure back = parse_measure_json(measure_to_json(m));
  REQUIRE(back.size() == m.size());
  CHECK(back.points() == m.points());
  CHECK(back.weights() == m.weights());

  const std::string path = "/tmp/lot_measure_roundtrip_test.json";
  save_measure(m, path);
  const DiscreteMeasure loaded = load_measure(path);
  CHECK(loaded.points() == m.points());
  CHECK(loaded.weights() == m.weights());
  std::remove(path.c_str());
}

TEST_CASE("measure parsing rejects malformed input as config errors") {
  CHECK_THROWS_AS((void)parse_measure_json("not json"), ConfigError);
  CHECK_THROWS_AS((void)parse_measure_json("[1,2,3]"), ConfigError);
  CHECK_THROWS_AS((void)parse_measure_json(R"({"points": [[0,0]]})"),
                  ConfigError);
  CHECK_THROWS_AS(
      (void)parse_measure_json(R"({"points": [["a",0]], "weights": [1.0]})"),
      ConfigError);
  // Validation failures surface as config errors too: the text came from disk.
  CHECK_THROWS_AS(
      (void)parse_measure_json(
          R"({"points": [[0,0],[1,0]], "weights": [0.5, 0.6]})"),
      ConfigError);
  CHECK_THROWS_AS((void)load_measure("/nonexistent/measure.json"), ConfigError);
}

TEST_CASE("coupling marginals") {
  const DiscreteMeasure mu({Event{0, 0}, Event{0, 1}}, {0.25, 0.75});
  const DiscreteMeasure nu({Event{2, 0}, Event{2, 1}, Event{2, -1}},
                           {0.5, 0.25, 0.25});

  const Coupling prod = Coupling::product(mu, nu);
  CHECK(prod.marginal_defect(mu, nu) <= 1e-15);
  CHECK_NOTHROW(prod.require_marginals(mu, nu));
  CHECK(prod(1, 2) == doctest::Approx(0.75 * 0.25));

  const Coupling id = Coupling::identity(mu);
  CHECK(id.row_sum(0) == 0.25);
  CHECK(id.col_sum(1) == 0.75);
  CHECK(id(0, 1) == 0.0);

  Coupling off(2, 3);
  off.at(0, 0) = 0.25;
  off.at(1, 1) = 0.75;  // column marginals miss nu by 0.25
  CHECK(off.marginal_defect(mu, nu) == doctest::Approx(0.5));
  CHECK_THROWS_AS(off.require_marginals(mu, nu), PreconditionError);

  CHECK_THROWS_AS(Coupling(2, 2, {0.5, 0.5}), PreconditionError);
  CHECK_THROWS_AS(Coupling(1, 2, {0.5, -0.5}), PreconditionError);
}

}  // TEST_SUITE
