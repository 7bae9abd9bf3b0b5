#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "lot/errors.hpp"
#include "lot/lp.hpp"
#include "support/oracles.hpp"

using namespace lot;

namespace {

std::vector<double> random_marginal(testing::Rng& rng, int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  double total = 0;
  for (double& v : w) {
    v = 0.1 + rng.uniform();
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("hand instance with a known optimum") {
  // 2x2, dense: max 3 f00 + 1 f01 + 1 f10 + 4 f11 with marginals
  // (0.5, 0.5) / (0.5, 0.5). Unique optimum is the diagonal.
  const std::vector<std::uint8_t> allowed{1, 1, 1, 1};
  const std::vector<double> cost{3, 1, 1, 4};
  const std::vector<double> half{0.5, 0.5};
  const lp::TransportResult r = lp::solve_max(2, 2, allowed, cost, half, half);
  CHECK(r.value == doctest::Approx(3.5).epsilon(1e-14));
  CHECK(r.flow[0] == doctest::Approx(0.5));
  CHECK(r.flow[3] == doctest::Approx(0.5));
  CHECK(r.flow[1] == doctest::Approx(0.0));
}

TEST_CASE("optimality certified by potentials") {
  testing::Rng rng(501);
  for (int inst = 0; inst < 40; ++inst) {
    const int rows = 2 + static_cast<int>(rng.uniform_int(0, 2));
    const int cols = 2 + static_cast<int>(rng.uniform_int(0, 2));
    std::vector<std::uint8_t> allowed(
        static_cast<std::size_t>(rows * cols), 1);
    std::vector<double> cost(static_cast<std::size_t>(rows * cols));
    for (double& c : cost) c = rng.uniform(-2.0, 5.0);
    const std::vector<double> supply = random_marginal(rng, rows);
    const std::vector<double> demand = random_marginal(rng, cols);
    const lp::TransportResult r =
        lp::solve_max(rows, cols, allowed, cost, supply, demand);

    // Marginals hold.
    for (int i = 0; i < rows; ++i) {
      double s = 0;
      for (int j = 0; j < cols; ++j)
        s += r.flow[static_cast<std::size_t>(i * cols + j)];
      CHECK(s == doctest::Approx(supply[static_cast<std::size_t>(i)])
                     .epsilon(1e-12));
    }
    // Dual feasibility with complementary slackness.
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        const std::size_t e = static_cast<std::size_t>(i * cols + j);
        const double slack = r.row_potential[static_cast<std::size_t>(i)] +
                             r.col_potential[static_cast<std::size_t>(j)] -
                             cost[e];
        CHECK(slack >= -1e-9);
        if (r.flow[e] > 1e-12) CHECK(std::abs(slack) <= 1e-9);
      }
  }
}

TEST_CASE("agrees with exhaustive vertex enumeration") {
  testing::Rng rng(777);
  for (int inst = 0; inst < 60; ++inst) {
    const int rows = 2 + static_cast<int>(rng.uniform_int(0, 2));
    const int cols = 2 + static_cast<int>(rng.uniform_int(0, 2));
    const std::size_t edges = static_cast<std::size_t>(rows * cols);
    std::vector<std::uint8_t> allowed(edges, 1);
    if (inst % 2 == 1)  // sparse masks, keeping at least one edge per line
      for (std::size_t e = 0; e < edges; ++e)
        if (rng.uniform() < 0.35) allowed[e] = 0;
    for (int i = 0; i < rows; ++i) {
      bool any = false;
      for (int j = 0; j < cols; ++j)
        any = any || allowed[static_cast<std::size_t>(i * cols + j)];
      if (!any) allowed[static_cast<std::size_t>(
          i * cols + static_cast<int>(rng.uniform_int(0, cols - 1)))] = 1;
    }
    for (int j = 0; j < cols; ++j) {
      bool any = false;
      for (int i = 0; i < rows; ++i)
        any = any || allowed[static_cast<std::size_t>(i * cols + j)];
      if (!any) allowed[static_cast<std::size_t>(
          static_cast<int>(rng.uniform_int(0, rows - 1)) * cols + j)] = 1;
    }
    std::vector<double> cost(edges);
    for (double& c : cost) c = rng.uniform(-1.0, 4.0);
    const std::vector<double> supply = random_marginal(rng, rows);
    const std::vector<double> demand = random_marginal(rng, cols);

    const testing::VertexOptimum oracle = testing::vertex_enumeration_max(
        rows, cols, allowed, cost, supply, demand);
    const bool lp_feasible =
        lp::feasible(rows, cols, allowed, supply, demand);
    REQUIRE(lp_feasible == oracle.feasible);
    if (!oracle.feasible) {
      CHECK_THROWS_AS(
          (void)lp::solve_max(rows, cols, allowed, cost, supply, demand),
          SolverError);
      continue;
    }
    const lp::TransportResult r =
        lp::solve_max(rows, cols, allowed, cost, supply, demand);
    CHECK(r.value == doctest::Approx(oracle.value).epsilon(1e-9));
  }
}

TEST_CASE("max-flow feasibility on restricted edges") {
  // Two suppliers, two consumers, only the diagonal allowed: feasible iff the
  // marginals match exactly across the diagonal.
  const std::vector<std::uint8_t> diag{1, 0, 0, 1};
  CHECK(lp::feasible(2, 2, diag, {0.3, 0.7}, {0.3, 0.7}));
  CHECK_FALSE(lp::feasible(2, 2, diag, {0.3, 0.7}, {0.4, 0.6}));

  std::vector<double> flow;
  CHECK(lp::feasible(2, 2, {1, 1, 0, 1}, {0.6, 0.4}, {0.5, 0.5}, &flow));
  REQUIRE(flow.size() == 4u);
  CHECK(flow[2] == 0.0);
  CHECK(flow[0] + flow[1] == doctest::Approx(0.6));
  CHECK(flow[0] + flow[2] == doctest::Approx(0.5));

  CHECK_THROWS_AS((void)lp::solve_max(2, 2, diag, {1, 0, 0, 1}, {0.3, 0.7},
                                      {0.4, 0.6}),
                  SolverError);
}

TEST_CASE("degenerate marginals") {
  // A zero-supply row forces its flows to vanish even on allowed edges.
  const std::vector<std::uint8_t> allowed{1, 1, 1, 1, 1, 1};
  const std::vector<double> cost{5, 1, 2, 0, 3, 1};
  const lp::TransportResult r =
      lp::solve_max(2, 3, allowed, cost, {0.0, 1.0}, {0.2, 0.3, 0.5});
  CHECK(r.flow[0] == 0.0);
  CHECK(r.flow[1] == 0.0);
  CHECK(r.flow[2] == 0.0);
  CHECK(r.value == doctest::Approx(0.2 * 0 + 0.3 * 3 + 0.5 * 1));
}

}  // TEST_SUITE
