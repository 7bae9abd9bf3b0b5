#pragma once

#include <cstdint>
#include <vector>

namespace lot::lp {

// Result of maximizing <flow, cost> over the transportation polytope
// {flow >= 0, row sums = supply, col sums = demand} restricted to allowed
// edges. Potentials certify optimality: phi_i + psi_j >= cost_ij on every
// allowed edge, with equality on the support.
struct TransportResult {
  double value = 0.0;
  std::vector<double> flow;           // dense rows x cols, 0 off support
  std::vector<double> row_potential;  // phi
  std::vector<double> col_potential;  // psi
  int iterations = 0;
};

// True iff some nonnegative flow with the given marginals is supported on
// the allowed edges; decided by max-flow. When flow_out is non-null and the
// instance is feasible, a feasible (not necessarily optimal) dense flow is
// written to it.
bool feasible(int rows, int cols, const std::vector<std::uint8_t>& allowed,
              const std::vector<double>& supply,
              const std::vector<double>& demand,
              std::vector<double>* flow_out = nullptr);

// Exact transportation simplex (maximization). Throws SolverError when the
// instance is infeasible or the pivot cap is exceeded.
TransportResult solve_max(int rows, int cols,
                          const std::vector<std::uint8_t>& allowed,
                          const std::vector<double>& cost,
                          const std::vector<double>& supply,
                          const std::vector<double>& demand);

}  // namespace lot::lp
