#include "lot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <utility>

#include "lot/errors.hpp"

namespace lot::lp {

namespace {

constexpr double kResidualEps = 1e-15;

struct Arc {
  int to;
  double cap;
  int rev;
};

// Small Edmonds-Karp network for the feasibility question.
class FlowNet {
 public:
  explicit FlowNet(int n) : adj_(n) {}

  void add(int a, int b, double cap) {
    adj_[a].push_back({b, cap, static_cast<int>(adj_[b].size())});
    adj_[b].push_back({a, 0.0, static_cast<int>(adj_[a].size()) - 1});
  }

  double max_flow(int s, int t) {
    double total = 0.0;
    const int n = static_cast<int>(adj_.size());
    while (true) {
      std::vector<int> prev_node(n, -1), prev_arc(n, -1);
      std::queue<int> q;
      q.push(s);
      prev_node[s] = s;
      while (!q.empty() && prev_node[t] == -1) {
        const int u = q.front();
        q.pop();
        for (int k = 0; k < static_cast<int>(adj_[u].size()); ++k) {
          const Arc& a = adj_[u][k];
          if (a.cap > kResidualEps && prev_node[a.to] == -1) {
            prev_node[a.to] = u;
            prev_arc[a.to] = k;
            q.push(a.to);
          }
        }
      }
      if (prev_node[t] == -1) break;
      double bottleneck = std::numeric_limits<double>::infinity();
      for (int v = t; v != s; v = prev_node[v])
        bottleneck = std::min(bottleneck, adj_[prev_node[v]][prev_arc[v]].cap);
      for (int v = t; v != s; v = prev_node[v]) {
        Arc& a = adj_[prev_node[v]][prev_arc[v]];
        a.cap -= bottleneck;
        adj_[a.to][a.rev].cap += bottleneck;
      }
      total += bottleneck;
    }
    return total;
  }

  const std::vector<std::vector<Arc>>& adj() const { return adj_; }

 private:
  std::vector<std::vector<Arc>> adj_;
};

// Cancels cycles in the support of a feasible flow, turning it into a vertex
// (forest-supported) flow with the same marginals.
void cancel_cycles(int rows, int cols, std::vector<double>& flow) {
  const int nodes = rows + cols;
  const int edges = rows * cols;
  for (int round = 0; round <= edges; ++round) {
    // Live support edges and node degrees.
    std::vector<std::vector<int>> incident(nodes);
    std::vector<int> degree(nodes, 0);
    std::vector<std::uint8_t> live(edges, 0);
    for (int e = 0; e < edges; ++e) {
      if (flow[e] > 0.0) {
        live[e] = 1;
        const int a = e / cols;
        const int b = rows + e % cols;
        incident[a].push_back(e);
        incident[b].push_back(e);
        ++degree[a];
        ++degree[b];
      }
    }
    // Peel leaves; what remains is the 2-core, which is empty iff acyclic.
    std::queue<int> peel;
    for (int v = 0; v < nodes; ++v)
      if (degree[v] == 1) peel.push(v);
    while (!peel.empty()) {
      const int v = peel.front();
      peel.pop();
      if (degree[v] != 1) continue;
      for (int e : incident[v]) {
        if (!live[e]) continue;
        live[e] = 0;
        const int a = e / cols;
        const int b = rows + e % cols;
        const int w = (a == v) ? b : a;
        --degree[a];
        --degree[b];
        if (degree[w] == 1) peel.push(w);
        break;
      }
    }
    int start = -1;
    for (int v = 0; v < nodes && start < 0; ++v)
      if (degree[v] >= 2) start = v;
    if (start < 0) return;  // acyclic

    // Walk the 2-core until a node repeats; the suffix is a cycle.
    std::vector<int> seen_at(nodes, -1);
    std::vector<int> walk_edges;
    int u = start, came_by = -1;
    seen_at[u] = 0;
    std::vector<int> cycle;
    while (cycle.empty()) {
      int next_edge = -1;
      for (int e : incident[u])
        if (live[e] && e != came_by) {
          next_edge = e;
          break;
        }
      require(next_edge >= 0, "internal: 2-core walk stuck");
      const int a = next_edge / cols;
      const int b = rows + next_edge % cols;
      const int v = (a == u) ? b : a;
      walk_edges.push_back(next_edge);
      if (seen_at[v] >= 0) {
        cycle.assign(walk_edges.begin() + seen_at[v], walk_edges.end());
      } else {
        seen_at[v] = static_cast<int>(walk_edges.size());
        u = v;
        came_by = next_edge;
      }
    }

    // Alternate signs so the smallest-flow edge is decreased, then push.
    int argmin = 0;
    for (int k = 1; k < static_cast<int>(cycle.size()); ++k)
      if (flow[cycle[k]] < flow[cycle[argmin]]) argmin = k;
    const double theta = flow[cycle[argmin]];
    for (int k = 0; k < static_cast<int>(cycle.size()); ++k) {
      if ((k - argmin) % 2 == 0)
        flow[cycle[k]] -= theta;
      else
        flow[cycle[k]] += theta;
    }
    flow[cycle[argmin]] = 0.0;
  }
  throw SolverError("cycle cancellation did not terminate");
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

}  // namespace

bool feasible(int rows, int cols, const std::vector<std::uint8_t>& allowed,
              const std::vector<double>& supply,
              const std::vector<double>& demand,
              std::vector<double>* flow_out) {
  require(rows > 0 && cols > 0, "transport instance needs positive shape");
  require(allowed.size() == static_cast<std::size_t>(rows) * cols,
          "allowed mask shape mismatch");
  require(supply.size() == static_cast<std::size_t>(rows) &&
              demand.size() == static_cast<std::size_t>(cols),
          "marginal shape mismatch");
  const int src = 0;
  const int snk = rows + cols + 1;
  FlowNet net(rows + cols + 2);
  double total = 0;
  for (int i = 0; i < rows; ++i) {
    net.add(src, 1 + i, supply[i]);
    total += supply[i];
  }
  for (int j = 0; j < cols; ++j) net.add(1 + rows + j, snk, demand[j]);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (allowed[static_cast<std::size_t>(i) * cols + j])
        net.add(1 + i, 1 + rows + j, std::min(supply[i], demand[j]));
  const double pushed = net.max_flow(src, snk);
  const bool ok = total - pushed <= 1e-10 * std::max(1.0, total);
  if (ok && flow_out) {
    flow_out->assign(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int i = 0; i < rows; ++i)
      for (const Arc& a : net.adj()[1 + i])
        if (a.to >= 1 + rows && a.to < 1 + rows + cols) {
          const int j = a.to - 1 - rows;
          // Flow pushed through a forward arc equals its reverse residual.
          (*flow_out)[static_cast<std::size_t>(i) * cols + j] +=
              net.adj()[a.to][a.rev].cap;
        }
  }
  return ok;
}

TransportResult solve_max(int rows, int cols,
                          const std::vector<std::uint8_t>& allowed,
                          const std::vector<double>& cost,
                          const std::vector<double>& supply,
                          const std::vector<double>& demand) {
  require(cost.size() == static_cast<std::size_t>(rows) * cols,
          "cost shape mismatch");
  std::vector<double> flow;
  if (!feasible(rows, cols, allowed, supply, demand, &flow))
    throw SolverError("transportation instance is infeasible");
  cancel_cycles(rows, cols, flow);

  const int nodes = rows + cols;
  const int edges = rows * cols;
  std::vector<std::uint8_t> in_basis(edges, 0);
  std::vector<int> basis;
  DisjointSet ds(nodes);
  for (int e = 0; e < edges; ++e)
    if (flow[e] > 0.0) {
      in_basis[e] = 1;
      basis.push_back(e);
      ds.unite(e / cols, rows + e % cols);
    }
  // Grow the support forest into a spanning forest of the allowed graph.
  for (int e = 0; e < edges; ++e)
    if (allowed[e] && !in_basis[e] && ds.unite(e / cols, rows + e % cols)) {
      in_basis[e] = 1;
      basis.push_back(e);
    }

  double scale = 1.0;
  for (int e = 0; e < edges; ++e)
    if (allowed[e]) scale = std::max(scale, std::abs(cost[e]));
  const double tol_enter = 1e-11 * scale;

  std::vector<double> phi(rows, 0.0), psi(cols, 0.0);
  auto compute_potentials = [&]() {
    std::vector<std::vector<int>> adj(nodes);
    for (int e : basis) {
      adj[e / cols].push_back(e);
      adj[rows + e % cols].push_back(e);
    }
    std::vector<std::uint8_t> known(nodes, 0);
    for (int s = 0; s < nodes; ++s) {
      if (known[s]) continue;
      known[s] = 1;
      if (s < rows)
        phi[s] = 0.0;
      else
        psi[s - rows] = 0.0;
      std::queue<int> q;
      q.push(s);
      while (!q.empty()) {
        const int u = q.front();
        q.pop();
        for (int e : adj[u]) {
          const int i = e / cols;
          const int j = e % cols;
          const int v = (u == i) ? rows + j : i;
          if (known[v]) continue;
          known[v] = 1;
          if (v < rows)
            phi[i] = cost[e] - psi[j];
          else
            psi[j] = cost[e] - phi[i];
          q.push(v);
        }
      }
    }
  };

  const int cap = 1000 + 200 * rows * cols;
  int iterations = 0;
  while (true) {
    compute_potentials();
    int entering = -1;
    for (int e = 0; e < edges; ++e)
      if (allowed[e] && !in_basis[e] &&
          cost[e] - phi[e / cols] - psi[e % cols] > tol_enter) {
        entering = e;
        break;
      }
    if (entering < 0) break;
    if (++iterations > cap)
      throw SolverError("transportation simplex exceeded its pivot cap (" +
                        std::to_string(cap) + ")");

    // Tree path between the entering edge's endpoints.
    const int i0 = entering / cols;
    const int j0 = entering % cols;
    std::vector<std::vector<int>> adj(nodes);
    for (int e : basis) {
      adj[e / cols].push_back(e);
      adj[rows + e % cols].push_back(e);
    }
    std::vector<int> parent_edge(nodes, -1), parent_node(nodes, -1);
    std::vector<std::uint8_t> seen(nodes, 0);
    std::queue<int> q;
    q.push(i0);
    seen[i0] = 1;
    while (!q.empty() && !seen[rows + j0]) {
      const int u = q.front();
      q.pop();
      for (int e : adj[u]) {
        const int i = e / cols;
        const int j = e % cols;
        const int v = (u == i) ? rows + j : i;
        if (seen[v]) continue;
        seen[v] = 1;
        parent_edge[v] = e;
        parent_node[v] = u;
        q.push(v);
      }
    }
    require(seen[rows + j0], "internal: entering edge spans components");
    std::vector<int> path;  // edges from j0 back to i0
    for (int v = rows + j0; v != i0; v = parent_node[v])
      path.push_back(parent_edge[v]);

    // Around the cycle (entering, path...) signs alternate starting with +.
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < path.size(); k += 2)
      theta = std::min(theta, flow[path[k]]);
    int leaving = -1;
    for (std::size_t k = 0; k < path.size(); k += 2)
      if (flow[path[k]] == theta && (leaving < 0 || path[k] < leaving))
        leaving = path[k];
    require(leaving >= 0, "internal: no leaving edge");

    flow[entering] += theta;
    for (std::size_t k = 0; k < path.size(); ++k) {
      if (k % 2 == 0)
        flow[path[k]] -= theta;
      else
        flow[path[k]] += theta;
    }
    flow[leaving] = 0.0;
    in_basis[entering] = 1;
    in_basis[leaving] = 0;
    basis.push_back(entering);
    basis.erase(std::find(basis.begin(), basis.end(), leaving));
  }

  TransportResult out;
  out.flow = std::move(flow);
  out.row_potential = phi;
  out.col_potential = psi;
  out.iterations = iterations;
  out.value = 0.0;
  for (int e = 0; e < edges; ++e)
    if (out.flow[e] > 0.0) out.value += out.flow[e] * cost[e];
  return out;
}

}  // namespace lot::lp
