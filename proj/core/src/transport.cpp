#include "geosocial/transport.hpp"

#include "geosocial/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace geosocial {

namespace {

struct Cell {
  std::size_t row;
  std::size_t col;
  std::int64_t flow;
};

// Basis of a transportation problem: m + n - 1 cells forming a spanning tree on
// the bipartite graph rows (0..m-1) + columns (m..m+n-1).
class Basis {
 public:
  Basis(std::size_t m, std::size_t n) : m_(m), n_(n) {}

  std::vector<Cell>& cells() { return cells_; }

  // Rooted at row 0: parent node, parent cell, depth. Uses cells() as edges.
  void rebuild_tree() {
    const std::size_t nodes = m_ + n_;
    adjacency_.assign(nodes, {});
    for (std::size_t e = 0; e < cells_.size(); ++e) {
      adjacency_[cells_[e].row].push_back(e);
      adjacency_[m_ + cells_[e].col].push_back(e);
    }
    parent_.assign(nodes, kNone);
    parent_cell_.assign(nodes, kNone);
    depth_.assign(nodes, 0);
    order_.clear();
    std::vector<char> seen(nodes, 0);
    seen[0] = 1;
    order_.push_back(0);
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const std::size_t u = order_[head];
      for (std::size_t e : adjacency_[u]) {
        const std::size_t v = other(e, u);
        if (seen[v]) continue;
        seen[v] = 1;
        parent_[v] = u;
        parent_cell_[v] = e;
        depth_[v] = depth_[u] + 1;
        order_.push_back(v);
      }
    }
    if (order_.size() != nodes) throw Error("transport basis is not a spanning tree");
  }

  // Potentials with u_0 = 0 and u_r + v_c = cost(r, c) on basic cells.
  void potentials(const Eigen::MatrixXd& cost, std::vector<double>& u,
                  std::vector<double>& v) const {
    u.assign(m_, 0.0);
    v.assign(n_, 0.0);
    for (std::size_t node : order_) {
      if (node == 0) continue;
      const Cell& c = cells_[parent_cell_[node]];
      const double cij = cost(static_cast<Eigen::Index>(c.row), static_cast<Eigen::Index>(c.col));
      if (node >= m_) {
        v[node - m_] = cij - u[c.row];
      } else {
        u[node] = cij - v[c.col];
      }
    }
  }

  // Cells on the tree path from node a to node b, in order from a.
  std::vector<std::size_t> path(std::size_t a, std::size_t b) const {
    std::vector<std::size_t> from_a;
    std::vector<std::size_t> from_b;
    while (depth_[a] > depth_[b]) {
      from_a.push_back(parent_cell_[a]);
      a = parent_[a];
    }
    while (depth_[b] > depth_[a]) {
      from_b.push_back(parent_cell_[b]);
      b = parent_[b];
    }
    while (a != b) {
      from_a.push_back(parent_cell_[a]);
      a = parent_[a];
      from_b.push_back(parent_cell_[b]);
      b = parent_[b];
    }
    from_a.insert(from_a.end(), from_b.rbegin(), from_b.rend());
    return from_a;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  std::size_t other(std::size_t e, std::size_t node) const {
    const std::size_t r = cells_[e].row;
    const std::size_t c = m_ + cells_[e].col;
    return node == r ? c : r;
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> parent_cell_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> order_;
};

// Least-cost initial basic feasible solution with exactly m + n - 1 cells.
std::vector<Cell> least_cost_start(std::vector<std::int64_t> supply,
                                   std::vector<std::int64_t> demand,
                                   const Eigen::MatrixXd& cost) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  std::vector<std::size_t> order(m * n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cost(static_cast<Eigen::Index>(a / n), static_cast<Eigen::Index>(a % n)) <
           cost(static_cast<Eigen::Index>(b / n), static_cast<Eigen::Index>(b % n));
  });
  std::vector<char> row_open(m, 1);
  std::vector<char> col_open(n, 1);
  std::size_t open_rows = m;
  std::size_t open_cols = n;
  std::vector<Cell> cells;
  cells.reserve(m + n - 1);
  for (std::size_t flat : order) {
    if (cells.size() == m + n - 1) break;
    const std::size_t r = flat / n;
    const std::size_t c = flat % n;
    if (!row_open[r] || !col_open[c]) continue;
    const std::int64_t f = std::min(supply[r], demand[c]);
    cells.push_back({r, c, f});
    supply[r] -= f;
    demand[c] -= f;
    const bool close_row =
        supply[r] == 0 && (demand[c] != 0 || open_rows > 1 || open_cols == 1);
    if (close_row) {
      row_open[r] = 0;
      --open_rows;
    } else {
      col_open[c] = 0;
      --open_cols;
    }
  }
  if (cells.size() != m + n - 1) throw Error("transport start produced an incomplete basis");
  return cells;
}

}  // namespace

TransportSolution solve_transport(std::span<const std::int64_t> supply_in,
                                  std::span<const std::int64_t> demand_in,
                                  const Eigen::MatrixXd& cost) {
  if (cost.rows() != static_cast<Eigen::Index>(supply_in.size()) ||
      cost.cols() != static_cast<Eigen::Index>(demand_in.size())) {
    throw DimensionError("transport cost matrix does not match the masses");
  }
  auto nonneg = [](std::int64_t v) { return v >= 0; };
  if (!std::all_of(supply_in.begin(), supply_in.end(), nonneg) ||
      !std::all_of(demand_in.begin(), demand_in.end(), nonneg)) {
    throw ConfigError("transport masses must be nonnegative");
  }
  const std::int64_t total = std::accumulate(supply_in.begin(), supply_in.end(), std::int64_t{0});
  if (total != std::accumulate(demand_in.begin(), demand_in.end(), std::int64_t{0})) {
    throw ConfigError("transport masses are unbalanced");
  }

  TransportSolution out;
  out.flow = Eigen::MatrixXd::Zero(cost.rows(), cost.cols());
  if (total == 0) return out;

  // Zero-mass rows and columns never carry flow; solve on the support.
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < supply_in.size(); ++i) {
    if (supply_in[i] > 0) rows.push_back(i);
  }
  for (std::size_t j = 0; j < demand_in.size(); ++j) {
    if (demand_in[j] > 0) cols.push_back(j);
  }
  const std::size_t m = rows.size();
  const std::size_t n = cols.size();
  Eigen::MatrixXd c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  std::vector<std::int64_t> supply(m);
  std::vector<std::int64_t> demand(n);
  for (std::size_t i = 0; i < m; ++i) {
    supply[i] = supply_in[rows[i]];
    for (std::size_t j = 0; j < n; ++j) {
      c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          cost(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  for (std::size_t j = 0; j < n; ++j) demand[j] = demand_in[cols[j]];
  if (!c.allFinite()) throw ConfigError("transport costs must be finite");

  Basis basis(m, n);
  basis.cells() = least_cost_start(supply, demand, c);

  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * scale;
  const std::size_t max_pivots = 50 * (m * n + m + n) + 1000;
  std::vector<char> basic(m * n, 0);
  std::vector<double> u;
  std::vector<double> v;

  while (true) {
    basis.rebuild_tree();
    basis.potentials(c, u, v);
    std::fill(basic.begin(), basic.end(), 0);
    for (const Cell& cell : basis.cells()) basic[cell.row * n + cell.col] = 1;

    double best = -eps;
    std::size_t enter_r = m;
    std::size_t enter_c = n;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (basic[i * n + j]) continue;
        const double reduced =
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - u[i] - v[j];
        if (reduced < best) {
          best = reduced;
          enter_r = i;
          enter_c = j;
        }
      }
    }
    if (enter_r == m) break;
    if (++out.pivots > max_pivots) throw Error("transport simplex did not converge");

    // Cycle: entering cell (+), then the tree path from its column back to its row,
    // alternating -, +, ...
    const auto cycle = basis.path(m + enter_c, enter_r);
    std::int64_t theta = std::numeric_limits<std::int64_t>::max();
    std::size_t leave = cycle.size();
    for (std::size_t t = 0; t < cycle.size(); t += 2) {
      const std::int64_t f = basis.cells()[cycle[t]].flow;
      if (f < theta) {
        theta = f;
        leave = t;
      }
    }
    for (std::size_t t = 0; t < cycle.size(); ++t) {
      basis.cells()[cycle[t]].flow += (t % 2 == 0) ? -theta : theta;
    }
    basis.cells()[cycle[leave]] = Cell{enter_r, enter_c, theta};
  }

  for (const Cell& cell : basis.cells()) {
    const double cij = c(static_cast<Eigen::Index>(cell.row), static_cast<Eigen::Index>(cell.col));
    out.cost += static_cast<double>(cell.flow) * cij;
    out.flow(static_cast<Eigen::Index>(rows[cell.row]), static_cast<Eigen::Index>(cols[cell.col])) =
        static_cast<double>(cell.flow);
  }
  return out;
}

double point_set_emd(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw UndefinedError("EMD of an empty point set");
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  if (m == 1 || n == 1) {
    double sum = 0.0;
    for (const Point& p : a) {
      for (const Point& q : b) sum += distance(p, q);
    }
    return sum / static_cast<double>(m * n);
  }
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = distance(a[i], b[j]);
    }
  }
  // Each a-point carries n units, each b-point m units: total mass m n, exact integers.
  const std::vector<std::int64_t> supply(m, static_cast<std::int64_t>(n));
  const std::vector<std::int64_t> demand(n, static_cast<std::int64_t>(m));
  return solve_transport(supply, demand, cost).cost / static_cast<double>(m * n);
}

}  // namespace geosocial
