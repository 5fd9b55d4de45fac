#pragma once

#include "geosocial/model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace geosocial {

struct TransportSolution {
  double cost = 0.0;     // sum_ij flow_ij * cost_ij, in supply units
  Eigen::MatrixXd flow;  // m x n
  std::size_t pivots = 0;
};

// Exact balanced transportation problem with integer masses, solved with the
// transportation simplex (least-cost start, potentials, tree cycle pivots).
// Throws ConfigError when the masses are negative or unbalanced.
TransportSolution solve_transport(std::span<const std::int64_t> supply,
                                  std::span<const std::int64_t> demand,
                                  const Eigen::MatrixXd& cost);

// Earth mover's distance between two point sets carrying uniform unit mass each,
// Euclidean ground metric.
double point_set_emd(std::span<const Point> a, std::span<const Point> b);

}  // namespace geosocial
