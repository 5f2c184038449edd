#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace evomem {

/// Barycentric weights b_i = 1 / prod_{j != i} (x_i - x_j) for distinct nodes.
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// Evaluates all Lagrange basis polynomials at x. Exact (0/1) when x hits a node.
/// out must hold nodes.size() values.
void lagrange_values(std::span<const double> nodes, std::span<const double> bary,
                     double x, double* out);

/// Differentiation matrix D(j,i) = phi_i'(nodes[j]).
Eigen::MatrixXd lagrange_diff_matrix(std::span<const double> nodes,
                                     std::span<const double> bary);

}  // namespace evomem
