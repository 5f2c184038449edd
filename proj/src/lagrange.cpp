#include "evomem/lagrange.hpp"

#include <cmath>
#include <stdexcept>

namespace evomem {

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  const int n = static_cast<int>(nodes.size());
  std::vector<double> b(n, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      b[i] /= (nodes[i] - nodes[j]);
    }
    if (!std::isfinite(b[i])) throw std::invalid_argument("barycentric_weights: coincident nodes");
  }
  return b;
}

void lagrange_values(std::span<const double> nodes, std::span<const double> bary,
                     double x, double* out) {
  const int n = static_cast<int>(nodes.size());
  if (n == 1) {
    out[0] = 1.0;
    return;
  }
  for (int i = 0; i < n; ++i) {
    if (x == nodes[i]) {
      for (int j = 0; j < n; ++j) out[j] = (j == i) ? 1.0 : 0.0;
      return;
    }
  }
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = bary[i] / (x - nodes[i]);
    denom += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= denom;
}

Eigen::MatrixXd lagrange_diff_matrix(std::span<const double> nodes,
                                     std::span<const double> bary) {
  const int n = static_cast<int>(nodes.size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double diag = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      D(j, i) = (bary[i] / bary[j]) / (nodes[j] - nodes[i]);
      diag -= D(j, i);
    }
    D(j, j) = diag;  // rows of D annihilate constants
  }
  return D;
}

}  // namespace evomem
