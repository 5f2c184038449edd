#pragma once

#include <vector>

#include "evomem/quadrature.hpp"

namespace evomem {

/// Temporal partition 0 = t_0 < ... < t_M = T with the weight parameter rho
/// and the temporal polynomial degree q of the discretization.
struct TimeMesh {
  double T = 0;
  int M = 0;
  std::vector<double> points;
  double rho = 0;
  int q = 0;

  static TimeMesh uniform(double T, int M, double rho, int q);
  static TimeMesh from_points(std::vector<double> pts, double rho, int q);

  double tau(int m) const { return points[m] - points[m - 1]; }  // m in 1..M
  bool is_uniform() const;
  /// Interval m with t in (t_{m-1}, t_m]; t == 0 maps to m = 1.
  int locate(double t) const;
};

/// Weighted Radau rules for every interval (shared cache makes this cheap on
/// uniform meshes). rho_rule may differ from mesh.rho (the unweighted
/// reformulation uses rho_rule = 0).
std::vector<MappedRule> mesh_rules(const TimeMesh& mesh, double rho_rule);

}  // namespace evomem
