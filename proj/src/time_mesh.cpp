#include "evomem/time_mesh.hpp"

#include <algorithm>
#include <stdexcept>

namespace evomem {

TimeMesh TimeMesh::uniform(double T, int M, double rho, int q) {
  if (!(T > 0) || M < 1 || q < 0 || !(rho >= 0))
    throw std::invalid_argument("TimeMesh::uniform: invalid parameters");
  TimeMesh mesh;
  mesh.T = T;
  mesh.M = M;
  mesh.rho = rho;
  mesh.q = q;
  mesh.points.resize(M + 1);
  const double tau = T / M;
  for (int m = 0; m <= M; ++m) mesh.points[m] = m * tau;
  mesh.points[M] = T;
  return mesh;
}

TimeMesh TimeMesh::from_points(std::vector<double> pts, double rho, int q) {
  if (pts.size() < 2 || pts.front() != 0.0)
    throw std::invalid_argument("TimeMesh: points must start at 0");
  for (size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i] > pts[i - 1]))
      throw std::invalid_argument("TimeMesh: points must be strictly increasing");
  TimeMesh mesh;
  mesh.M = static_cast<int>(pts.size()) - 1;
  mesh.T = pts.back();
  mesh.rho = rho;
  mesh.q = q;
  mesh.points = std::move(pts);
  return mesh;
}

bool TimeMesh::is_uniform() const {
  const double tau1 = tau(1);
  for (int m = 2; m <= M; ++m)
    if (tau(m) != tau1) return false;
  return true;
}

int TimeMesh::locate(double t) const {
  if (t < 0.0 || t > T) throw std::out_of_range("TimeMesh::locate: t outside [0,T]");
  if (t == 0.0) return 1;
  auto it = std::lower_bound(points.begin(), points.end(), t);
  int m = static_cast<int>(it - points.begin());
  if (m < 1) m = 1;
  return m;
}

std::vector<MappedRule> mesh_rules(const TimeMesh& mesh, double rho_rule) {
  std::vector<MappedRule> rules;
  rules.reserve(mesh.M);
  for (int m = 1; m <= mesh.M; ++m)
    rules.push_back(make_mapped_rule(mesh.q, mesh.points[m - 1], mesh.points[m], rho_rule));
  return rules;
}

}  // namespace evomem
