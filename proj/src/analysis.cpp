#include "evomem/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "evomem/lagrange.hpp"

namespace evomem {

namespace {

// Spatial L2 norm^2 of the error at time t with (k+refine)-point Gauss per
// cell: plain in plain_sq, M0-weighted in m0_sq.
void spatial_error_sq(const DiscreteSolution& sol, const SpaceTimeFn& exact, double t,
                      int n_quad, double& plain_sq, double& m0_sq) {
  const BlockSystem& sys = *sol.system;
  const int n = sys.n;
  const SpaceMesh1D& mesh = sys.spaces[0].mesh();
  const GaussRule& gr = gauss_legendre(n_quad);
  std::vector<double> uh(n), ue(n), e(n);
  plain_sq = 0.0;
  m0_sq = 0.0;
  for (int c = 0; c < mesh.N; ++c) {
    const double xl = mesh.cell_left(c), h = mesh.cell_width(c);
    for (int g = 0; g < n_quad; ++g) {
      const double x = xl + 0.5 * h * (gr.nodes[g] + 1.0);
      const double w = 0.5 * h * gr.weights[g];
      sol.eval(t, x, uh.data());
      exact(t, x, ue.data());
      double p = 0.0, m0 = 0.0;
      for (int a = 0; a < n; ++a) {
        e[a] = uh[a] - ue[a];
        p += e[a] * e[a];
      }
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) m0 += sys.M0(a, b) * e[a] * e[b];
      plain_sq += w * p;
      m0_sq += w * m0;
    }
  }
}

}  // namespace

ErrorPair error_norms(const DiscreteSolution& sol, const SpaceTimeFn& exact, int refine) {
  const TimeMesh& mesh = sol.mesh;
  const int k = sol.system->spaces[0].degree();
  const int q_ref = mesh.q + refine;
  const int nq_space = k + refine;

  ErrorPair err;
  double l2_acc = 0.0;
  double p2, m2;
  spatial_error_sq(sol, exact, 0.0, nq_space, p2, m2);
  double sup_sq = m2;
  for (int m = 1; m <= mesh.M; ++m) {
    MappedRule rule =
        make_mapped_rule(q_ref, mesh.points[m - 1], mesh.points[m], mesh.rho);
    const double damp = std::exp(-2.0 * mesh.rho * mesh.points[m - 1]);
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
      spatial_error_sq(sol, exact, rule.nodes[i], nq_space, p2, m2);
      l2_acc += damp * rule.weights[i] * p2;
      sup_sq = std::max(sup_sq, m2);
    }
  }
  err.e_l2rho = std::sqrt(l2_acc);
  err.e_sup = std::sqrt(sup_sq);
  return err;
}

double discrete_qnorm(const DiscreteSolution& sol) {
  const TimeMesh& mesh = sol.mesh;
  const BlockSystem& sys = *sol.system;
  if (sol.reformulated)
    throw std::invalid_argument("discrete_qnorm: native norm needs the weighted form");
  auto rules = mesh_rules(mesh, mesh.rho);
  double acc = 0.0;
  for (int m = 1; m <= mesh.M; ++m) {
    const double damp = std::exp(-2.0 * mesh.rho * mesh.points[m - 1]);
    for (size_t i = 0; i < rules[m - 1].nodes.size(); ++i) {
      const Eigen::VectorXd& c = sol.coeffs[m - 1][i];
      double h_sq = 0.0;  // sum_a int u_a^2 via the (a,a) mass blocks
      for (int a = 0; a < sys.n; ++a) {
        Eigen::VectorXd tmp = Eigen::VectorXd::Zero(sys.spaces[a].n_dofs());
        sys.cross_mass(a, a).apply_add(c.data() + sys.offsets[a], tmp.data(), 1.0);
        h_sq += tmp.dot(c.segment(sys.offsets[a], sys.spaces[a].n_dofs()));
      }
      acc += damp * rules[m - 1].weights[i] * h_sq;
    }
  }
  return std::sqrt(acc);
}

std::vector<double> eoc(const std::vector<double>& errors) {
  std::vector<double> rates;
  for (double e : errors)
    if (!(e > 0.0)) throw std::invalid_argument("eoc: errors must be positive");
  for (size_t i = 0; i + 1 < errors.size(); ++i)
    rates.push_back(std::log2(errors[i] / errors[i + 1]));
  return rates;
}

ConvergenceReport run_convergence(const Problem& problem, int k, int q,
                                  const std::vector<int>& levels, ErrorMode mode,
                                  double rho, const SolveOptions& opts, int refine) {
  if (levels.empty()) throw std::invalid_argument("run_convergence: empty level list");
  ConvergenceReport rep;
  rep.k = k;
  rep.q = q;

  // Reference solution: twice the finest cell count, one degree higher in
  // space and time.
  DiscreteSolution reference;
  SpaceTimeFn target;
  if (mode == ErrorMode::reference) {
    const int n_ref = 2 * levels.back();
    TimeMesh tmesh = TimeMesh::uniform(problem.T, n_ref, rho, q + 1);
    SpaceMesh1D smesh = SpaceMesh1D::uniform(n_ref);
    SolveOptions ref_opts = opts;
    ref_opts.check_coercivity = false;
    reference = solve(problem, tmesh, smesh, k + 1, ref_opts);
    target = [&reference](double t, double x, double* out) { reference.eval(t, x, out); };
    rep.warnings.push_back(
        "errors measured against a reference solution (2x cells, degrees k+1/q+1); "
        "an imperfect substitute for the unknown exact solution");
  } else {
    if (!problem.has_exact())
      throw std::invalid_argument("run_convergence: problem has no exact solution");
    target = problem.exact;
  }

  SolveOptions level_opts = opts;
  for (size_t l = 0; l < levels.size(); ++l) {
    const int N = levels[l];
    TimeMesh tmesh = TimeMesh::uniform(problem.T, N, rho, q);
    SpaceMesh1D smesh = SpaceMesh1D::uniform(N);
    DiscreteSolution sol = solve(problem, tmesh, smesh, k, level_opts);
    level_opts.check_coercivity = false;  // one warning per run is enough
    for (const auto& w : sol.warnings) rep.warnings.push_back(w);
    ErrorPair err = error_norms(sol, target, refine);
    ConvergenceReport::Row row;
    row.N = N;
    row.M = N;
    row.e_sup = err.e_sup;
    row.e_l2rho = err.e_l2rho;
    if (l > 0) {
      const auto& prev = rep.rows.back();
      if (prev.e_sup > 0 && err.e_sup > 0) row.rate_sup = std::log2(prev.e_sup / err.e_sup);
      if (prev.e_l2rho > 0 && err.e_l2rho > 0)
        row.rate_l2 = std::log2(prev.e_l2rho / err.e_l2rho);
      row.has_rate = true;
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace evomem
