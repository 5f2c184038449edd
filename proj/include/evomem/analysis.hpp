#pragma once

#include <functional>
#include <string>
#include <vector>

#include "evomem/dg_solver.hpp"

namespace evomem {

/// E_sup: sup-in-time M0-weighted spatial L2 norm of the error, sampled at
/// the refined Radau nodes plus interval endpoints (a lower bound of the true
/// sup). e_l2rho: exponentially weighted space-time L2 norm via refined
/// quadrature.
struct ErrorPair {
  double e_sup = 0;
  double e_l2rho = 0;
};

using SpaceTimeFn = std::function<void(double t, double x, double* out)>;

/// Error norms against an exact (or reference) solution. The time quadrature
/// is a weighted Radau rule of degree q + refine, the space quadrature
/// Gauss-Legendre with k + refine points per cell.
ErrorPair error_norms(const DiscreteSolution& sol, const SpaceTimeFn& exact,
                      int refine = 3);

/// Native quadrature norm ||U||_{Q,rho} of a discrete solution, exact for the
/// piecewise polynomials (spatial integrals through the mass blocks).
double discrete_qnorm(const DiscreteSolution& sol);

/// rates[i] = log2(errors[i] / errors[i+1]) for meshes doubled per level.
/// Rejects non-positive error values.
std::vector<double> eoc(const std::vector<double>& errors);

struct ConvergenceReport {
  int k = 0, q = 0;
  struct Row {
    int N = 0, M = 0;
    double e_sup = 0, rate_sup = 0;
    double e_l2rho = 0, rate_l2 = 0;
    bool has_rate = false;
  };
  std::vector<Row> rows;
  std::vector<std::string> warnings;
};

enum class ErrorMode { exact, reference };

/// Convergence run over N = M levels. exact mode measures against the
/// problem's exact solution; reference mode builds a reference solution on a
/// mesh with twice the finest cell count and degrees (k+1, q+1) and measures
/// everything against it (an imperfect substitute; a warning is attached).
ConvergenceReport run_convergence(const Problem& problem, int k, int q,
                                  const std::vector<int>& levels, ErrorMode mode,
                                  double rho, const SolveOptions& opts = {},
                                  int refine = 3);

}  // namespace evomem
