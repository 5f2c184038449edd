#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evomem/kernel.hpp"
#include "evomem/space_fem.hpp"
#include "evomem/time_mesh.hpp"

namespace evomem {

/// Per-interval temporal Lagrange data at the Radau nodes: differentiation
/// matrix D(j,i) = phi_i'(t_j) and left limits l_i = phi_i(t_{m-1}+).
struct LagrangeData {
  std::vector<double> nodes;
  std::vector<double> bary;
  Eigen::MatrixXd diff;
  Eigen::VectorXd left_values;
};

LagrangeData make_lagrange_data(const MappedRule& rule);

/// Evolutionary problem (dt M0 + M1 + A + T_K) U = F, U(0) = x0, posed on
/// [0,T] x (0,1) with n components in P_k Lagrange spaces.
struct Problem {
  int n = 2;
  Eigen::MatrixXd M0, M1;
  KernelSpec kernel;
  double gamma = 1.0;
  double T = 2.0;
  std::vector<BoundaryCondition> bcs;
  bool gradient_coupling = true;

  enum class SourceMode { direct, manufactured };
  SourceMode source_mode = SourceMode::direct;

  /// Direct source F(t, x) (used when source_mode == direct).
  std::function<void(double t, double x, double* out)> F;
  /// Initial state x0(x).
  std::function<void(double x, double* out)> x0;

  /// Manufactured data: the source is assembled as
  /// dt U_ex + M1 U_ex + A U_ex + T_K U_ex with the memory part integrated
  /// adaptively, so any kernel admits exact-solution experiments.
  std::function<void(double t, double x, double* out)> exact;
  std::function<void(double t, double x, double* out)> exact_dt;
  std::function<void(double t, double x, double* out)> exact_dx;

  bool has_exact() const { return static_cast<bool>(exact); }

  static Problem zero_problem(int n = 2);
};

struct SolveOptions {
  double quad_tol = 1e-12;
  HistoryQuadMode history = HistoryQuadMode::automatic;
  bool reformulated = false;       // solve the rho-scaled system with unweighted rules
  bool check_coercivity = true;    // warn (not abort) when ||K||_Q > gamma/2
  int coercivity_s_grid = 256;
};

/// Piecewise polynomial space-time solution: spatial dof vectors per interval
/// and Radau node. In reformulated mode the coefficients belong to the scaled
/// variable V = e^{-rho t} U and eval() maps back.
struct DiscreteSolution {
  TimeMesh mesh;
  std::shared_ptr<const BlockSystem> system;
  std::vector<std::vector<Eigen::VectorXd>> coeffs;  // [m-1][i]
  Eigen::VectorXd x0_dofs;
  std::vector<LagrangeData> lag;
  bool reformulated = false;
  bool quad_flag = false;  // a quadrature tolerance was not met somewhere
  std::vector<std::string> warnings;

  int n_components() const { return system->n; }
  /// U at (t, x); t = 0 returns the interpolated initial state. Writes
  /// n_components values. Throws on out-of-range arguments.
  void eval(double t, double x, double* out) const;
  Eigen::VectorXd eval_vec(double t, double x) const;
  /// Nodal value of U at node i of interval m (1-based m), as a dof vector.
  Eigen::VectorXd nodal_u(int m, int i) const;
};

/// Assembled per-solve state; exposed so the per-interval operations below
/// can be unit-tested against hand computations.
struct DgContext {
  const BlockSystem* sys = nullptr;
  TimeMesh mesh;
  std::vector<MappedRule> rules;
  std::vector<LagrangeData> lag;
  const KernelSpec* kernel = nullptr;  // effective kernel; nullptr means zero
  HistoryQuadMode hist_mode = HistoryQuadMode::automatic;
  double quad_tol = 1e-12;
  bool reuse_matrix = false;  // uniform mesh and translation-invariant kernel
  std::function<void(double t, double x, double* out)> source;
  int source_quad_pts = 2;

  mutable std::map<long long, std::vector<Eigen::MatrixXd>> moment_cache;
  mutable std::vector<Eigen::MatrixXd> moment_scratch;  // non-cached path
  mutable std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> shared_lu;
  mutable bool quad_flag = false;

  /// Kernel moments of source interval n against target node j of interval m.
  const std::vector<Eigen::MatrixXd>& moments(int n, int m, int j) const;
};

DgContext make_context(const BlockSystem& sys, const TimeMesh& mesh,
                       const KernelSpec* kernel,
                       std::function<void(double, double, double*)> source,
                       const SolveOptions& opts = {});

/// Local system of interval m: block (j,i) =
///   hat w_j D(j,i) M0h + l_j l_i M0h + hat w_j delta_ij (M1h + Ah)
///   + hat w_j [J_m moments through the cross mass blocks]_i.
Eigen::MatrixXd local_matrix(const DgContext& ctx, int m);

/// Accumulated memory right-hand side -sum_{n<m} Q_m[J_n U_n, Phi].
Eigen::VectorXd history_rhs(const DgContext& ctx, int m,
                            const std::vector<std::vector<Eigen::VectorXd>>& coeffs);

/// Source and jump contributions of interval m.
Eigen::VectorXd source_rhs(const DgContext& ctx, int m);
Eigen::VectorXd jump_rhs(const DgContext& ctx, int m,
                         const Eigen::Ref<const Eigen::VectorXd>& prev_dofs);

/// One dG step: solves the local system for the q+1 nodal dof vectors.
std::vector<Eigen::VectorXd> step(DgContext& ctx, int m,
                                  const std::vector<std::vector<Eigen::VectorXd>>& coeffs,
                                  const Eigen::Ref<const Eigen::VectorXd>& prev_dofs);

/// Full solve over the time mesh. space mesh and degree k determine the
/// conforming spatial spaces. Throws with the failing interval index on
/// factorization problems.
DiscreteSolution solve(const Problem& problem, const TimeMesh& mesh,
                       const SpaceMesh1D& space_mesh, int k,
                       const SolveOptions& opts = {});

/// Same, with a pre-assembled block system (shared across refinement runs).
DiscreteSolution solve(const Problem& problem, const TimeMesh& mesh,
                       std::shared_ptr<const BlockSystem> system,
                       const SolveOptions& opts = {});

}  // namespace evomem
