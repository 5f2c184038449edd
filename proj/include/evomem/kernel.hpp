#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "evomem/quadrature.hpp"
#include "evomem/time_mesh.hpp"

namespace evomem {

/// One scalar entry of a matrix-valued memory kernel K(t,s), defined on
/// s <= t. power entries c (t-s)^{-alpha} are weakly singular at s = t.
struct KernelEntry {
  enum class Type { zero, smooth, power, poly_conv };
  Type type = Type::zero;
  std::function<double(double t, double s)> fn;  // smooth
  /// Distance-aware override f(t, s, w) with w = t - s supplied exactly;
  /// singular entries must evaluate through w (near s = t the difference
  /// t - s is not resolvable from s alone).
  std::function<double(double t, double s, double w)> fn_dist;
  std::function<double(double)> conv;            // poly_conv: g(t - s)
  double coeff = 0.0, alpha = 0.0;               // power
  SingularityHint hint = SingularityHint::none();
  bool translation_invariant = true;

  double eval(double t, double s) const { return eval_dist(t, s, t - s); }
  double eval_dist(double t, double s, double w) const;
  bool is_zero() const { return type == Type::zero; }
  bool singular() const { return hint.singular(); }

  static KernelEntry zero();
  static KernelEntry smooth(std::function<double(double, double)> fn,
                            bool translation_invariant = false);
  static KernelEntry power(double c, double alpha);
  static KernelEntry poly_conv(std::function<double(double)> g);
};

/// Matrix-valued memory kernel with per-entry singularity classification.
struct KernelSpec {
  int n = 0;
  std::vector<KernelEntry> entries;  // n*n, row-major

  const KernelEntry& entry(int a, int b) const { return entries[a * n + b]; }
  KernelEntry& entry(int a, int b) { return entries[a * n + b]; }
  bool is_zero() const;
  bool has_singular() const;
  bool translation_invariant() const;

  static KernelSpec zero(int n);
  static KernelSpec scalar_const(double c);
  static KernelSpec scalar_power(double c, double alpha);
  /// Smooth 2x2 kernel ((t-s, s), (t, (t-s)^2)).
  static KernelSpec example1();
  /// Weakly singular diag((t-s)^{-3/4}, (t-s)^{-1/2}).
  static KernelSpec example2();
  /// Name-based lookup: zero | example1 | example2_3 | const:c | power:c:alpha.
  static KernelSpec named(const std::string& name);
};

/// Entry-wise evaluation. Throws std::domain_error when s >= t hits a
/// singular entry.
Eigen::MatrixXd eval_kernel(const KernelSpec& K, double t, double s);

/// (T_K f)(t) = int_0^t K(t,s) f(s) ds by adaptive per-column quadrature with
/// each column's strongest singularity hint. converged (if given) reports the
/// propagated tolerance flag.
Eigen::VectorXd apply_Tk(const KernelSpec& K,
                         const std::function<void(double t, double* out)>& f, double t,
                         double tol, bool* converged = nullptr);

enum class HistoryQuadMode {
  automatic,    // fixed Gauss for smooth entries, adaptive for singular ones
  fixed_gauss,  // (q+1)-point Gauss-Legendre for everything
  adaptive      // adaptive quadrature for everything
};

/// Lagrange-basis moments of the kernel over a source interval:
///   G_i = int_{t_left}^{min(t_star, t_right)} K(t_star, s) phi_i(s) ds,
/// phi_i the Lagrange basis on `nodes` (the interval's Radau points). The
/// endpoint singularity is active only when the upper limit is t_star itself.
std::vector<Eigen::MatrixXd> history_moments(const KernelSpec& K, double t_left,
                                             double t_right,
                                             std::span<const double> nodes,
                                             double t_star, double tol,
                                             HistoryQuadMode mode,
                                             bool* converged = nullptr);

/// ||K||_{1,rho,unif} on the window [0,T]^2: max of
///   sup_t int_0^t |K(t,s)| e^{-rho(t-s)} ds  and
///   sup_s int_s^T |K(t,s)| e^{-rho(t-s)} dt,
/// sups over uniform grids (a lower bound of the esssup), matrix entries
/// reduced by max over entries of the scalar norms.
double norm_continuous(const KernelSpec& K, double rho, double T, int t_grid = 512,
                       int s_grid = 512, double tol = 1e-10);

/// Semi-discrete norm ||K||_{Q,1,rho,unif}: the continuous first term and the
/// quadrature second term
///   sup_s sum_m e^{-2 rho t_{m-1}} Q_m[ 1_{[s,t_m]} |K(.,s)| e^{rho(.+s)} ].
/// Computed in the exponent-combined form sum W_i |K(t_i,s)| e^{-rho(t_i-s)}
/// so large rho stays inside the double range. The s-grid is uniform plus all
/// mesh points and quadrature nodes. For singular entries the interval
/// containing s is integrated continuously (node sampling of the blow-up
/// diverges as s approaches a node and carries no information); the sup over
/// any grid remains a lower bound of the esssup, which is unbounded there.
double norm_discrete(const KernelSpec& K, const TimeMesh& mesh,
                     std::span<const MappedRule> rules, double rho, int s_grid = 512,
                     double tol = 1e-10);

/// Uniform mesh for rho sweeps of the semi-discrete norm: at least M cells,
/// refined so that a = rho tau stays <= 2 (the weighted rule must resolve the
/// exponential for the quadrature term to be meaningful).
TimeMesh norm_sweep_mesh(double T, int M_base, double rho, int q);

/// Smallest candidate rho with ||K||_{Q,1,rho,unif} <= gamma/2, scanning a
/// sorted candidate list (no root finding; discrete-norm monotonicity in rho
/// is unproven). Rules are rebuilt per candidate on the sweep mesh.
std::optional<double> rho_threshold(const KernelSpec& K, double gamma, double T, int M,
                                    int q, std::span<const double> candidates);

/// Well-posedness diagnostics for one rho.
struct KernelNormReport {
  double rho = 0;
  double continuous_norm = 0;
  double discrete_norm = 0;
  int t_grid_size = 0, s_grid_size = 0;
  double gamma = 0;
  bool satisfied = false;  // discrete_norm <= gamma/2
};

KernelNormReport kernel_norm_report(const KernelSpec& K, double rho, double gamma,
                                    double T, int M, int q, int t_grid = 512,
                                    int s_grid = 512);

}  // namespace evomem
