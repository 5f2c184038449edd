#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace evomem {

/// Gauss-Legendre rule on [-1,1], exact for polynomials of degree 2n-1.
struct GaussRule {
  int n = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Returns the cached n-point Gauss-Legendre rule. Thread-safe.
const GaussRule& gauss_legendre(int n);

/// Moments mu_j(a) = int_{-1}^{1} s^j exp(-a(s+1)) ds.
///
/// Closed form: mu_0 = (1 - e^{-2a})/a and, by integration by parts,
/// mu_j = (j mu_{j-1} - e^{-2a} + (-1)^j)/a. The forward recurrence amplifies
/// roundoff by j!/a^j, so for a < 12 a power series in a is used instead;
/// everything runs in long double.
double weighted_moments(int j, double a);

/// Right-sided Gauss-Radau rule on (-1,1] for the weight exp(-a(s+1)):
///   sum_i weights[i] p(nodes[i]) = int_{-1}^{1} exp(-a(s+1)) p(s) ds
/// for all polynomials of degree <= 2q. nodes.back() == 1 exactly.
struct RadauRule {
  int q = 0;      // polynomial degree, q+1 nodes
  double a = 0;   // weight decay parameter
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Builds (and caches) the weighted Gauss-Radau rule for (q, a).
///
/// Recurrence coefficients of the orthogonal polynomials come from a
/// Stieltjes procedure discretized on a 256-point Gauss-Legendre rule in
/// long double; the node at +1 is pinned by modifying the last diagonal of
/// the Jacobi matrix, and nodes/weights follow from its symmetric
/// tridiagonal eigendecomposition.
///
/// Throws std::domain_error when the orthogonalization loses positivity
/// (a too large for the floating point format) or the arguments are out of
/// the supported range (q <= 12, 0 <= a <= 200).
const RadauRule& build_radau(int q, double a);

/// Radau rule mapped to a time interval (t_left, t_right].
///
/// weights[i] integrate exp(-2 rho (t - t_left)) p(t) over the interval
/// exactly for deg p <= 2q; plain_weights[i] = weights[i] *
/// exp(2 rho (nodes[i] - t_left)) carry the same nodes with the exponential
/// divided out, which keeps norm evaluations for large rho inside the double
/// range.
struct MappedRule {
  double t_left = 0, t_right = 0;
  double rho = 0;
  int q = 0;
  std::vector<double> nodes;          // in (t_left, t_right], last == t_right
  std::vector<double> weights;        // hat w_i
  std::vector<double> plain_weights;  // W_i
  double tau() const { return t_right - t_left; }
};

/// Affine map of a reference rule onto (t_left, t_right]. The rule must have
/// been built with a = rho * (t_right - t_left); a mismatch is a caller bug
/// and throws std::logic_error.
MappedRule map_rule(const RadauRule& rule, double t_left, double t_right, double rho);

/// Convenience: build + map in one go (hits the rule cache).
MappedRule make_mapped_rule(int q, double t_left, double t_right, double rho);

/// Integrand classification for adaptive quadrature. endpoint_power marks an
/// integrable singularity (b - s)^{-alpha}, 0 <= alpha < 1, at the upper
/// endpoint b.
struct SingularityHint {
  enum class Kind { smooth, endpoint_power };
  Kind kind = Kind::smooth;
  double alpha = 0.0;

  static SingularityHint none() { return {}; }
  static SingularityHint power(double alpha);
  bool singular() const { return kind == Kind::endpoint_power && alpha > 0.0; }
};

struct IntegrationResult {
  Eigen::VectorXd value;
  double error = 0.0;  // estimated absolute error (max over components)
  bool converged = true;
};

/// Vector-valued integrand f(s, w, out): w is the distance b - s to the upper
/// integration endpoint. Through the singular substitution w is computed
/// exactly (s alone cannot resolve distances below ulp(b)), so integrands
/// must form their (b - s)^{-alpha} factors from w, never from b - s.
using VectorIntegrand = std::function<void(double s, double w, double* out)>;

/// Adaptive quadrature of f over [a, b] to absolute tolerance tol
/// (component-wise), using a nested 15/7-point Gauss-Kronrod pair over an
/// interval heap. For endpoint_power hints the substitution
/// s = b - u^{1/(1-alpha)} removes the singularity before subdivision.
/// On tolerance failure the best estimate is returned with converged=false.
IntegrationResult adaptive_integrate(const VectorIntegrand& f, int dim, double a,
                                     double b, double tol,
                                     SingularityHint hint = SingularityHint::none());

/// Scalar wrappers; the first ignores the endpoint distance.
double adaptive_integrate_scalar(const std::function<double(double)>& f, double a,
                                 double b, double tol,
                                 SingularityHint hint = SingularityHint::none(),
                                 bool* converged = nullptr);
double adaptive_integrate_scalar_w(const std::function<double(double, double)>& f,
                                   double a, double b, double tol,
                                   SingularityHint hint = SingularityHint::none(),
                                   bool* converged = nullptr);

}  // namespace evomem
