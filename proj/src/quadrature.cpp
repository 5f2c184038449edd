#include "evomem/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>

namespace evomem {

namespace {

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.

std::vector<long double> legendre_nodes_ld(int n) {
  std::vector<long double> x(n);
  const long double pi = 3.14159265358979323846264338327950288L;
  for (int k = 0; k < n; ++k) {
    // Tricomi-style initial guess, then Newton.
    long double xi = std::cos(pi * (k + 0.75L) / (n + 0.5L));
    for (int it = 0; it < 100; ++it) {
      long double p0 = 1.0L, p1 = xi;
      for (int j = 2; j <= n; ++j) {
        long double p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      long double dp = n * (xi * p1 - p0) / (xi * xi - 1.0L);
      long double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    x[k] = xi;
  }
  std::sort(x.begin(), x.end());
  return x;
}

struct GaussRuleLd {
  std::vector<long double> nodes, weights;
};

GaussRuleLd gauss_legendre_ld(int n) {
  GaussRuleLd r;
  r.nodes = legendre_nodes_ld(n);
  r.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const long double xi = r.nodes[k];
    long double p0 = 1.0L, p1 = xi;
    for (int j = 2; j <= n; ++j) {
      long double p2 = ((2 * j - 1) * xi * p1 - (j - 1) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    long double dp = n * (xi * p1 - p0) / (xi * xi - 1.0L);
    r.weights[k] = 2.0L / ((1.0L - xi * xi) * dp * dp);
  }
  return r;
}

std::shared_mutex g_gauss_mutex;
std::map<int, std::unique_ptr<GaussRule>> g_gauss_cache;

// ---------------------------------------------------------------------------
// Weighted moments, long double internals.

long double moments_series_ld(int j, long double a) {
  // mu_j(a) = e^{-a} sum_p (-a)^p / p! * (1 + (-1)^{j+p}) / (j+p+1)
  long double term = 1.0L;  // (-a)^p / p!
  long double sum = 0.0L;
  for (int p = 0; p < 400; ++p) {
    if (p > 0) term *= -a / p;
    const int par = ((j + p) % 2 == 0) ? 2 : 0;
    if (par != 0) sum += term * par / (j + p + 1);
    if (std::abs(term) < 1e-24L * (std::abs(sum) + 1e-30L) && p > j + 4) break;
  }
  return std::exp(-a) * sum;
}

long double weighted_moment_ld(int j, long double a) {
  if (j < 0) throw std::invalid_argument("weighted_moments: j must be >= 0");
  if (a < 12.0L) {
    return moments_series_ld(j, a);
  }
  // Forward recurrence; stable here since j/a stays moderate for a >= 12.
  const long double e2a = std::exp(-2.0L * a);
  long double mu = (1.0L - e2a) / a;
  for (int i = 1; i <= j; ++i) {
    const long double sgn = (i % 2 == 0) ? 1.0L : -1.0L;
    mu = (i * mu - e2a + sgn) / a;
  }
  return mu;
}

// ---------------------------------------------------------------------------
// Radau construction: discretized Stieltjes + Jacobi matrix modification.

struct Recurrence {
  std::vector<long double> alpha, beta;  // monic three-term coefficients
};

// Recurrence coefficients of the monic polynomials orthogonal with respect
// to exp(-a(s+1)) ds on (-1,1), via Stieltjes orthogonalization against a
// fixed high-order Gauss-Legendre discretization.
Recurrence stieltjes_coeffs(int n, long double a, int q_report, double a_report) {
  static const GaussRuleLd disc = gauss_legendre_ld(256);
  const int m = static_cast<int>(disc.nodes.size());
  std::vector<long double> w(m);
  for (int g = 0; g < m; ++g) w[g] = disc.weights[g] * std::exp(-a * (disc.nodes[g] + 1.0L));

  Recurrence rec;
  rec.alpha.resize(n);
  rec.beta.resize(n);
  std::vector<long double> pim1(m, 0.0L), pi(m, 1.0L);
  long double norm_prev = 0.0L;
  for (int k = 0; k < n; ++k) {
    long double s0 = 0.0L, s1 = 0.0L;
    for (int g = 0; g < m; ++g) {
      const long double wp2 = w[g] * pi[g] * pi[g];
      s0 += wp2;
      s1 += wp2 * disc.nodes[g];
    }
    if (!(s0 > 0.0L) || !std::isfinite((double)s0)) {
      std::ostringstream os;
      os << "build_radau: orthogonalization lost positivity at degree " << k
         << " (q=" << q_report << ", a=" << a_report << ")";
      throw std::domain_error(os.str());
    }
    rec.alpha[k] = s1 / s0;
    rec.beta[k] = (k == 0) ? s0 : s0 / norm_prev;
    norm_prev = s0;
    // advance pi_{k+1} = (x - alpha_k) pi_k - beta_k pi_{k-1}
    for (int g = 0; g < m; ++g) {
      const long double next =
          (disc.nodes[g] - rec.alpha[k]) * pi[g] - (k == 0 ? 0.0L : rec.beta[k] * pim1[g]);
      pim1[g] = pi[g];
      pi[g] = next;
    }
  }
  return rec;
}

std::unique_ptr<RadauRule> compute_radau(int q, double a) {
  if (q < 0 || q > 12)
    throw std::domain_error("build_radau: q out of supported range [0,12]");
  if (!(a >= 0.0) || a > 200.0)
    throw std::domain_error("build_radau: weight parameter a out of supported range [0,200]");

  const int n = q + 1;
  const long double al = static_cast<long double>(a);
  // Need alpha_0..alpha_q, beta_0..beta_q for the Radau-modified Jacobi matrix.
  Recurrence rec = stieltjes_coeffs(n + 1, al, q, a);

  // Monic pi_{q-1}(1), pi_q(1) for the endpoint modification
  // alpha*_q = 1 - beta_q pi_{q-1}(1) / pi_q(1).
  long double p0 = 0.0L, p1 = 1.0L;  // pi_{-1}, pi_0
  for (int k = 0; k < q; ++k) {
    const long double p2 = (1.0L - rec.alpha[k]) * p1 - (k == 0 ? 0.0L : rec.beta[k]) * p0;
    p0 = p1;
    p1 = p2;
  }
  long double alpha_star = 1.0L;
  if (q >= 1) {
    if (p1 == 0.0L) throw std::domain_error("build_radau: degenerate endpoint modification");
    alpha_star = 1.0L - rec.beta[q] * p0 / p1;
  }

  using MatLd = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatLd J = MatLd::Zero(n, n);
  for (int k = 0; k < q; ++k) J(k, k) = rec.alpha[k];
  J(q, q) = alpha_star;
  for (int k = 1; k <= q; ++k) {
    if (!(rec.beta[k] > 0.0L)) {
      std::ostringstream os;
      os << "build_radau: nonpositive recurrence coefficient beta_" << k << " (q=" << q
         << ", a=" << a << ")";
      throw std::domain_error(os.str());
    }
    const long double off = std::sqrt(rec.beta[k]);
    J(k, k - 1) = off;
    J(k - 1, k) = off;
  }

  Eigen::SelfAdjointEigenSolver<MatLd> eig(J);
  if (eig.info() != Eigen::Success)
    throw std::domain_error("build_radau: tridiagonal eigensolve failed");

  auto rule = std::make_unique<RadauRule>();
  rule->q = q;
  rule->a = a;
  rule->nodes.resize(n);
  rule->weights.resize(n);
  const long double beta0 = rec.beta[0];
  for (int i = 0; i < n; ++i) {
    rule->nodes[i] = static_cast<double>(eig.eigenvalues()(i));
    const long double v0 = eig.eigenvectors()(0, i);
    rule->weights[i] = static_cast<double>(beta0 * v0 * v0);
  }
  // Eigenvalues come out ascending; the largest is the pinned endpoint.
  if (std::abs(rule->nodes[n - 1] - 1.0) > 1e-9)
    throw std::domain_error("build_radau: endpoint node failed to lock onto +1");
  rule->nodes[n - 1] = 1.0;
  for (int i = 0; i < n; ++i) {
    if (!(rule->weights[i] > 0.0)) {
      std::ostringstream os;
      os << "build_radau: nonpositive weight (q=" << q << ", a=" << a << ")";
      throw std::domain_error(os.str());
    }
    if (i > 0 && !(rule->nodes[i] > rule->nodes[i - 1]))
      throw std::domain_error("build_radau: nodes not strictly increasing");
  }
  if (!(rule->nodes[0] > -1.0))
    throw std::domain_error("build_radau: node left of the reference interval");
  return rule;
}

std::shared_mutex g_radau_mutex;
std::map<std::pair<int, double>, std::unique_ptr<RadauRule>> g_radau_cache;

// ---------------------------------------------------------------------------
// Gauss-Kronrod 15/7 pair on [-1,1].

constexpr int kGkHalf = 8;  // abscissae for the positive half (incl. 0)
constexpr double kXgk[kGkHalf] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[kGkHalf] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  std::vector<double> value;  // Kronrod estimate per component
  double err;                 // max-component |K - G|
};

struct SegCompare {
  bool operator()(const Segment& x, const Segment& y) const { return x.err < y.err; }
};

// Odd indices of kXgk (1,3,5,7) are the 7-point Gauss abscissae; the center
// belongs to both rules. global_b feeds the endpoint distance to f.
void gk15(const VectorIntegrand& f, int dim, double a, double b, double global_b,
          Segment& seg, std::vector<double>& fbuf, std::vector<double>& gbuf) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  seg.a = a;
  seg.b = b;
  seg.value.assign(dim, 0.0);
  gbuf.assign(dim, 0.0);
  for (int k = 0; k < kGkHalf; ++k) {
    const int reps = (k == kGkHalf - 1) ? 1 : 2;  // center abscissa once
    for (int r = 0; r < reps; ++r) {
      const double x = c + (r == 0 ? -1.0 : 1.0) * h * kXgk[k];
      f(x, global_b - x, fbuf.data());
      for (int d = 0; d < dim; ++d) {
        seg.value[d] += kWgk[k] * fbuf[d];
        if (k % 2 == 1) gbuf[d] += kWg[k / 2] * fbuf[d];
      }
    }
  }
  double err = 0.0;
  for (int d = 0; d < dim; ++d) {
    seg.value[d] *= h;
    err = std::max(err, std::abs(seg.value[d] - h * gbuf[d]));
  }
  seg.err = err;
}

IntegrationResult adaptive_core(const VectorIntegrand& f, int dim, double a, double b,
                                double tol) {
  IntegrationResult res;
  res.value = Eigen::VectorXd::Zero(dim);
  if (a == b) return res;

  std::vector<double> fbuf(dim), gbuf(dim);
  std::priority_queue<Segment, std::vector<Segment>, SegCompare> heap;
  Segment root;
  gk15(f, dim, a, b, b, root, fbuf, gbuf);
  double total_err = root.err;
  std::vector<double> total(root.value);
  heap.push(std::move(root));

  const int max_segments = 4096;
  const double min_width = (b - a) * std::pow(0.5, 60);  // depth limit 60
  int n_segments = 1;
  while (total_err > tol && !heap.empty()) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.b - worst.a <= min_width || n_segments >= max_segments ||
        mid <= worst.a || mid >= worst.b) {
      break;  // worst contributor cannot be refined further
    }
    heap.pop();
    Segment left, right;
    gk15(f, dim, worst.a, mid, b, left, fbuf, gbuf);
    gk15(f, dim, mid, worst.b, b, right, fbuf, gbuf);
    for (int d = 0; d < dim; ++d)
      total[d] += left.value[d] + right.value[d] - worst.value[d];
    total_err += left.err + right.err - worst.err;
    heap.push(std::move(left));
    heap.push(std::move(right));
    ++n_segments;
  }
  for (int d = 0; d < dim; ++d) res.value(d) = total[d];
  res.error = total_err;
  res.converged = total_err <= tol;
  return res;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1 || n > 300) throw std::invalid_argument("gauss_legendre: n out of range");
  {
    std::shared_lock lock(g_gauss_mutex);
    auto it = g_gauss_cache.find(n);
    if (it != g_gauss_cache.end()) return *it->second;
  }
  auto ld = gauss_legendre_ld(n);
  auto rule = std::make_unique<GaussRule>();
  rule->n = n;
  rule->nodes.resize(n);
  rule->weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule->nodes[i] = static_cast<double>(ld.nodes[i]);
    rule->weights[i] = static_cast<double>(ld.weights[i]);
  }
  std::unique_lock lock(g_gauss_mutex);
  auto [it, inserted] = g_gauss_cache.try_emplace(n, std::move(rule));
  return *it->second;
}

double weighted_moments(int j, double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("weighted_moments: a must be >= 0");
  return static_cast<double>(weighted_moment_ld(j, static_cast<long double>(a)));
}

const RadauRule& build_radau(int q, double a) {
  const std::pair<int, double> key{q, a};
  {
    std::shared_lock lock(g_radau_mutex);
    auto it = g_radau_cache.find(key);
    if (it != g_radau_cache.end()) return *it->second;
  }
  auto rule = compute_radau(q, a);
  std::unique_lock lock(g_radau_mutex);
  auto [it, inserted] = g_radau_cache.try_emplace(key, std::move(rule));
  return *it->second;
}

MappedRule map_rule(const RadauRule& rule, double t_left, double t_right, double rho) {
  if (!(t_right > t_left)) throw std::invalid_argument("map_rule: empty interval");
  const double tau = t_right - t_left;
  const double expected_a = rho * tau;
  if (std::abs(rule.a - expected_a) > 1e-12 * std::max(1.0, expected_a))
    throw std::logic_error("map_rule: rule weight parameter does not match rho * tau");

  MappedRule m;
  m.t_left = t_left;
  m.t_right = t_right;
  m.rho = rho;
  m.q = rule.q;
  const int n = rule.q + 1;
  m.nodes.resize(n);
  m.weights.resize(n);
  m.plain_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    m.nodes[i] = t_left + 0.5 * tau * (rule.nodes[i] + 1.0);
    m.weights[i] = 0.5 * tau * rule.weights[i];
    m.plain_weights[i] = m.weights[i] * std::exp(rule.a * (rule.nodes[i] + 1.0));
  }
  m.nodes[n - 1] = t_right;  // exact right endpoint
  return m;
}

MappedRule make_mapped_rule(int q, double t_left, double t_right, double rho) {
  const double a = rho * (t_right - t_left);
  return map_rule(build_radau(q, a), t_left, t_right, rho);
}

SingularityHint SingularityHint::power(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("SingularityHint: alpha must be in [0,1)");
  SingularityHint h;
  h.kind = Kind::endpoint_power;
  h.alpha = alpha;
  return h;
}

IntegrationResult adaptive_integrate(const VectorIntegrand& f, int dim, double a,
                                     double b, double tol, SingularityHint hint) {
  if (dim < 1) throw std::invalid_argument("adaptive_integrate: dim must be >= 1");
  if (b < a) throw std::invalid_argument("adaptive_integrate: requires a <= b");
  if (a == b) {
    IntegrationResult res;
    res.value = Eigen::VectorXd::Zero(dim);
    return res;
  }
  if (!hint.singular()) return adaptive_core(f, dim, a, b, tol);

  // s = b - u^beta maps the (b - s)^{-alpha} singularity to a bounded
  // integrand: int_a^b f = int_0^{(b-a)^{1-alpha}} beta u^{beta-1} f(b - u^beta) du.
  // The distance w = u^beta reaches f exactly; s itself is only good to
  // ulp(b) and must not be used to reconstruct it.
  const double alpha = hint.alpha;
  const double beta = 1.0 / (1.0 - alpha);
  const double upper = std::pow(b - a, 1.0 - alpha);
  auto transformed = [&, dim](double u, double /*unused*/, double* out) {
    const double w = static_cast<double>(
        std::pow(static_cast<long double>(u), static_cast<long double>(beta)));
    if (!(w > 0.0)) {
      for (int d = 0; d < dim; ++d) out[d] = 0.0;
      return;
    }
    f(b - w, w, out);
    const double jac = beta * std::pow(u, beta - 1.0);
    for (int d = 0; d < dim; ++d) out[d] *= jac;
  };
  return adaptive_core(transformed, dim, 0.0, upper, tol);
}

double adaptive_integrate_scalar(const std::function<double(double)>& f, double a,
                                 double b, double tol, SingularityHint hint,
                                 bool* converged) {
  auto wrap = [&](double s, double, double* out) { out[0] = f(s); };
  IntegrationResult res = adaptive_integrate(wrap, 1, a, b, tol, hint);
  if (converged) *converged = res.converged;
  return res.value(0);
}

double adaptive_integrate_scalar_w(const std::function<double(double, double)>& f,
                                   double a, double b, double tol, SingularityHint hint,
                                   bool* converged) {
  auto wrap = [&](double s, double w, double* out) { out[0] = f(s, w); };
  IntegrationResult res = adaptive_integrate(wrap, 1, a, b, tol, hint);
  if (converged) *converged = res.converged;
  return res.value(0);
}

}  // namespace evomem
