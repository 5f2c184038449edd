#include "evomem/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evomem/lagrange.hpp"

namespace evomem {

// ---------------------------------------------------------------------------
// Entries

double KernelEntry::eval_dist(double t, double s, double w) const {
  switch (type) {
    case Type::zero:
      return 0.0;
    case Type::smooth:
      if (fn_dist) return fn_dist(t, s, w);
      return fn(t, s);
    case Type::power:
      if (!(w > 0.0)) throw std::domain_error("KernelEntry: power kernel needs s < t");
      return coeff * std::pow(w, -alpha);
    case Type::poly_conv:
      if (w < 0.0) throw std::domain_error("KernelEntry: kernel defined for s <= t");
      return conv(w);
  }
  return 0.0;
}

KernelEntry KernelEntry::zero() { return {}; }

KernelEntry KernelEntry::smooth(std::function<double(double, double)> fn,
                                bool translation_invariant) {
  KernelEntry e;
  e.type = Type::smooth;
  e.fn = std::move(fn);
  e.translation_invariant = translation_invariant;
  return e;
}

KernelEntry KernelEntry::power(double c, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("KernelEntry::power: alpha must be in [0,1)");
  KernelEntry e;
  e.type = Type::power;
  e.coeff = c;
  e.alpha = alpha;
  e.hint = SingularityHint::power(alpha);
  e.translation_invariant = true;
  return e;
}

KernelEntry KernelEntry::poly_conv(std::function<double(double)> g) {
  KernelEntry e;
  e.type = Type::poly_conv;
  e.conv = std::move(g);
  e.translation_invariant = true;
  return e;
}

// ---------------------------------------------------------------------------
// Spec

bool KernelSpec::is_zero() const {
  for (const auto& e : entries)
    if (!e.is_zero()) return false;
  return true;
}

bool KernelSpec::has_singular() const {
  for (const auto& e : entries)
    if (e.singular()) return true;
  return false;
}

bool KernelSpec::translation_invariant() const {
  for (const auto& e : entries)
    if (!e.is_zero() && !e.translation_invariant) return false;
  return true;
}

KernelSpec KernelSpec::zero(int n) {
  KernelSpec K;
  K.n = n;
  K.entries.assign(static_cast<size_t>(n) * n, KernelEntry::zero());
  return K;
}

KernelSpec KernelSpec::scalar_const(double c) {
  KernelSpec K = zero(1);
  if (c != 0.0) K.entry(0, 0) = KernelEntry::poly_conv([c](double) { return c; });
  return K;
}

KernelSpec KernelSpec::scalar_power(double c, double alpha) {
  KernelSpec K = zero(1);
  K.entry(0, 0) = KernelEntry::power(c, alpha);
  return K;
}

KernelSpec KernelSpec::example1() {
  KernelSpec K = zero(2);
  K.entry(0, 0) = KernelEntry::poly_conv([](double d) { return d; });
  K.entry(0, 1) = KernelEntry::smooth([](double, double s) { return s; });
  K.entry(1, 0) = KernelEntry::smooth([](double t, double) { return t; });
  K.entry(1, 1) = KernelEntry::poly_conv([](double d) { return d * d; });
  return K;
}

KernelSpec KernelSpec::example2() {
  KernelSpec K = zero(2);
  K.entry(0, 0) = KernelEntry::power(1.0, 0.75);
  K.entry(1, 1) = KernelEntry::power(1.0, 0.5);
  return K;
}

KernelSpec KernelSpec::named(const std::string& name) {
  auto strip_prefix = [&](const char* prefix) -> std::optional<std::string> {
    const std::string p(prefix);
    if (name.rfind(p, 0) == 0) return name.substr(p.size());
    return std::nullopt;
  };
  if (name == "zero") return zero(2);
  if (name == "example1") return example1();
  if (name == "example2_3" || name == "example2") return example2();
  for (const char* p : {"const:", "scalar_const:"})
    if (auto rest = strip_prefix(p)) return scalar_const(std::stod(*rest));
  for (const char* p : {"power:", "scalar_power:"})
    if (auto rest = strip_prefix(p)) {
      const auto colon = rest->find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("KernelSpec::named: power:c:alpha expected");
      return scalar_power(std::stod(rest->substr(0, colon)),
                          std::stod(rest->substr(colon + 1)));
    }
  throw std::invalid_argument("KernelSpec::named: unknown kernel '" + name + "'");
}

Eigen::MatrixXd eval_kernel(const KernelSpec& K, double t, double s) {
  Eigen::MatrixXd out(K.n, K.n);
  for (int a = 0; a < K.n; ++a)
    for (int b = 0; b < K.n; ++b) out(a, b) = K.entry(a, b).eval(t, s);
  return out;
}

// ---------------------------------------------------------------------------
// Integral operator

namespace {

// Strongest endpoint singularity among the entries of one kernel column.
SingularityHint column_hint(const KernelSpec& K, int b) {
  SingularityHint h = SingularityHint::none();
  for (int a = 0; a < K.n; ++a) {
    const auto& e = K.entry(a, b);
    if (e.singular() && e.hint.alpha > h.alpha) h = e.hint;
  }
  return h;
}

}  // namespace

Eigen::VectorXd apply_Tk(const KernelSpec& K,
                         const std::function<void(double t, double* out)>& f, double t,
                         double tol, bool* converged) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(K.n);
  bool ok = true;
  std::vector<double> fval(K.n);
  for (int b = 0; b < K.n; ++b) {
    std::vector<int> rows;
    for (int a = 0; a < K.n; ++a)
      if (!K.entry(a, b).is_zero()) rows.push_back(a);
    if (rows.empty()) continue;
    auto integrand = [&](double s, double w, double* vals) {
      f(s, fval.data());
      for (size_t r = 0; r < rows.size(); ++r)
        vals[r] = K.entry(rows[r], b).eval_dist(t, s, w) * fval[b];
    };
    IntegrationResult res = adaptive_integrate(integrand, static_cast<int>(rows.size()),
                                               0.0, t, tol, column_hint(K, b));
    ok = ok && res.converged;
    for (size_t r = 0; r < rows.size(); ++r) out(rows[r]) += res.value(r);
  }
  if (converged) *converged = ok;
  return out;
}

std::vector<Eigen::MatrixXd> history_moments(const KernelSpec& K, double t_left,
                                             double t_right,
                                             std::span<const double> nodes,
                                             double t_star, double tol,
                                             HistoryQuadMode mode, bool* converged) {
  if (!(t_star > t_left))
    throw std::invalid_argument("history_moments: target must lie right of the interval start");
  const int nb = static_cast<int>(nodes.size());
  const double upper = std::min(t_star, t_right);
  const bool target_inside = (upper == t_star);

  std::vector<Eigen::MatrixXd> G(nb, Eigen::MatrixXd::Zero(K.n, K.n));
  const std::vector<double> node_vec(nodes.begin(), nodes.end());
  const std::vector<double> bary = (nb > 1) ? barycentric_weights(node_vec)
                                            : std::vector<double>{1.0};
  bool ok = true;
  std::vector<double> shape(nb);

  for (int a = 0; a < K.n; ++a) {
    for (int b = 0; b < K.n; ++b) {
      const auto& e = K.entry(a, b);
      if (e.is_zero()) continue;
      const bool use_fixed =
          mode == HistoryQuadMode::fixed_gauss ||
          (mode == HistoryQuadMode::automatic && !e.singular());
      if (use_fixed) {
        const GaussRule& gr = gauss_legendre(nb);
        const double mid = 0.5 * (t_left + upper), half = 0.5 * (upper - t_left);
        for (int g = 0; g < gr.n; ++g) {
          const double s = mid + half * gr.nodes[g];
          const double kv = e.eval(t_star, s) * gr.weights[g] * half;
          lagrange_values(node_vec, bary, s, shape.data());
          for (int i = 0; i < nb; ++i) G[i](a, b) += kv * shape[i];
        }
      } else {
        // The integrator's endpoint distance equals the kernel distance only
        // when the upper limit is the target itself.
        auto integrand = [&](double s, double w, double* vals) {
          const double kv =
              target_inside ? e.eval_dist(t_star, s, w) : e.eval(t_star, s);
          lagrange_values(node_vec, bary, s, shape.data());
          for (int i = 0; i < nb; ++i) vals[i] = kv * shape[i];
        };
        const SingularityHint hint =
            (target_inside && e.singular()) ? e.hint : SingularityHint::none();
        IntegrationResult res = adaptive_integrate(integrand, nb, t_left, upper, tol, hint);
        ok = ok && res.converged;
        for (int i = 0; i < nb; ++i) G[i](a, b) += res.value(i);
      }
    }
  }
  if (converged) *converged = ok;
  return G;
}

// ---------------------------------------------------------------------------
// Norms

namespace {

// int_0^t |K_e(t,s)| e^{-rho(t-s)} ds, singularity (if any) at the upper end;
// the endpoint distance w equals the kernel distance t - s.
double first_term(const KernelEntry& e, double rho, double t, double tol) {
  if (t <= 0.0) return 0.0;
  auto f = [&](double s, double w) {
    return std::abs(e.eval_dist(t, s, w)) * std::exp(-rho * w);
  };
  return adaptive_integrate_scalar_w(f, 0.0, t, tol,
                                     e.singular() ? e.hint : SingularityHint::none());
}

// int_s^T |K_e(t,s)| e^{-rho(t-s)} dt; the singularity sits at the lower end
// t = s, so integrate the reflected variable u = T + s - t. Its endpoint
// distance T - u again equals the kernel distance.
double second_term(const KernelEntry& e, double rho, double s, double T, double tol) {
  if (s >= T) return 0.0;
  if (!e.singular()) {
    auto f = [&](double t) { return std::abs(e.eval(t, s)) * std::exp(-rho * (t - s)); };
    return adaptive_integrate_scalar(f, s, T, tol);
  }
  auto f = [&](double u, double w) {
    const double t = T + s - u;
    return std::abs(e.eval_dist(t, s, w)) * std::exp(-rho * w);
  };
  return adaptive_integrate_scalar_w(f, s, T, tol, e.hint);
}

std::vector<double> uniform_grid(double lo, double hi, int n) {
  std::vector<double> g(n + 1);
  for (int i = 0; i <= n; ++i) g[i] = lo + (hi - lo) * i / n;
  return g;
}

}  // namespace

double norm_continuous(const KernelSpec& K, double rho, double T, int t_grid,
                       int s_grid, double tol) {
  if (!(T > 0)) throw std::invalid_argument("norm_continuous: T must be positive");
  double norm = 0.0;
  const auto tg = uniform_grid(0.0, T, t_grid);
  const auto sg = uniform_grid(0.0, T, s_grid);
  for (const auto& e : K.entries) {
    if (e.is_zero()) continue;
    double sup1 = 0.0, sup2 = 0.0;
    for (double t : tg) sup1 = std::max(sup1, first_term(e, rho, t, tol));
    for (double s : sg) sup2 = std::max(sup2, second_term(e, rho, s, T, tol));
    norm = std::max(norm, std::max(sup1, sup2));
  }
  return norm;
}

double norm_discrete(const KernelSpec& K, const TimeMesh& mesh,
                     std::span<const MappedRule> rules, double rho, int s_grid,
                     double tol) {
  if (static_cast<int>(rules.size()) != mesh.M)
    throw std::invalid_argument("norm_discrete: one rule per interval expected");

  // s samples: uniform grid, mesh points, and all quadrature nodes (the jumps
  // of the indicator sit there, and the closed-side value is the sup).
  std::vector<double> svals = uniform_grid(0.0, mesh.T, s_grid);
  svals.insert(svals.end(), mesh.points.begin(), mesh.points.end());
  for (const auto& r : rules) svals.insert(svals.end(), r.nodes.begin(), r.nodes.end());
  std::sort(svals.begin(), svals.end());
  svals.erase(std::unique(svals.begin(), svals.end()), svals.end());

  const auto tg = uniform_grid(0.0, mesh.T, 512);
  double norm = 0.0;
  for (const auto& e : K.entries) {
    if (e.is_zero()) continue;
    double sup1 = 0.0;
    for (double t : tg) sup1 = std::max(sup1, first_term(e, rho, t, tol));
    for (double t : mesh.points) sup1 = std::max(sup1, first_term(e, rho, t, tol));

    double sup2 = 0.0;
    for (double s : svals) {
      if (s >= mesh.T) continue;
      int ms = mesh.locate(s);
      if (s == mesh.points[ms]) ++ms;  // s on a mesh point: head is the next interval
      double acc = 0.0;
      for (int m = 1; m <= mesh.M; ++m) {
        if (mesh.points[m] < s) continue;
        const MappedRule& r = rules[m - 1];
        if (e.singular() && m == ms) {
          // The interval containing s holds the (t - s)^{-alpha} blow-up;
          // sampling it at nodes diverges as s approaches one, so this head
          // piece enters as the integral the quadrature approximates.
          acc += second_term(e, rho, s, mesh.points[m], tol);
          continue;
        }
        for (size_t i = 0; i < r.nodes.size(); ++i) {
          const double ti = r.nodes[i];
          // Indicator 1_{[s, t_m]}(t_i). Singular entries exclude equality
          // (|K(t,t)| is not defined; the esssup ignores the null set).
          if (e.singular() ? !(ti > s) : !(ti >= s)) continue;
          acc += r.plain_weights[i] * std::abs(e.eval(ti, s)) * std::exp(-rho * (ti - s));
        }
      }
      sup2 = std::max(sup2, acc);
    }
    norm = std::max(norm, std::max(sup1, sup2));
  }
  return norm;
}

TimeMesh norm_sweep_mesh(double T, int M_base, double rho, int q) {
  // Large rho on a coarse mesh leaves the exponential weight unresolved
  // (a = rho tau >> 1); the endpoint plain weight then grows algebraically in
  // a and the quadrature term of the semi-discrete norm loses meaning for
  // singular kernels. The diagnostic sweep keeps a <= 2 by refining with rho.
  const int M = std::max(M_base, static_cast<int>(std::ceil(0.5 * rho * T)));
  return TimeMesh::uniform(T, M, rho, q);
}

std::optional<double> rho_threshold(const KernelSpec& K, double gamma, double T, int M,
                                    int q, std::span<const double> candidates) {
  for (size_t i = 1; i < candidates.size(); ++i)
    if (!(candidates[i] > candidates[i - 1]))
      throw std::invalid_argument("rho_threshold: candidates must be ascending");
  for (double rho : candidates) {
    TimeMesh mesh = norm_sweep_mesh(T, M, rho, q);
    auto rules = mesh_rules(mesh, rho);
    if (norm_discrete(K, mesh, rules, rho) <= 0.5 * gamma) return rho;
  }
  return std::nullopt;
}

KernelNormReport kernel_norm_report(const KernelSpec& K, double rho, double gamma,
                                    double T, int M, int q, int t_grid, int s_grid) {
  KernelNormReport rep;
  rep.rho = rho;
  rep.gamma = gamma;
  rep.t_grid_size = t_grid;
  rep.s_grid_size = s_grid;
  rep.continuous_norm = norm_continuous(K, rho, T, t_grid, s_grid);
  TimeMesh mesh = TimeMesh::uniform(T, M, rho, q);
  auto rules = mesh_rules(mesh, rho);
  rep.discrete_norm = norm_discrete(K, mesh, rules, rho, s_grid);
  rep.satisfied = rep.discrete_norm <= 0.5 * gamma;
  return rep;
}

}  // namespace evomem
