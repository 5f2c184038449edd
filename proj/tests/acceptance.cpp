// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Published table values are embedded as the reproduction targets.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "evomem/analysis.hpp"
#include "evomem/lagrange.hpp"
#include "evomem/registry.hpp"

using namespace evomem;

namespace {

int g_failures = 0;

void report(int idx, const char* what, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", idx, what,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!pass) ++g_failures;
}

struct TableTarget {
  int k, q;
  std::vector<double> l2rho;  // published values at N = 8,16,32,64
  double final_rate;          // published rate at N = 64
};

bool check_table(const char* example, const std::vector<TableTarget>& targets,
                 std::string& detail) {
  bool pass = true;
  char buf[256];
  for (const auto& tgt : targets) {
    Problem p = registry(example);
    SolveOptions opts;
    opts.check_coercivity = false;
    ConvergenceReport rep =
        run_convergence(p, tgt.k, tgt.q, {8, 16, 32, 64}, ErrorMode::exact, 1.0, opts);
    for (size_t l = 0; l < tgt.l2rho.size(); ++l) {
      const double ratio = rep.rows[l].e_l2rho / tgt.l2rho[l];
      if (!(ratio >= 0.5 && ratio <= 2.0)) pass = false;
    }
    const double rate = rep.rows.back().rate_l2;
    if (!(std::abs(rate - tgt.final_rate) <= 0.15)) pass = false;
    std::snprintf(buf, sizeof buf, "(%d,%d): err(64)=%.3e (target %.3e), rate %.2f (target %.2f); ",
                  tgt.k, tgt.q, rep.rows.back().e_l2rho, tgt.l2rho.back(), rate,
                  tgt.final_rate);
    detail += buf;
  }
  return pass;
}

void criterion1() {
  std::vector<TableTarget> t1 = {
      {1, 0, {9.477e-02, 4.698e-02, 2.351e-02, 1.177e-02}, 1.00},
      {2, 1, {5.182e-03, 1.311e-03, 3.310e-04, 8.335e-05}, 1.99},
      {3, 2, {2.588e-04, 1.557e-05, 1.189e-06, 1.160e-07}, 3.36},
  };
  std::string detail;
  const bool pass = check_table("ex1", t1, detail);
  report(1, "smooth-kernel table (errors within 2x, final rates within 0.15)", pass,
         detail);
}

void criterion2() {
  std::vector<TableTarget> t2 = {
      {1, 0, {7.924e-02, 3.933e-02, 1.974e-02, 9.908e-03}, 0.99},
      {2, 1, {4.577e-03, 1.172e-03, 2.970e-04, 7.484e-05}, 1.99},
      {3, 2, {1.840e-04, 1.182e-05, 1.017e-06, 1.095e-07}, 3.22},
  };
  std::string detail;
  const bool pass = check_table("ex2", t2, detail);
  report(2, "singular-kernel table (errors within 2x, final rates within 0.15)", pass,
         detail);
}

void criterion3() {
  Problem p = registry("ex3");
  SolveOptions opts;
  opts.check_coercivity = false;
  ConvergenceReport rep =
      run_convergence(p, 3, 2, {8, 16, 32, 64}, ErrorMode::reference, 1.0, opts);
  std::vector<double> rates;
  for (size_t l = 1; l < rep.rows.size(); ++l) rates.push_back(rep.rows[l].rate_l2);
  bool pass = !rates.empty();
  for (double r : rates)
    if (!(r < 3.0)) pass = false;
  if (!(rates.back() < rates.front())) pass = false;  // degrading, not approaching 3
  char buf[128];
  std::string detail = "rates:";
  for (double r : rates) {
    std::snprintf(buf, sizeof buf, " %.2f", r);
    detail += buf;
  }
  report(3, "reference-mode run stays below order 3 and degrades", pass, detail);
}

void criterion4() {
  char buf[256];
  std::string detail;
  bool pass = true;

  const std::vector<double> cands = {1, 2, 3, 4, 5, 6, 7, 8};
  auto thr = rho_threshold(KernelSpec::example1(), 1.0, 2.0, 64, 2, cands);
  if (!thr || !(*thr <= 4.0)) pass = false;
  std::snprintf(buf, sizeof buf, "rho threshold = %s (need <= 4); ",
                thr ? std::to_string(*thr).c_str() : "none");
  detail += buf;

  // decay fit of the semi-discrete norm for the singular kernel; the sweep
  // mesh resolves the exponential weight (a = rho tau <= 2)
  std::vector<double> rhos = {1.0, 16.0, 256.0}, lognorm, logrho;
  for (double rho : rhos) {
    TimeMesh mesh = norm_sweep_mesh(2.0, 64, rho, 2);
    auto rules = mesh_rules(mesh, rho);
    const double nrm = norm_discrete(KernelSpec::example2(), mesh, rules, rho);
    lognorm.push_back(std::log(nrm));
    logrho.push_back(std::log(rho));
    std::snprintf(buf, sizeof buf, "norm(rho=%g)=%.4f ", rho, nrm);
    detail += buf;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = 3;
  for (int i = 0; i < n; ++i) {
    sx += logrho[i];
    sy += lognorm[i];
    sxx += logrho[i] * logrho[i];
    sxy += logrho[i] * lognorm[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!(slope >= -0.35 && slope <= -0.15)) pass = false;
  std::snprintf(buf, sizeof buf, "decay exponent %.3f (need in [-0.35,-0.15])", slope);
  detail += buf;
  report(4, "kernel-norm diagnostics", pass, detail);
}

// --- criterion 5: property suites -----------------------------------------

bool prop_quadrature(std::string& detail) {
  bool pass = true;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ad(0.0, 20.0);
  for (int trial = 0; trial < 100 && pass; ++trial) {
    const int q = trial % 5;
    const double a = ad(rng);
    const RadauRule& r = build_radau(q, a);
    for (int j = 0; j <= 2 * q; ++j) {
      double quad = 0.0;
      for (int i = 0; i <= q; ++i) quad += r.weights[i] * std::pow(r.nodes[i], j);
      const double want = weighted_moments(j, a);
      if (!(std::abs(quad - want) <= 1e-11 * std::max(std::abs(want), 1e-3))) pass = false;
    }
    for (int i = 0; i <= q; ++i)
      if (!(r.weights[i] > 0.0 && r.nodes[i] > -1.0 && r.nodes[i] <= 1.0)) pass = false;
  }
  for (double alpha : {0.5, 0.75}) {
    for (double tol : {1e-8, 1e-12}) {
      const double b = 1.1, d = 0.3;
      bool ok = false;
      const double got = adaptive_integrate_scalar_w(
          [&](double s, double w) { return (d + s) * std::pow(w, -alpha); }, 0.0, b,
          tol, SingularityHint::power(alpha), &ok);
      const double want = (d + b) * std::pow(b, 1.0 - alpha) / (1.0 - alpha) -
                          std::pow(b, 2.0 - alpha) / (2.0 - alpha);
      if (!ok || !(std::abs(got - want) <= tol)) pass = false;
    }
  }
  detail += pass ? "quadrature ok; " : "quadrature FAILED; ";
  return pass;
}

KernelSpec random_scalar_kernel(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> cd(0.1, 2.0), ad(0.1, 0.85);
  std::uniform_int_distribution<int> kind(0, 2);
  switch (kind(rng)) {
    case 0:
      return KernelSpec::scalar_const(cd(rng));
    case 1: {
      KernelSpec K = KernelSpec::zero(1);
      const double c = cd(rng);
      K.entry(0, 0) = KernelEntry::poly_conv([c](double dd) { return c * (1.0 + dd); });
      return K;
    }
    default:
      return KernelSpec::scalar_power(cd(rng), ad(rng));
  }
}

bool prop_norm_bounds(std::string& detail) {
  bool pass = true;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> rd(0.0, 2.0), ud(-1.0, 1.0);
  const double T = 1.5;
  const GaussRule& gr = gauss_legendre(8);

  for (int trial = 0; trial < 100 && pass; ++trial) {
    KernelSpec K = random_scalar_kernel(rng);
    const double rho = rd(rng), mu = rho + 0.1 + rd(rng);
    if (!(norm_continuous(K, mu, T, 128, 128) <=
          norm_continuous(K, rho, T, 128, 128) * (1.0 + 1e-9)))
      pass = false;
  }
  detail += pass ? "monotonicity ok; " : "monotonicity FAILED; ";

  bool pass_op = true;
  for (int trial = 0; trial < 100 && pass_op; ++trial) {
    KernelSpec K = random_scalar_kernel(rng);
    const double rho = rd(rng);
    // piecewise-cubic f on 3 pieces
    std::vector<double> breaks = {0.0, T / 3, 2 * T / 3, T};
    std::vector<std::array<double, 4>> cf(3);
    for (auto& cc : cf)
      for (auto& v : cc) v = ud(rng);
    auto f = [&](double s) {
      if (s < 0.0 || s > T) return 0.0;
      size_t pc = 0;
      while (pc + 2 < breaks.size() && s > breaks[pc + 1]) ++pc;
      const double x = s - breaks[pc];
      return cf[pc][0] + x * (cf[pc][1] + x * (cf[pc][2] + x * cf[pc][3]));
    };
    auto wl2 = [&](const std::function<double(double)>& g) {
      double acc = 0.0;
      for (size_t pc = 0; pc + 1 < breaks.size(); ++pc)
        for (int sub = 0; sub < 16; ++sub) {
          const double a = breaks[pc] + (breaks[pc + 1] - breaks[pc]) * sub / 16.0;
          const double b = breaks[pc] + (breaks[pc + 1] - breaks[pc]) * (sub + 1) / 16.0;
          for (int g8 = 0; g8 < gr.n; ++g8) {
            const double t = 0.5 * (a + b) + 0.5 * (b - a) * gr.nodes[g8];
            const double v = g(t);
            acc += 0.5 * (b - a) * gr.weights[g8] * v * v * std::exp(-2.0 * rho * t);
          }
        }
      return std::sqrt(acc);
    };
    const double nK = norm_continuous(K, rho, T, 256, 256);
    const double nf = wl2(f);
    const double nTf = wl2([&](double t) {
      return apply_Tk(K, [&](double s, double* out) { out[0] = f(s); }, t, 1e-11)(0);
    });
    if (!(nTf <= (1.0 + 1e-6) * nK * nf + 1e-12)) pass_op = false;
  }
  detail += pass_op ? "operator bound ok; " : "operator bound FAILED; ";

  bool pass_disc = true;
  std::uniform_int_distribution<int> qd(0, 2);
  for (int trial = 0; trial < 100 && pass_disc; ++trial) {
    KernelSpec K = (trial % 2 == 0) ? KernelSpec::scalar_const(0.3 + rd(rng)) : [&] {
      KernelSpec Kk = KernelSpec::zero(1);
      const double c = 0.2 + 0.5 * rd(rng);
      Kk.entry(0, 0) = KernelEntry::poly_conv([c](double dd) { return c * (1.0 + dd); });
      return Kk;
    }();
    const double rho = rd(rng);
    const int q = qd(rng);
    TimeMesh mesh = TimeMesh::uniform(T, 5, rho, q);
    auto rules = mesh_rules(mesh, rho);
    std::vector<std::vector<double>> vals(mesh.M), bary(mesh.M);
    for (int m = 0; m < mesh.M; ++m) {
      vals[m].resize(q + 1);
      for (auto& v : vals[m]) v = ud(rng);
      bary[m] = barycentric_weights(rules[m].nodes);
    }
    auto eval_V = [&](double s) {
      if (s <= 0.0 || s > T) return 0.0;
      const int m = mesh.locate(s);
      double shape[8];
      lagrange_values(rules[m - 1].nodes, bary[m - 1], s, shape);
      double acc = 0.0;
      for (int i = 0; i <= q; ++i) acc += shape[i] * vals[m - 1][i];
      return acc;
    };
    double v_sq = 0.0, tv_sq = 0.0;
    for (int m = 1; m <= mesh.M; ++m) {
      const double damp = std::exp(-2.0 * rho * mesh.points[m - 1]);
      for (int i = 0; i <= q; ++i) {
        v_sq += damp * rules[m - 1].weights[i] * vals[m - 1][i] * vals[m - 1][i];
        const double tv =
            apply_Tk(K, [&](double s, double* out) { out[0] = eval_V(s); },
                     rules[m - 1].nodes[i], 1e-12)(0);
        tv_sq += damp * rules[m - 1].weights[i] * tv * tv;
      }
    }
    const double nK = norm_discrete(K, mesh, rules, rho, 256);
    if (!(std::sqrt(tv_sq) <= (1.0 + 1e-6) * nK * std::sqrt(v_sq) + 1e-12))
      pass_disc = false;
  }
  detail += pass_disc ? "discrete bound ok; " : "discrete bound FAILED; ";
  return pass && pass_op && pass_disc;
}

bool prop_solver(std::string& detail) {
  bool pass = true;
  SolveOptions opts;
  opts.check_coercivity = false;

  // exact skew-symmetry
  for (int k : {1, 2, 3}) {
    BlockSystem sys = assemble_block_system(SpaceMesh1D::uniform(6), k,
                                            Eigen::MatrixXd::Identity(2, 2),
                                            Eigen::MatrixXd::Identity(2, 2));
    Eigen::MatrixXd Ah = sys.dense_Ah();
    if ((Ah + Ah.transpose()).cwiseAbs().maxCoeff() != 0.0) pass = false;
  }
  detail += pass ? "skew ok; " : "skew FAILED; ";

  // backward-Euler equivalence at q = 0
  bool pass_be = true;
  {
    Problem p;
    p.n = 1;
    p.M0 = Eigen::MatrixXd::Identity(1, 1);
    p.M1 = Eigen::MatrixXd::Identity(1, 1);
    p.kernel = KernelSpec::zero(1);
    p.T = 1.25;
    p.bcs = {BoundaryCondition::none};
    p.gradient_coupling = false;
    p.F = [](double, double, double* out) { out[0] = 1.0; };
    p.x0 = [](double, double* out) { out[0] = 0.0; };
    const int M = 5;
    const double tau = p.T / M;
    DiscreteSolution sol =
        solve(p, TimeMesh::uniform(p.T, M, 0.0, 0), SpaceMesh1D::uniform(3), 1, opts);
    double u = 0.0;
    for (int m = 1; m <= M; ++m) {
      u = (u + tau) / (1.0 + tau);
      if (!(std::abs(sol.eval_vec(m * tau, 0.7)(0) - u) <= 1e-12)) pass_be = false;
    }
  }
  detail += pass_be ? "backward-Euler ok; " : "backward-Euler FAILED; ";

  // stationary exactness
  bool pass_st = true;
  {
    Problem p = Problem::zero_problem(2);
    p.F = [](double, double, double* out) { out[0] = 0.0; out[1] = 1.0; };
    p.x0 = [](double, double* out) { out[0] = 0.0; out[1] = 1.0; };
    for (int q : {0, 2}) {
      DiscreteSolution sol = solve(p, TimeMesh::uniform(2.0, 6, 1.0, q),
                                   SpaceMesh1D::uniform(5), q + 1, opts);
      for (const auto& interval : sol.coeffs)
        for (const auto& c : interval)
          if (!((c - sol.x0_dofs).cwiseAbs().maxCoeff() <= 1e-10)) pass_st = false;
    }
  }
  detail += pass_st ? "stationary ok; " : "stationary FAILED; ";

  // causality: zero data on [0, 1] gives exact zeros there
  bool pass_ca = true;
  {
    Problem p = Problem::zero_problem(2);
    p.kernel = KernelSpec::example2();
    p.F = [](double t, double x, double* out) {
      out[0] = 0.0;
      out[1] = (t > 1.0) ? std::sin(x) : 0.0;
    };
    DiscreteSolution sol = solve(p, TimeMesh::uniform(2.0, 8, 1.0, 1),
                                 SpaceMesh1D::uniform(4), 1, opts);
    for (int m = 1; m <= 4; ++m)
      for (const auto& c : sol.coeffs[m - 1])
        if (c.cwiseAbs().maxCoeff() != 0.0) pass_ca = false;
  }
  detail += pass_ca ? "causality ok; " : "causality FAILED; ";

  // weighted vs reformulated agreement on a constant-kernel problem
  bool pass_rf = true;
  {
    Problem p;
    p.n = 1;
    p.M0 = Eigen::MatrixXd::Identity(1, 1);
    p.M1 = Eigen::MatrixXd::Identity(1, 1);
    p.kernel = KernelSpec::scalar_const(0.7);
    p.T = 1.0;
    p.bcs = {BoundaryCondition::none};
    p.gradient_coupling = false;
    p.F = [](double t, double, double* out) { out[0] = 1.0 + 0.5 * t; };
    p.x0 = [](double, double* out) { out[0] = 0.8; };
    TimeMesh mesh = TimeMesh::uniform(1.0, 8, 1e-7, 1);
    DiscreteSolution w = solve(p, mesh, SpaceMesh1D::uniform(3), 1, opts);
    SolveOptions ro = opts;
    ro.reformulated = true;
    DiscreteSolution r = solve(p, mesh, SpaceMesh1D::uniform(3), 1, ro);
    for (int m = 1; m <= mesh.M; ++m)
      for (int i = 0; i <= 1; ++i)
        if (!((w.nodal_u(m, i) - r.nodal_u(m, i)).cwiseAbs().maxCoeff() <= 1e-10))
          pass_rf = false;
  }
  detail += pass_rf ? "reformulated ok" : "reformulated FAILED";
  return pass && pass_be && pass_st && pass_ca && pass_rf;
}

void criterion5() {
  std::string detail;
  bool pass = prop_quadrature(detail);
  pass = prop_norm_bounds(detail) && pass;
  pass = prop_solver(detail) && pass;
  report(5, "property suites", pass, detail);
}

void criterion6() {
  // wall-clock growth of solve with M at fixed N; the smooth non-convolution
  // kernel forces the O(M^2) history path
  Problem p = registry("ex1");
  p.source_mode = Problem::SourceMode::direct;
  p.F = [](double, double, double* out) { out[0] = out[1] = 1.0; };
  SolveOptions opts;
  opts.check_coercivity = false;
  std::vector<int> Ms = {64, 128, 256, 512};
  std::vector<double> secs;
  for (int M : Ms) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      solve(p, TimeMesh::uniform(2.0, M, 1.0, 1), SpaceMesh1D::uniform(4), 1, opts);
      best = std::min(best, std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - t0)
                                .count());
    }
    secs.push_back(best);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(Ms.size());
  for (int i = 0; i < n; ++i) {
    const double x = std::log2(static_cast<double>(Ms[i]));
    const double y = std::log2(secs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  char buf[160];
  std::snprintf(buf, sizeof buf, "times %.4f/%.4f/%.4f/%.4f s, fit exponent %.2f",
                secs[0], secs[1], secs[2], secs[3], slope);
  report(6, "history cost grows no faster than M^2.2", slope <= 2.2, buf);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  std::printf("%s (%d failure%s)\n", g_failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures == 0 ? 0 : 1;
}
