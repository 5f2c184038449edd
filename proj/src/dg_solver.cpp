#include "evomem/dg_solver.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evomem/lagrange.hpp"

namespace evomem {

LagrangeData make_lagrange_data(const MappedRule& rule) {
  LagrangeData L;
  L.nodes = rule.nodes;
  L.bary = barycentric_weights(L.nodes);
  L.diff = lagrange_diff_matrix(L.nodes, L.bary);
  const int n = static_cast<int>(L.nodes.size());
  L.left_values.resize(n);
  lagrange_values(L.nodes, L.bary, rule.t_left, L.left_values.data());
  return L;
}

Problem Problem::zero_problem(int n) {
  Problem p;
  p.n = n;
  p.M0 = Eigen::MatrixXd::Identity(n, n);
  p.M1 = Eigen::MatrixXd::Identity(n, n);
  p.kernel = KernelSpec::zero(n);
  if (n == 2) {
    p.bcs = {BoundaryCondition::dirichlet_both, BoundaryCondition::none};
    p.gradient_coupling = true;
  } else {
    p.bcs.assign(n, BoundaryCondition::none);
    p.gradient_coupling = false;
  }
  p.F = [n](double, double, double* out) {
    for (int a = 0; a < n; ++a) out[a] = 0.0;
  };
  p.x0 = [n](double, double* out) {
    for (int a = 0; a < n; ++a) out[a] = 0.0;
  };
  return p;
}

// ---------------------------------------------------------------------------
// DiscreteSolution

void DiscreteSolution::eval(double t, double x, double* out) const {
  const int n = system->n;
  if (t == 0.0) {
    system->eval(x0_dofs, x, out);
    return;
  }
  const int m = mesh.locate(t);
  const auto& L = lag[m - 1];
  const int Q = static_cast<int>(L.nodes.size());
  double shape[16];
  lagrange_values(L.nodes, L.bary, t, shape);
  for (int a = 0; a < n; ++a) out[a] = 0.0;
  const auto& sp = system->spaces;
  for (int i = 0; i < Q; ++i) {
    if (shape[i] == 0.0) continue;
    for (int a = 0; a < n; ++a) {
      const double va = eval_fe(
          sp[a], coeffs[m - 1][i].segment(system->offsets[a], sp[a].n_dofs()), x);
      out[a] += shape[i] * va;
    }
  }
  if (reformulated) {
    const double scale = std::exp(mesh.rho * t);
    for (int a = 0; a < n; ++a) out[a] *= scale;
  }
}

Eigen::VectorXd DiscreteSolution::eval_vec(double t, double x) const {
  Eigen::VectorXd v(system->n);
  eval(t, x, v.data());
  return v;
}

Eigen::VectorXd DiscreteSolution::nodal_u(int m, int i) const {
  Eigen::VectorXd v = coeffs[m - 1][i];
  if (reformulated) v *= std::exp(mesh.rho * lag[m - 1].nodes[i]);
  return v;
}

// ---------------------------------------------------------------------------
// Context

const std::vector<Eigen::MatrixXd>& DgContext::moments(int n, int m, int j) const {
  const int Q = mesh.q + 1;
  // Offsets repeat on uniform meshes with translation-invariant kernels;
  // otherwise every (n, target) pair occurs exactly once per solve and
  // caching would only burn memory.
  if (reuse_matrix) {
    const long long key = static_cast<long long>(m - n) * Q + j;
    auto it = moment_cache.find(key);
    if (it != moment_cache.end()) return it->second;
  }
  const MappedRule& src = rules[n - 1];
  const double t_star = rules[m - 1].nodes[j];
  bool ok = true;
  auto G = history_moments(*kernel, src.t_left, src.t_right, src.nodes, t_star,
                           quad_tol, hist_mode, &ok);
  if (!ok) quad_flag = true;
  if (reuse_matrix) {
    const long long key = static_cast<long long>(m - n) * Q + j;
    auto [ins, added] = moment_cache.try_emplace(key, std::move(G));
    return ins->second;
  }
  moment_scratch = std::move(G);
  return moment_scratch;
}

DgContext make_context(const BlockSystem& sys, const TimeMesh& mesh,
                       const KernelSpec* kernel,
                       std::function<void(double, double, double*)> source,
                       const SolveOptions& opts) {
  DgContext ctx;
  ctx.sys = &sys;
  ctx.mesh = mesh;
  ctx.rules = mesh_rules(mesh, mesh.rho);
  ctx.kernel = (kernel && !kernel->is_zero()) ? kernel : nullptr;
  ctx.hist_mode = opts.history;
  ctx.quad_tol = opts.quad_tol;
  ctx.source = std::move(source);
  ctx.source_quad_pts = sys.spaces.empty() ? 2 : sys.spaces[0].degree() + 1;

  const bool uniform = mesh.is_uniform();
  ctx.lag.reserve(mesh.M);
  for (int m = 1; m <= mesh.M; ++m) {
    if (uniform && m > 1) {
      // Shifted copies of interval 1: D, left values and barycentric weights
      // depend only on node differences.
      LagrangeData L = ctx.lag[0];
      L.nodes = ctx.rules[m - 1].nodes;
      ctx.lag.push_back(std::move(L));
    } else {
      ctx.lag.push_back(make_lagrange_data(ctx.rules[m - 1]));
    }
  }
  ctx.reuse_matrix =
      uniform && (ctx.kernel == nullptr || ctx.kernel->translation_invariant());
  return ctx;
}

// ---------------------------------------------------------------------------
// Local operators

Eigen::MatrixXd local_matrix(const DgContext& ctx, int m) {
  const BlockSystem& sys = *ctx.sys;
  const MappedRule& r = ctx.rules[m - 1];
  const LagrangeData& L = ctx.lag[m - 1];
  const int nd = sys.total_dofs();
  const int Q = static_cast<int>(r.nodes.size());

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Q * nd, Q * nd);
  for (int j = 0; j < Q; ++j) {
    for (int i = 0; i < Q; ++i) {
      const double c = r.weights[j] * L.diff(j, i) + L.left_values(j) * L.left_values(i);
      if (c != 0.0) sys.add_M0h(A, j * nd, i * nd, c);
    }
    sys.add_M1h(A, j * nd, j * nd, r.weights[j]);
    sys.add_Ah(A, j * nd, j * nd, r.weights[j]);
  }

  if (ctx.kernel) {
    for (int j = 0; j < Q; ++j) {
      const auto& G = ctx.moments(m, m, j);
      for (int i = 0; i < Q; ++i) {
        for (int a = 0; a < sys.n; ++a)
          for (int b = 0; b < sys.n; ++b) {
            const double g = G[i](a, b);
            if (g != 0.0)
              sys.cross_mass(a, b).add_to_dense(A, j * nd + sys.offsets[a],
                                                i * nd + sys.offsets[b],
                                                r.weights[j] * g);
          }
      }
    }
  }
  return A;
}

Eigen::VectorXd history_rhs(const DgContext& ctx, int m,
                            const std::vector<std::vector<Eigen::VectorXd>>& coeffs) {
  const BlockSystem& sys = *ctx.sys;
  const MappedRule& r = ctx.rules[m - 1];
  const int nd = sys.total_dofs();
  const int Q = static_cast<int>(r.nodes.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Q * nd);
  if (!ctx.kernel) return rhs;
  for (int n = 1; n < m; ++n) {
    for (int j = 0; j < Q; ++j) {
      const auto& G = ctx.moments(n, m, j);
      for (int i = 0; i < Q; ++i) {
        const Eigen::VectorXd& c = coeffs[n - 1][i];
        for (int a = 0; a < sys.n; ++a)
          for (int b = 0; b < sys.n; ++b) {
            const double g = G[i](a, b);
            if (g != 0.0)
              sys.apply_cross_add(a, b, c.data() + sys.offsets[b],
                                  rhs.data() + j * nd + sys.offsets[a],
                                  -r.weights[j] * g);
          }
      }
    }
  }
  return rhs;
}

Eigen::VectorXd source_rhs(const DgContext& ctx, int m) {
  const BlockSystem& sys = *ctx.sys;
  const MappedRule& r = ctx.rules[m - 1];
  const int nd = sys.total_dofs();
  const int Q = static_cast<int>(r.nodes.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Q * nd);
  for (int j = 0; j < Q; ++j) {
    const double t = r.nodes[j];
    Eigen::VectorXd load = sys.assemble_load(
        [&](double x, double* out) { ctx.source(t, x, out); }, ctx.source_quad_pts);
    rhs.segment(j * nd, nd) += r.weights[j] * load;
  }
  return rhs;
}

Eigen::VectorXd jump_rhs(const DgContext& ctx, int m,
                         const Eigen::Ref<const Eigen::VectorXd>& prev_dofs) {
  const BlockSystem& sys = *ctx.sys;
  const LagrangeData& L = ctx.lag[m - 1];
  const int nd = sys.total_dofs();
  const int Q = static_cast<int>(L.nodes.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Q * nd);
  const Eigen::VectorXd m0_prev = sys.apply_M0h(prev_dofs);
  for (int j = 0; j < Q; ++j) rhs.segment(j * nd, nd) += L.left_values(j) * m0_prev;
  return rhs;
}

std::vector<Eigen::VectorXd> step(DgContext& ctx, int m,
                                  const std::vector<std::vector<Eigen::VectorXd>>& coeffs,
                                  const Eigen::Ref<const Eigen::VectorXd>& prev_dofs) {
  const BlockSystem& sys = *ctx.sys;
  const int nd = sys.total_dofs();
  const int Q = ctx.mesh.q + 1;

  const Eigen::PartialPivLU<Eigen::MatrixXd>* lu = nullptr;
  Eigen::PartialPivLU<Eigen::MatrixXd> local_lu;
  if (ctx.reuse_matrix) {
    if (!ctx.shared_lu) ctx.shared_lu.emplace(local_matrix(ctx, m));
    lu = &*ctx.shared_lu;
  } else {
    local_lu.compute(local_matrix(ctx, m));
    lu = &local_lu;
  }

  Eigen::VectorXd rhs = source_rhs(ctx, m);
  rhs += jump_rhs(ctx, m, prev_dofs);
  rhs += history_rhs(ctx, m, coeffs);

  Eigen::VectorXd u = lu->solve(rhs);
  if (!u.allFinite()) {
    std::ostringstream os;
    os << "step: singular local system at interval " << m << " (q=" << ctx.mesh.q
       << ", ndof=" << nd << ", rcond=" << lu->rcond() << ")";
    throw std::runtime_error(os.str());
  }
  std::vector<Eigen::VectorXd> out(Q);
  for (int i = 0; i < Q; ++i) out[i] = u.segment(i * nd, nd);
  return out;
}

// ---------------------------------------------------------------------------
// Full solve

namespace {

// Manufactured source dt U + M1 U + A U + T_K U for the stored exact solution.
std::function<void(double, double, double*)> manufactured_source(const Problem& p,
                                                                 double quad_tol) {
  if (!p.exact || !p.exact_dt || !p.exact_dx)
    throw std::invalid_argument("solve: manufactured mode needs exact, exact_dt, exact_dx");
  const int n = p.n;
  return [&p, n, quad_tol](double t, double x, double* out) {
    std::vector<double> u(n), ut(n), ux(n);
    p.exact(t, x, u.data());
    p.exact_dt(t, x, ut.data());
    p.exact_dx(t, x, ux.data());
    for (int a = 0; a < n; ++a) {
      out[a] = ut[a];
      for (int b = 0; b < n; ++b) out[a] += p.M1(a, b) * u[b];
    }
    if (p.gradient_coupling) {
      out[0] += ux[1];  // (A U)_1 = dx v
      out[1] += ux[0];  // (A U)_2 = dx u
    }
    if (!p.kernel.is_zero() && t > 0.0) {
      Eigen::VectorXd tk = apply_Tk(
          p.kernel, [&](double s, double* f) { p.exact(s, x, f); }, t, quad_tol);
      for (int a = 0; a < n; ++a) out[a] += tk(a);
    }
  };
}

KernelSpec scale_kernel(const KernelSpec& K, double rho) {
  KernelSpec out = K;
  for (auto& e : out.entries) {
    if (e.is_zero()) continue;
    KernelEntry base = e;
    KernelEntry scaled;
    scaled.type = KernelEntry::Type::smooth;
    scaled.fn = [base, rho](double t, double s) {
      return std::exp(-rho * (t - s)) * base.eval(t, s);
    };
    scaled.fn_dist = [base, rho](double t, double s, double w) {
      return std::exp(-rho * w) * base.eval_dist(t, s, w);
    };
    scaled.hint = base.hint;
    scaled.translation_invariant = base.translation_invariant;
    e = std::move(scaled);
  }
  return out;
}

}  // namespace

DiscreteSolution solve(const Problem& problem, const TimeMesh& mesh,
                       std::shared_ptr<const BlockSystem> system,
                       const SolveOptions& opts) {
  const BlockSystem& sys = *system;
  if (sys.n != problem.n) throw std::invalid_argument("solve: component count mismatch");

  DiscreteSolution sol;
  sol.mesh = mesh;
  sol.system = system;
  sol.reformulated = opts.reformulated;

  if (opts.check_coercivity && !problem.kernel.is_zero()) {
    auto rules_w = mesh_rules(mesh, mesh.rho);
    const double nrm =
        norm_discrete(problem.kernel, mesh, rules_w, mesh.rho, opts.coercivity_s_grid);
    if (!(nrm <= 0.5 * problem.gamma)) {
      std::ostringstream os;
      os << "kernel norm " << nrm << " exceeds gamma/2 = " << 0.5 * problem.gamma
         << " at rho = " << mesh.rho << "; solvability is not guaranteed";
      sol.warnings.push_back(os.str());
    }
  }

  // Effective data. The reformulated path solves for V = e^{-rho t} U with
  // unweighted Radau rules, operators (rho M0 + M1), kernel e^{-rho(t-s)} K
  // and source e^{-rho t} F, and maps back in eval().
  std::function<void(double, double, double*)> src =
      (problem.source_mode == Problem::SourceMode::manufactured)
          ? manufactured_source(problem, opts.quad_tol)
          : problem.F;
  if (!src) throw std::invalid_argument("solve: missing source");

  KernelSpec eff_kernel = problem.kernel;
  TimeMesh eff_mesh = mesh;
  std::shared_ptr<BlockSystem> scaled_sys;  // keeps the shifted M1 alive
  const BlockSystem* sys_ptr = &sys;
  if (opts.reformulated) {
    const double rho = mesh.rho;
    eff_mesh.rho = 0.0;  // unweighted rules
    eff_kernel = scale_kernel(problem.kernel, rho);
    auto base_src = src;
    src = [base_src, rho, n = problem.n](double t, double x, double* out) {
      base_src(t, x, out);
      const double sc = std::exp(-rho * t);
      for (int a = 0; a < n; ++a) out[a] *= sc;
    };
    scaled_sys = std::make_shared<BlockSystem>(sys);
    scaled_sys->M1 = sys.M1 + rho * sys.M0;
    sys_ptr = scaled_sys.get();
  }

  DgContext ctx = make_context(*sys_ptr, eff_mesh, &eff_kernel, src, opts);

  sol.x0_dofs = sys.interpolate(problem.x0);
  sol.lag = ctx.lag;
  sol.coeffs.reserve(mesh.M);

  Eigen::VectorXd prev = sol.x0_dofs;
  for (int m = 1; m <= mesh.M; ++m) {
    try {
      sol.coeffs.push_back(step(ctx, m, sol.coeffs, prev));
    } catch (const std::exception& ex) {
      std::ostringstream os;
      os << "solve failed at interval " << m << "/" << mesh.M << ": " << ex.what();
      throw std::runtime_error(os.str());
    }
    prev = sol.coeffs.back().back();
  }
  sol.quad_flag = ctx.quad_flag;
  return sol;
}

DiscreteSolution solve(const Problem& problem, const TimeMesh& mesh,
                       const SpaceMesh1D& space_mesh, int k, const SolveOptions& opts) {
  auto sys = std::make_shared<BlockSystem>(
      assemble_block_system(space_mesh, k, problem.M0, problem.M1, problem.bcs,
                            problem.gradient_coupling));
  return solve(problem, mesh, sys, opts);
}

}  // namespace evomem
