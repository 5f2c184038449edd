#include "evomem/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace evomem {

namespace {

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fmt_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << content;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path);
  RunConfig cfg;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line without '=': " + t);
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.rfind("result.", 0) == 0 || key.rfind("timing.", 0) == 0) continue;
    cfg.set(key, value);
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "example") example = value;
  else if (key == "k") k = std::stoi(value);
  else if (key == "q") q = std::stoi(value);
  else if (key == "levels") {
    levels.clear();
    for (const auto& tok : split(value, ',')) levels.push_back(std::stoi(tok));
  } else if (key == "rho") rho = std::stod(value);
  else if (key == "T") T = std::stod(value);
  else if (key == "kernel") kernel_override = value;
  else if (key == "source_mode") source_mode = value;
  else if (key == "history_quad") history_quad = value;
  else if (key == "ref_mode") ref_mode = (value == "1" || value == "true");
  else if (key == "reformulated") reformulated = (value == "1" || value == "true");
  else if (key == "quad_tol") quad_tol = std::stod(value);
  else if (key == "refine") refine = std::stoi(value);
  else if (key == "out_dir") out_dir = value;
  else if (key == "plot_grid") plot_grid = (value == "1" || value == "true");
  else if (key == "rho_candidates") {
    rho_candidates.clear();
    for (const auto& tok : split(value, ',')) rho_candidates.push_back(std::stod(tok));
  } else if (key == "norm_grid") norm_grid = std::stoi(value);
  else throw std::runtime_error("unknown config key '" + key + "'");
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> m;
  m["example"] = example;
  m["k"] = std::to_string(k);
  m["q"] = std::to_string(q);
  std::string lv;
  for (size_t i = 0; i < levels.size(); ++i)
    lv += (i ? "," : "") + std::to_string(levels[i]);
  m["levels"] = lv;
  m["rho"] = fmt_full(rho);
  m["T"] = fmt_full(T);
  m["kernel"] = kernel_override;
  m["source_mode"] = source_mode;
  m["history_quad"] = history_quad;
  m["ref_mode"] = ref_mode ? "1" : "0";
  m["reformulated"] = reformulated ? "1" : "0";
  m["quad_tol"] = fmt_full(quad_tol);
  m["refine"] = std::to_string(refine);
  m["out_dir"] = out_dir;
  m["plot_grid"] = plot_grid ? "1" : "0";
  std::string rc;
  for (size_t i = 0; i < rho_candidates.size(); ++i)
    rc += (i ? "," : "") + fmt_full(rho_candidates[i]);
  m["rho_candidates"] = rc;
  m["norm_grid"] = std::to_string(norm_grid);
  return m;
}

std::string report_to_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << "k,q,N,M,E_sup,rate,L2rho,rate\n";
  for (const auto& r : rep.rows) {
    os << rep.k << ',' << rep.q << ',' << r.N << ',' << r.M << ',' << fmt_sci(r.e_sup)
       << ',' << (r.has_rate ? fmt_rate(r.rate_sup) : std::string()) << ','
       << fmt_sci(r.e_l2rho) << ','
       << (r.has_rate ? fmt_rate(r.rate_l2) : std::string()) << '\n';
  }
  return os.str();
}

std::string report_to_markdown(const ConvergenceReport& rep) {
  std::ostringstream os;
  os << "| (k,q) | N=M | E_sup | rate | L2rho | rate |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const auto& r : rep.rows) {
    os << "| (" << rep.k << ',' << rep.q << ") | " << r.N << " | " << fmt_sci(r.e_sup)
       << " | " << (r.has_rate ? fmt_rate(r.rate_sup) : std::string()) << " | "
       << fmt_sci(r.e_l2rho) << " | "
       << (r.has_rate ? fmt_rate(r.rate_l2) : std::string()) << " |\n";
  }
  for (const auto& w : rep.warnings) os << "\nnote: " << w << "\n";
  return os.str();
}

RunResult run(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  const auto t_start = std::chrono::steady_clock::now();
  RunResult result;
  fs::create_directories(cfg.out_dir);
  result.csv_path = cfg.out_dir + "/results.csv";
  result.md_path = cfg.out_dir + "/results.md";
  result.manifest_path = cfg.out_dir + "/manifest.txt";
  result.norms_path = cfg.out_dir + "/kernel_norms.txt";

  std::map<std::string, std::string> manifest = cfg.to_map();
  auto finish_manifest = [&](const std::string& status) {
    manifest["result.status"] = status;
    const auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start);
    manifest["timing.total_s"] = fmt_full(dt.count());
    std::ostringstream os;
    for (const auto& [key, value] : manifest) os << key << " = " << value << '\n';
    write_file(result.manifest_path, os.str());
  };

  try {
    if (cfg.k < 1) throw std::runtime_error("k must be >= 1");
    if (cfg.q < 0) throw std::runtime_error("q must be >= 0");
    if (!(cfg.T > 0)) throw std::runtime_error("T must be positive");
    if (!(cfg.rho >= 0)) throw std::runtime_error("rho must be >= 0");
    if (cfg.levels.empty()) throw std::runtime_error("levels must be nonempty");
    for (size_t i = 0; i < cfg.levels.size(); ++i) {
      if (cfg.levels[i] < 1 || (i > 0 && cfg.levels[i] <= cfg.levels[i - 1]))
        throw std::runtime_error("levels must be ascending positive integers");
    }

    Problem problem = registry(cfg.example);
    problem.T = cfg.T;
    if (!cfg.kernel_override.empty()) {
      KernelSpec K = KernelSpec::named(cfg.kernel_override);
      if (K.n != problem.n)
        throw std::runtime_error("kernel override has wrong component count");
      problem.kernel = K;
    }
    if (cfg.source_mode == "direct") problem.source_mode = Problem::SourceMode::direct;
    else if (cfg.source_mode == "manufactured") {
      if (!problem.has_exact())
        throw std::runtime_error("manufactured mode needs an exact solution");
      problem.source_mode = Problem::SourceMode::manufactured;
    } else if (cfg.source_mode != "auto")
      throw std::runtime_error("unknown source_mode '" + cfg.source_mode + "'");

    SolveOptions opts;
    opts.quad_tol = cfg.quad_tol;
    opts.reformulated = cfg.reformulated;
    if (cfg.history_quad == "fixed") opts.history = HistoryQuadMode::fixed_gauss;
    else if (cfg.history_quad == "adaptive") opts.history = HistoryQuadMode::adaptive;
    else if (cfg.history_quad == "auto") opts.history = HistoryQuadMode::automatic;
    else throw std::runtime_error("unknown history_quad '" + cfg.history_quad + "'");

    // Kernel-norm diagnostics on the finest run mesh.
    const int norm_M = cfg.levels.back();
    result.norms = kernel_norm_report(problem.kernel, cfg.rho, problem.gamma, problem.T,
                                      norm_M, cfg.q, cfg.norm_grid, cfg.norm_grid);
    std::optional<double> threshold;
    if (!problem.kernel.is_zero())
      threshold = rho_threshold(problem.kernel, problem.gamma, problem.T, norm_M, cfg.q,
                                cfg.rho_candidates);
    {
      std::ostringstream os;
      os << "rho = " << fmt_full(result.norms.rho) << '\n'
         << "gamma = " << fmt_full(result.norms.gamma) << '\n'
         << "continuous_norm = " << fmt_full(result.norms.continuous_norm) << '\n'
         << "discrete_norm = " << fmt_full(result.norms.discrete_norm) << '\n'
         << "satisfied = " << (result.norms.satisfied ? "1" : "0") << '\n'
         << "t_grid = " << result.norms.t_grid_size << '\n'
         << "s_grid = " << result.norms.s_grid_size << '\n'
         << "norm_mesh_M = " << norm_M << '\n';
      os << "rho_threshold = " << (threshold ? fmt_full(*threshold) : std::string("none"))
         << '\n';
      // rho sweep of the discrete norm over the candidate list
      for (double r : cfg.rho_candidates) {
        TimeMesh mesh = norm_sweep_mesh(problem.T, norm_M, r, cfg.q);
        auto rules = mesh_rules(mesh, r);
        os << "discrete_norm[rho=" << fmt_full(r)
           << "] = " << fmt_full(norm_discrete(problem.kernel, mesh, rules, r, cfg.norm_grid))
           << '\n';
      }
      write_file(result.norms_path, os.str());
      manifest["result.continuous_norm"] = fmt_full(result.norms.continuous_norm);
      manifest["result.discrete_norm"] = fmt_full(result.norms.discrete_norm);
      manifest["result.rho_threshold"] = threshold ? fmt_full(*threshold) : "none";
    }

    const ErrorMode mode =
        (cfg.ref_mode || !problem.has_exact()) ? ErrorMode::reference : ErrorMode::exact;
    result.report =
        run_convergence(problem, cfg.k, cfg.q, cfg.levels, mode, cfg.rho, opts, cfg.refine);

    write_file(result.csv_path, report_to_csv(result.report));
    write_file(result.md_path, report_to_markdown(result.report));
    for (size_t i = 0; i < result.report.warnings.size(); ++i)
      manifest["result.warning." + std::to_string(i)] = result.report.warnings[i];

    if (cfg.plot_grid) {
      // 64x64 (t,x) samples of the finest-level solution for plotting.
      result.plot_path = cfg.out_dir + "/plot_grid.csv";
      const int N = cfg.levels.back();
      TimeMesh tmesh = TimeMesh::uniform(problem.T, N, cfg.rho, cfg.q);
      SpaceMesh1D smesh = SpaceMesh1D::uniform(N);
      SolveOptions plot_opts = opts;
      plot_opts.check_coercivity = false;
      DiscreteSolution sol = solve(problem, tmesh, smesh, cfg.k, plot_opts);
      std::ostringstream os;
      os << "t,x";
      for (int a = 0; a < problem.n; ++a) os << ",u" << a;
      os << '\n';
      std::vector<double> vals(problem.n);
      for (int it = 0; it < 64; ++it) {
        const double t = problem.T * it / 63.0;
        for (int ix = 0; ix < 64; ++ix) {
          const double x = ix / 63.0;
          sol.eval(t, x, vals.data());
          os << fmt_full(t) << ',' << fmt_full(x);
          for (int a = 0; a < problem.n; ++a) os << ',' << fmt_full(vals[a]);
          os << '\n';
        }
      }
      write_file(result.plot_path, os.str());
    }

    finish_manifest("ok");
  } catch (const std::exception& ex) {
    result.error = ex.what();
    result.exit_code = 1;
    manifest["result.error"] = result.error;
    try {
      finish_manifest("failed");
    } catch (...) {
    }
  }
  return result;
}

}  // namespace evomem
