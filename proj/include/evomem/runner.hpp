#pragma once

#include <map>
#include <string>
#include <vector>

#include "evomem/analysis.hpp"
#include "evomem/registry.hpp"

namespace evomem {

/// Batch run configuration. Serializes to / parses from flat key=value text;
/// the run manifest uses the same format so a manifest can be re-run as-is.
struct RunConfig {
  std::string example = "ex1";
  int k = 1;
  int q = 0;
  std::vector<int> levels = {8, 16, 32, 64};
  double rho = 1.0;
  double T = 2.0;
  std::string kernel_override;           // empty = example default
  std::string source_mode = "auto";      // auto | direct | manufactured
  std::string history_quad = "auto";     // auto | fixed | adaptive
  bool ref_mode = false;                 // force reference-solution errors
  bool reformulated = false;
  double quad_tol = 1e-12;
  int refine = 3;                        // error-norm quadrature refinement
  std::string out_dir = "out";
  bool plot_grid = false;                // 64x64 (t,x) solution dump
  std::vector<double> rho_candidates = {1, 2, 3, 4, 5, 6, 7, 8};
  int norm_grid = 512;

  static RunConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> to_map() const;
};

struct RunResult {
  int exit_code = 0;
  ConvergenceReport report;
  KernelNormReport norms;
  std::string csv_path, md_path, manifest_path, norms_path, plot_path;
  std::string error;  // nonempty on failure
};

/// Executes the kernel-norm diagnostics and the convergence run, writing
/// results.csv, results.md, kernel_norms.txt, manifest.txt (and plot_grid.csv
/// when requested) into out_dir. On failure the partial artifacts are kept
/// and the manifest carries a failure marker.
RunResult run(const RunConfig& config);

/// The paper-style table serializations (exposed for tests).
std::string report_to_csv(const ConvergenceReport& rep);
std::string report_to_markdown(const ConvergenceReport& rep);

}  // namespace evomem
