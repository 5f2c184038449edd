#include "evomem/registry.hpp"

#include <cmath>
#include <stdexcept>

namespace evomem {

namespace {

constexpr double kPi = 3.14159265358979323846;

Problem base_problem() {
  Problem p;
  p.n = 2;
  p.M0 = Eigen::MatrixXd::Identity(2, 2);
  p.M1 = Eigen::MatrixXd::Identity(2, 2);
  p.gamma = 1.0;
  p.T = 2.0;
  p.bcs = {BoundaryCondition::dirichlet_both, BoundaryCondition::none};
  p.gradient_coupling = true;
  return p;
}

void attach_manufactured_solution(Problem& p) {
  // u = (t + e^{-t}) sin(pi x^2), v = cos(t) e^x
  p.exact = [](double t, double x, double* out) {
    out[0] = (t + std::exp(-t)) * std::sin(kPi * x * x);
    out[1] = std::cos(t) * std::exp(x);
  };
  p.exact_dt = [](double t, double x, double* out) {
    out[0] = (1.0 - std::exp(-t)) * std::sin(kPi * x * x);
    out[1] = -std::sin(t) * std::exp(x);
  };
  p.exact_dx = [](double t, double x, double* out) {
    out[0] = (t + std::exp(-t)) * 2.0 * kPi * x * std::cos(kPi * x * x);
    out[1] = std::cos(t) * std::exp(x);
  };
  p.x0 = [exact = p.exact](double x, double* out) { exact(0.0, x, out); };
  p.source_mode = Problem::SourceMode::manufactured;
}

}  // namespace

Problem registry(const std::string& id) {
  if (id == "ex1") {
    Problem p = base_problem();
    p.kernel = KernelSpec::example1();
    attach_manufactured_solution(p);
    return p;
  }
  if (id == "ex2") {
    Problem p = base_problem();
    p.kernel = KernelSpec::example2();
    attach_manufactured_solution(p);
    return p;
  }
  if (id == "ex3") {
    Problem p = base_problem();
    p.kernel = KernelSpec::example2();
    p.source_mode = Problem::SourceMode::direct;
    p.F = [](double, double, double* out) {
      out[0] = 1.0;
      out[1] = 1.0;
    };
    p.x0 = [](double x, double* out) {
      out[0] = std::sin(2.0 * kPi * x * x);
      out[1] = 0.0;
    };
    return p;
  }
  if (id == "custom") {
    Problem p = base_problem();
    p.kernel = KernelSpec::zero(2);
    p.source_mode = Problem::SourceMode::direct;
    p.F = [](double, double, double* out) { out[0] = out[1] = 0.0; };
    p.x0 = [](double, double* out) { out[0] = out[1] = 0.0; };
    return p;
  }
  throw std::invalid_argument("registry: unknown example id '" + id + "'");
}

}  // namespace evomem
