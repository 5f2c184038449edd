#pragma once

#include <string>

#include "evomem/dg_solver.hpp"

namespace evomem {

/// Built-in problems on [0,T] x (0,1) with M0 = M1 = I, gamma = 1, the
/// gradient-pair operator and two components (u: homogeneous Dirichlet,
/// v: free).
///
///  ex1: smooth kernel ((t-s, s), (t, (t-s)^2)), manufactured source for the
///       exact solution u = (t + e^{-t}) sin(pi x^2), v = cos(t) e^x.
///  ex2: same data with the weakly singular kernel
///       diag((t-s)^{-3/4}, (t-s)^{-1/2}).
///  ex3: ex2 kernel, direct source F = (1,1), x0 = (sin(2 pi x^2), 0);
///       no exact solution (reference comparison).
///  custom: zero problem (F = 0, x0 = 0, zero kernel) meant to be combined
///       with a kernel override.
Problem registry(const std::string& id);

}  // namespace evomem
