#pragma once

// Small numerical helpers shared by the modules: adaptive quadrature, a
// bracketing root solver, Hermitian eigen-solves, lambda grids, and a
// deterministic data-parallel loop.

#include "specobs/spectral_core.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace specobs {

struct QuadratureResult {
  double value;
  double error;
};

// Adaptive 15-point Gauss-Kronrod on [a, b]. Throws NumericError when the
// error estimate exceeds max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol = 1e-12, double rel_tol = 1e-13);

// Same, over consecutive breakpoints a = x_0 < x_1 < ... < x_n = b.
QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     std::span<const double> breakpoints, double abs_tol = 1e-12,
                                     double rel_tol = 1e-13);

struct EigenPair {
  double value;
  ComplexVector vector;
};

// Smallest / largest eigenpair of a Hermitian matrix (dense direct solve).
EigenPair min_eigenpair(const ComplexMatrix& hermitian);
EigenPair max_eigenpair(const ComplexMatrix& hermitian);
double min_eigenvalue(const ComplexMatrix& hermitian);
double max_eigenvalue(const ComplexMatrix& hermitian);

// Smallest generalized eigenvalue of (H, D) with D diagonal positive.
double min_generalized_eigenvalue(const ComplexMatrix& hermitian, const RealVector& diagonal);

// Default lambda grid for a spectrum: `points` log-spaced values on
// [lambda_1 / 2, 2 lambda_N] plus every midpoint between consecutive distinct
// eigenvalues; sorted, duplicates removed.
std::vector<double> default_lambda_grid(const SpectralSystem& sys, std::size_t points = 512);

// Uniform grid of n points on [lo, hi] (inclusive).
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

// Worker count: SPECOBS_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n) on worker_count() threads. Each index is
// visited exactly once; callers write results into per-index slots so the
// output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace specobs
