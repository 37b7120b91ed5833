#include "specobs/numerics.hpp"

#include "specobs/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>

namespace specobs {

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                           double rel_tol) {
  if (a == b) return {0.0, 0.0};
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Piece {
    double lo, hi, value, error, l1;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  const auto rule = [&f](double lo, double hi) {
    Piece p{lo, hi, 0.0, 0.0, 0.0};
    p.value = GK::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    return p;
  };
  // Global subdivision: always bisect the piece with the largest error.
  std::priority_queue<Piece> heap;
  heap.push(rule(a, b));
  double value = heap.top().value;
  double error = heap.top().error;
  double l1 = heap.top().l1;
  constexpr int kMaxPieces = 4000;
  for (int n = 1;; ++n) {
    const double target = std::max(abs_tol, rel_tol * std::abs(value));
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * l1;
    if (error <= target || error <= floor) break;
    if (n >= kMaxPieces || !std::isfinite(value)) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "integrate: error estimate " << error << " exceeds tolerance " << target << " on [" << a << ", " << b
          << "]";
      throw NumericError(msg.str());
    }
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Piece left = rule(worst.lo, mid);
    const Piece right = rule(mid, worst.hi);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
  return {value, error};
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f,
                                     std::span<const double> breakpoints, double abs_tol, double rel_tol) {
  QuadratureResult total{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto piece = integrate(f, breakpoints[i], breakpoints[i + 1], abs_tol, rel_tol);
    total.value += piece.value;
    total.error += piece.error;
  }
  return total;
}

namespace {

Eigen::SelfAdjointEigenSolver<ComplexMatrix> solve(const ComplexMatrix& h, bool vectors) {
  if (h.rows() == 0 || h.rows() != h.cols()) throw ShapeError("eigen-solve: matrix must be square and nonempty");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, vectors ? Eigen::ComputeEigenvectors
                                                             : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigen-solve: Hermitian eigensolver failed");
  return es;
}

}  // namespace

EigenPair min_eigenpair(const ComplexMatrix& hermitian) {
  const auto es = solve(hermitian, true);
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

EigenPair max_eigenpair(const ComplexMatrix& hermitian) {
  const auto es = solve(hermitian, true);
  const Eigen::Index last = hermitian.rows() - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

double min_eigenvalue(const ComplexMatrix& hermitian) {
  return solve(hermitian, false).eigenvalues()(0);
}

double max_eigenvalue(const ComplexMatrix& hermitian) {
  const auto es = solve(hermitian, false);
  return es.eigenvalues()(hermitian.rows() - 1);
}

double min_generalized_eigenvalue(const ComplexMatrix& hermitian, const RealVector& diagonal) {
  if (diagonal.size() != hermitian.rows()) throw ShapeError("generalized eigen-solve: size mismatch");
  if ((diagonal.array() <= 0.0).any()) throw DomainError("generalized eigen-solve: weights must be positive");
  // D^{-1/2} H D^{-1/2} has the same spectrum as the pencil (H, D).
  const RealVector s = diagonal.cwiseSqrt().cwiseInverse();
  const ComplexMatrix scaled = s.asDiagonal() * hermitian * s.asDiagonal();
  return min_eigenvalue(scaled);
}

std::vector<double> default_lambda_grid(const SpectralSystem& sys, std::size_t points) {
  std::vector<double> grid;
  const double lo = sys.lambda_min() / 2.0;
  const double hi = 2.0 * sys.lambda_max();
  grid.reserve(points + static_cast<std::size_t>(sys.size()));
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid.push_back(lo * std::pow(hi / lo, t));
  }
  const auto groups = sys.eigenvalue_groups();
  for (std::size_t g = 0; g + 1 < groups.size(); ++g) grid.push_back(0.5 * (groups[g].value + groups[g + 1].value));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

unsigned worker_count() {
  if (const char* env = std::getenv("SPECOBS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  // The lowest failing index wins so the rethrown error is scheduling-independent.
  std::exception_ptr failure;
  std::size_t failure_index = n;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::scoped_lock lock(failure_mutex);
            if (i < failure_index) {
              failure_index = i;
              failure = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace specobs
