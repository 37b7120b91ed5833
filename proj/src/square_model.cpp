#include "specobs/square_model.hpp"

#include "specobs/errors.hpp"
#include "specobs/numerics.hpp"
#include "specobs/window.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace specobs::square {

const char* to_string(Side side) {
  switch (side) {
    case Side::Bottom: return "bottom";
    case Side::Left: return "left";
    case Side::Top: return "top";
    case Side::Right: return "right";
  }
  return "?";
}

Side side_from_string(const std::string& name) {
  if (name == "bottom") return Side::Bottom;
  if (name == "left") return Side::Left;
  if (name == "top") return Side::Top;
  if (name == "right") return Side::Right;
  throw DomainError("unknown side '" + name + "' (expected bottom, left, top or right)");
}

GammaSpec::GammaSpec(std::vector<BoundaryPatch> patches) : patches_(std::move(patches)) {
  if (patches_.empty()) throw DomainError("GammaSpec: at least one patch is required");
  for (const auto& p : patches_) {
    if (!(p.alpha >= 0.0 && p.alpha < p.beta && p.beta <= kPi + 1e-15)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "GammaSpec: need 0 <= alpha < beta <= pi, got (" << p.alpha << ", " << p.beta << ") on "
          << to_string(p.side);
      throw DomainError(msg.str());
    }
  }
  for (std::size_t i = 0; i < patches_.size(); ++i) {
    for (std::size_t j = i + 1; j < patches_.size(); ++j) {
      const auto& a = patches_[i];
      const auto& b = patches_[j];
      if (a.side == b.side && a.alpha < b.beta && b.alpha < a.beta) {
        throw DomainError(std::string("GammaSpec: overlapping patches on side ") + to_string(a.side));
      }
    }
  }
}

bool GammaSpec::single_side() const {
  return std::all_of(patches_.begin(), patches_.end(),
                     [&](const BoundaryPatch& p) { return p.side == patches_.front().side; });
}

GammaSpec GammaSpec::full_side(Side side) {
  return GammaSpec({{side, 0.0, kPi}});
}

GammaSpec GammaSpec::two_touching_sides() {
  return GammaSpec({{Side::Bottom, 0.0, kPi}, {Side::Left, 0.0, kPi}});
}

double sine_product_integral(int p, int p_prime, double alpha, double beta) {
  if (p < 1 || p_prime < 1) throw DomainError("sine_product_integral: frequencies must be >= 1");
  if (p == p_prime) {
    // x/2 - sin(2px)/(4p)
    const auto F = [p](double x) { return x / 2.0 - std::sin(2.0 * p * x) / (4.0 * p); };
    return F(beta) - F(alpha);
  }
  const double d = p - p_prime;
  const double s = p + p_prime;
  const auto F = [d, s](double x) { return std::sin(d * x) / (2.0 * d) - std::sin(s * x) / (2.0 * s); };
  return F(beta) - F(alpha);
}

double gram_entry(const SquareMode& a, const SquareMode& b, const GammaSpec& gamma) {
  const double scale = 4.0 / (kPi * kPi * std::sqrt(static_cast<double>(a.eigenvalue()) * b.eigenvalue()));
  double total = 0.0;
  for (const auto& patch : gamma.patches()) {
    switch (patch.side) {
      case Side::Bottom:
        total += a.q * b.q * sine_product_integral(a.p, b.p, patch.alpha, patch.beta);
        break;
      case Side::Top:
        total += ((a.q + b.q) % 2 == 0 ? 1.0 : -1.0) * a.q * b.q *
                 sine_product_integral(a.p, b.p, patch.alpha, patch.beta);
        break;
      case Side::Left:
        total += a.p * b.p * sine_product_integral(a.q, b.q, patch.alpha, patch.beta);
        break;
      case Side::Right:
        total += ((a.p + b.p) % 2 == 0 ? 1.0 : -1.0) * a.p * b.p *
                 sine_product_integral(a.q, b.q, patch.alpha, patch.beta);
        break;
    }
  }
  return scale * total;
}

ComplexMatrix cluster_gram(const std::vector<SquareMode>& modes, const GammaSpec& gamma) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  ComplexMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = gram_entry(modes[static_cast<std::size_t>(i)], modes[static_cast<std::size_t>(j)], gamma);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

std::vector<SquareMode> lattice_circle(int N) {
  if (N < 2) throw DomainError("lattice_circle: N must be at least 2");
  std::vector<SquareMode> out;
  for (int p = 1; p * p < N; ++p) {
    const int rest = N - p * p;
    const int q = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rest))));
    if (q >= 1 && q * q == rest) out.push_back({p, q});
  }
  return out;
}

SquareSystem build_square_system(int n_max_eigenvalue, const GammaSpec& gamma) {
  if (n_max_eigenvalue < 2) throw DomainError("build_square_system: n_max_eigenvalue must be at least 2");
  std::vector<SquareMode> modes;
  for (int p = 1; p * p < n_max_eigenvalue; ++p) {
    for (int q = 1; p * p + q * q <= n_max_eigenvalue; ++q) modes.push_back({p, q});
  }
  std::sort(modes.begin(), modes.end(), [](const SquareMode& a, const SquareMode& b) {
    if (a.eigenvalue() != b.eigenvalue()) return a.eigenvalue() < b.eigenvalue();
    if (a.p != b.p) return a.p < b.p;
    return a.q < b.q;
  });
  const auto n = static_cast<Eigen::Index>(modes.size());
  RealVector ev(n);
  for (Eigen::Index k = 0; k < n; ++k) ev(k) = modes[static_cast<std::size_t>(k)].eigenvalue();
  ComplexMatrix g = ComplexMatrix::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (std::size_t j = i; j < modes.size(); ++j) {
      const double v = gram_entry(modes[i], modes[j], gamma);
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  });
  std::ostringstream label;
  label << "square n_max=" << n_max_eigenvalue;
  for (const auto& p : gamma.patches()) label << " " << to_string(p.side) << "(" << p.alpha << "," << p.beta << ")";
  return {SpectralSystem(std::move(ev), std::move(g), label.str()), std::move(modes)};
}

namespace {

std::vector<int> nonempty_circles(int n_max) {
  std::vector<int> out;
  for (int N = 2; N <= n_max; ++N) {
    if (!lattice_circle(N).empty()) out.push_back(N);
  }
  return out;
}

CircleClusterRow circle_row(int N, const GammaSpec& gamma, bool with_generalized) {
  const auto modes = lattice_circle(N);
  const ComplexMatrix g = cluster_gram(modes, gamma);
  CircleClusterRow row{};
  row.N = N;
  row.size = static_cast<int>(modes.size());
  row.mu = min_eigenvalue(g);
  row.n_mu = N * row.mu;
  row.q_min = std::numeric_limits<int>::max();
  // Bottom and top traces carry q, left and right traces carry p.
  const Side side = gamma.patches().front().side;
  const bool horizontal = side == Side::Bottom || side == Side::Top;
  RealVector weights(static_cast<Eigen::Index>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const int m = horizontal ? modes[i].q : modes[i].p;
    row.q_min = std::min(row.q_min, m);
    weights(static_cast<Eigen::Index>(i)) = static_cast<double>(m * m) / N;
  }
  row.generalized = with_generalized ? min_generalized_eigenvalue(g, weights) : 0.0;
  return row;
}

}  // namespace

DeltaGammaFit delta_gamma_fit(const GammaSpec& gamma, int n_max_eigenvalue) {
  if (!gamma.single_side()) throw DomainError("delta_gamma_fit: Gamma must lie on a single side");
  const auto circles = nonempty_circles(n_max_eigenvalue);
  if (circles.empty()) throw DomainError("delta_gamma_fit: no nonempty cluster below n_max_eigenvalue");
  DeltaGammaFit fit{};
  fit.table.resize(circles.size());
  parallel_for(circles.size(), [&](std::size_t i) { fit.table[i] = circle_row(circles[i], gamma, true); });
  fit.delta_hat = std::numeric_limits<double>::infinity();
  fit.min_generalized = std::numeric_limits<double>::infinity();
  for (const auto& row : fit.table) {
    if (row.n_mu < fit.delta_hat) {
      fit.delta_hat = row.n_mu;
      fit.argmin_N = row.N;
    }
    fit.min_generalized = std::min(fit.min_generalized, row.generalized);
  }
  return fit;
}

AssumptionIReport assumption_I_check(int n_max_eigenvalue) {
  if (n_max_eigenvalue < 2) throw DomainError("assumption_I_check: n_max_eigenvalue must be at least 2");
  const auto gamma = GammaSpec::two_touching_sides();
  const auto circles = nonempty_circles(n_max_eigenvalue);
  std::vector<CircleClusterRow> table(circles.size());
  parallel_for(circles.size(), [&](std::size_t i) { table[i] = circle_row(circles[i], gamma, false); });
  double min_mu = std::numeric_limits<double>::infinity();
  double dev = 0.0;
  std::vector<ClusterReport> reports;
  reports.reserve(table.size());
  for (const auto& row : table) {
    min_mu = std::min(min_mu, row.mu);
    dev = std::max(dev, std::abs(row.mu - 2.0 / kPi));
    reports.push_back({static_cast<double>(row.N), 0.5, {}, row.mu, {}});
  }
  auto psi = fit_psi_envelope(reports);
  return {std::move(table), min_mu, dev, std::move(psi)};
}

}  // namespace specobs::square
