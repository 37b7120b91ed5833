#pragma once

// Dirichlet Laplacian on the square (0, pi)^2 observed through the outward
// normal derivative on a union of boundary segments.
//
// Modes: phi_{p,q}(x) = 2 / (pi sqrt(p^2 + q^2)) sin(p x1) sin(q x2), unit
// norm in H^1_0, eigenvalue p^2 + q^2. Boundary traces of the normal
// derivative, up to a sign that is fixed per side:
//
//   Bottom (x2 = 0):  2q / (pi sqrt N) sin(p x1)
//   Top    (x2 = pi): 2q / (pi sqrt N) (-1)^q sin(p x1)
//   Left   (x1 = 0):  2p / (pi sqrt N) sin(q x2)
//   Right  (x1 = pi): 2p / (pi sqrt N) (-1)^p sin(q x2)
//
// The Y inner product on a union of segments is the sum of per-segment
// integrals, so the per-side sign cancels in every Gram entry.

#include "specobs/coercivity.hpp"
#include "specobs/decay.hpp"
#include "specobs/spectral_core.hpp"

#include <string>
#include <vector>

namespace specobs::square {

struct SquareMode {
  int p;  // x1 frequency
  int q;  // x2 frequency

  int eigenvalue() const { return p * p + q * q; }
  friend bool operator==(const SquareMode&, const SquareMode&) = default;
};

enum class Side { Bottom, Left, Top, Right };

const char* to_string(Side side);
Side side_from_string(const std::string& name);

struct BoundaryPatch {
  Side side;
  double alpha;  // arc-length interval (alpha, beta) along the side
  double beta;
};

// Nonempty union of segments; segments on the same side must not overlap.
class GammaSpec {
 public:
  explicit GammaSpec(std::vector<BoundaryPatch> patches);

  const std::vector<BoundaryPatch>& patches() const { return patches_; }
  bool single_side() const;

  static GammaSpec full_side(Side side);
  static GammaSpec two_touching_sides();  // Bottom and Left, full length

 private:
  std::vector<BoundaryPatch> patches_;
};

// integral_alpha^beta sin(p x) sin(p' x) dx, exact antiderivative.
double sine_product_integral(int p, int p_prime, double alpha, double beta);

// <C phi_a, C phi_b>_{L2(Gamma)}.
double gram_entry(const SquareMode& a, const SquareMode& b, const GammaSpec& gamma);

ComplexMatrix cluster_gram(const std::vector<SquareMode>& modes, const GammaSpec& gamma);

// All (p, q), p, q >= 1, p^2 + q^2 = N, sorted by p. Throws DomainError for
// N < 2.
std::vector<SquareMode> lattice_circle(int N);

struct SquareSystem {
  SpectralSystem system;
  std::vector<SquareMode> modes;  // modes[k] carries eigenvalue k of system
};

// Modes with p^2 + q^2 <= n_max_eigenvalue, sorted by eigenvalue then (p, q).
SquareSystem build_square_system(int n_max_eigenvalue, const GammaSpec& gamma);

struct CircleClusterRow {
  int N;
  int size;
  double mu;            // minimal Gram eigenvalue on the circle cluster
  double n_mu;          // N * mu
  double generalized;   // min generalized eigenvalue of (G_N, diag(q^2 / N))
  int q_min;            // smallest frequency normal to the observed side (q, or p on left/right)
};

struct DeltaGammaFit {
  double delta_hat;  // min over clusters of N * mu_N
  int argmin_N;
  double min_generalized;
  std::vector<CircleClusterRow> table;
};

// Scans every nonempty lattice circle N <= n_max_eigenvalue. Gamma must lie
// on a single side.
DeltaGammaFit delta_gamma_fit(const GammaSpec& gamma, int n_max_eigenvalue);

struct AssumptionIReport {
  std::vector<CircleClusterRow> table;
  double min_mu;
  double max_deviation;  // max |mu_N - 2/pi|
  DecayFunction psi;     // fitted envelope over the circle clusters
};

// Gamma = Bottom and Left, full length.
AssumptionIReport assumption_I_check(int n_max_eigenvalue);

// The explicit pair for one-sided partial observation, as stated:
// eps(l) = 1 / ((4M/delta) l + 1), psi(l) = delta / (4 l); alongside the gap
// transform of psi(l) = delta / l with cluster width 1/2, which gives
// 1 / ((4M/delta) l + 4).
struct StatedPair {
  double delta;
  double M;
  double epsilon_stated(double lambda) const { return 1.0 / ((4.0 * M / delta) * lambda + 1.0); }
  double psi_stated(double lambda) const { return delta / (4.0 * lambda); }
  double epsilon_from_transform(double lambda) const { return 1.0 / ((4.0 * M / delta) * lambda + 4.0); }
};

}  // namespace specobs::square
