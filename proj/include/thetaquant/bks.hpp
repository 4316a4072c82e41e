#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thetaquant/matrix_core.hpp"
#include "thetaquant/types.hpp"

namespace thetaquant {

// A vector in the level-k quantization attached to the disc point tau,
// expanded over the canonical theta frame indexed by (Z/kZ)^g.
struct QuantumVector {
  int g = 1;
  int k = 1;
  Mat tau;
  Vec coeffs;  // length k^g, lexicographic characteristic order
};

void validate(const QuantumVector& u);

// Chart-change factor for half-form data between the holomorphic frame at
// Omega(tau) and the fixed (x, y) frame.  `scalar` is the square root of
// det(1 + tau) continued along t -> 1 + t*tau from the value 1 at t = 0;
// sqrt(d(x,y)) = scalar * sqrt(dz).
struct HalfFormFactor {
  Mat tau;
  BranchedScalar scalar;
};

HalfFormFactor halfform_conversion(const Mat& tau);

// Pairing of the half-form parts attached to two interior (or regularized)
// period matrices: reciprocal branched square root of det((Omega -
// conj(Omega')) / 2ki).
BranchedScalar halfform_pairing(int k, const Mat& omega, const Mat& omega_p);

// Pairing of the prequantum theta parts: diagonal in the characteristic,
// with value det(k i (conj(Omega') - Omega))^{-1/2} on the diagonal.
cd prequantum_pairing(int k, const IVec& l, const IVec& lp, const Mat& omega, const Mat& omega_p);

// Frame pairing constant (2 k^2)^{-g/2}: the product of the two factors
// above for any non-degenerate pair of polarizations.
double bks_frame_constant(int g, int k);

cd bks_pairing(const QuantumVector& u, const QuantumVector& v);

// Smallest singular value of the column span test for the two boundary
// polarizations; zero exactly when the associated real directions overlap.
double transversality_gap(const Mat& tau, const Mat& tau_p);

enum class PairingRoute {
  closed_form,     // branched determinant formulas
  wb_quadrature,   // line quadrature of the component integrands
  torus_grid,      // grid average of theta sections over the torus
};

struct PairingParams {
  PairingRoute route = PairingRoute::closed_form;
  int quad_points = 2048;  // subintervals per dimension (wb_quadrature)
  double window = 0.0;     // 0 = choose from the Gaussian decay rate
  int torus_n = 64;        // grid points per torus dimension (torus_grid)
  double series_tol = 1e-12;
};

// Matrix of frame pairings P[l, l'] = <sigma^l_tau, sigma^{l'}_tau'>.
Mat frame_pairing_matrix(const Mat& tau, const Mat& tau_p, int k, const PairingParams& params = {});

// P at tau = tau': the Gram matrix of the frame.
Mat frame_gram_matrix(const Mat& tau, int k, const PairingParams& params = {});

// Change-of-polarization map B with B sigma^l_tau = sum_j B[j, l]
// sigma^j_tau', determined by matching pairings against the target frame.
Mat bks_map(const Mat& tau, const Mat& tau_p, int k, const PairingParams& params = {});

// Finite Heisenberg group element (lambda, (a, b)) with unit-modulus
// lambda and translation data a, b in (Z/kZ)^g.
struct HeisenbergElement {
  cd lambda{1.0, 0.0};
  IVec a;
  IVec b;
};

void validate(const HeisenbergElement& h, int k);

// Group law with cocycle exp(i pi (b.a' - a.b') / k) so that acting by the
// product equals acting twice.
HeisenbergElement heisenberg_product(const HeisenbergElement& h1, const HeisenbergElement& h2,
                                     int k);

QuantumVector heisenberg_act(const HeisenbergElement& h, const QuantumVector& u);

// Matrix of the action of h on the canonical frame (tau-independent).
Mat heisenberg_matrix(const HeisenbergElement& h, int g, int k);

// Max-norm commutator residual of the change-of-polarization map against
// the Heisenberg action.
double intertwining_heisenberg_check(const Mat& tau, const Mat& tau_p, const HeisenbergElement& h,
                                     int k, const PairingParams& params = {});

// Affine level fiber of a boundary polarization: basepoint on the torus
// plus integer direction columns spanning the underlying subtorus.
struct Fiber {
  RVec basepoint;    // length 2g, entries in [0, 1)
  RMat directions;   // 2g x g, integer entries
};

struct BohrSommerfeldData {
  Mat tau;
  RMat transform;    // integer symplectic matrix moving tau = -1 to tau
  std::vector<Fiber> fibers;  // k^g fibers, characteristic order
};

BohrSommerfeldData bohr_sommerfeld(const Mat& tau, int k, int search_bound = 5);

// Regularized pairing of two transverse boundary polarizations across a
// decreasing schedule of interior offsets; returns the worst deviation
// from the closed-form constant.
double intersection_pairing_check(const Mat& tau, const Mat& tau_p, int k,
                                  const std::vector<double>& eps_schedule = {1e-2, 1e-3, 1e-4});

// Limit matrix of normalized theta sections of the vertical polarization
// sampled on the horizontal fibers: entries k^{-1/2} exp(2 pi i n l / k).
// Genus one.
Mat smatrix_limit(int k, const std::vector<double>& eps_schedule = {1e-2, 1e-3});

}  // namespace thetaquant
