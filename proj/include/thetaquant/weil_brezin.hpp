// Zak-type transform between sampled sections over the torus and their k^g
// component functions on R^g, plus the polarization operators acting on
// Gaussian component states.
//
// A sampled section stores s on the uniform (x, y) grid (j/N) over
// [0,1)^{2g}.  Component l of the transform is
//     (s)_l(y) = int_{[0,1]^g} s(x, y + l/k) e^{k pi i x.(y+l/k)} e^{-2 pi i l.x} dx,
// a function on R^g; on grid rows the integral is a DFT, and the values at
// translated arguments y - l/k + m come from frequency bins n = l - k m.
// This requires N even and divisible by k; each component then lives on a
// uniform grid of step 1/N with N^2/k points per dimension.
#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "thetaquant/errors.hpp"
#include "thetaquant/types.hpp"

namespace thetaquant {

struct SampledSection {
  int g = 1;
  int k = 1;
  int N = 0;     // samples per dimension (for x and for y alike)
  Vec data;      // size N^{2g}, flat index = y_flat * N^g + x_flat, row-major
};

long section_index(const SampledSection& s, const IVec& jx, const IVec& jy);

// Component sample grid: values at y = (base + q)/N, q row-major in
// [0, extent)^g.  base depends on the characteristic, extent = N^2/k.
struct WBComponentGrid {
  IVec base;
  int extent = 0;
  Vec values;
};

struct WBVector {
  int g = 1;
  int k = 1;
  int N = 0;  // grid step is 1/N
  std::vector<WBComponentGrid> comps;  // k^g components, characteristics in lexicographic order
};

// Component state c_l e^{k pi i y^T Omega y} shared across characteristics.
struct GaussianState {
  int g = 1;
  int k = 1;
  Vec amplitudes;  // size k^g, lexicographic in the characteristic
  Mat omega;       // symmetric, Im Omega >= 0 (closed upper half-space)
};

void validate(const GaussianState& state);

// Distributional limit state: a point mass on the component grid.
struct DeltaState {
  RVec support;  // support point in y
  cd phase{1.0, 0.0};
};

WBVector wb_forward(const SampledSection& s);
SampledSection wb_inverse(const WBVector& v);

// Component value (s)_l(y) for the Gaussian state.
cd gaussian_component(const GaussianState& state, long l_index, const RVec& y);

// Section value at (x, y) by direct summation of the translate series
// (independent of the theta engine; interior Omega only).
cd gaussian_section_value(const GaussianState& state, const RVec& x, const RVec& y);

// Sampled section of a Gaussian state on the N-grid.
SampledSection wb_inverse(const GaussianState& state, int N);

// (torus L^2 pairing by grid quadrature, summed component pairing).
// The two agree for data sampled from honest sections (unitarity).
std::pair<cd, cd> wb_unitarity_check(const SampledSection& s, const SampledSection& sp);

struct XiOperator {
  Mat tau;  // point of the closed Siegel disc
  int k = 1;
};

// Applying (tau+1) d/dy - 2 k pi (tau-1) y to a Gaussian state yields the
// same Gaussian multiplied by the linear form (linear_factor * y).
struct XiResult {
  Mat linear_factor;  // g x g: 2 k pi (i (tau+1) Omega - (tau-1))
  GaussianState base;
};

XiResult xi_apply(const XiOperator& op, const GaussianState& state);

// || i (tau+1) Omega - (tau-1) ||_max; zero exactly when Omega is the
// Cayley preimage of tau.
double xi_residual(const Mat& tau, const Mat& omega);

// Kernel of Xi_tau: a Gaussian state for chart-interior tau, the point mass
// at y = 0 when tau = -1 (where the operator is multiplication by 4 k pi y).
std::variant<GaussianState, DeltaState> xi_kernel(const XiOperator& op, int g);

// X_{tau'} = ((tau'+1)(A+iB) + (tau'-1)(iC-D)) / 2.
Mat xi_intertwiner(const RMat& m, const Mat& tau_prime);

// Transports the kernel Gaussian of Xi_tau through the metaplectic action of
// M and returns the Xi_{M(tau)} residual of the image; interior tau.
double intertwining_check(const RMat& m, const Mat& tau);

}  // namespace thetaquant
