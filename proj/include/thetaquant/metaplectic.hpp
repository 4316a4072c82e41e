// Generators S(P,L,Q)_m of the double cover of Sp(2g,R) realized through
// their action on Gaussian component states and on half-form trivializations.
//
// A generator projects to the symplectic matrix
//     [[P L^{-1},  P L^{-1} Q - L^T], [L^{-1},  L^{-1} Q]],
// and acts on the Gaussian with matrix Omega by
//     Omega' = P - L^T (Omega + Q)^{-1} L,
// scaling the amplitude by  i^m |det L|^{1/2} e^{-i pi g/4}
// det_invsqrt_posreal(-i(Omega+Q)) — the Gaussian-integral branch.  Every
// symplectic matrix is reached by at most two generators.
#pragma once

#include <vector>

#include "thetaquant/errors.hpp"
#include "thetaquant/matrix_core.hpp"
#include "thetaquant/types.hpp"
#include "thetaquant/weil_brezin.hpp"

namespace thetaquant {

struct MetaplecticGenerator {
  RMat P, Q;  // real symmetric
  RMat L;     // real invertible
  int m = 0;  // mod 4; parity tied to sign det L by (-1)^m = sign det L
};

// Picks the minimal index consistent with sign det L (0 or 1).
MetaplecticGenerator make_generator(const RMat& P, const RMat& L, const RMat& Q);

void validate(const MetaplecticGenerator& gen);

RMat generator_to_symplectic(const MetaplecticGenerator& gen);

struct MetaplecticElement {
  // One or two factors; factors[0] is applied last (operator composition
  // order), so the symplectic projection is the left-to-right product.
  std::vector<MetaplecticGenerator> factors;
  BranchedScalar reference_scalar;  // amplitude picked up by the Omega = iI Gaussian
};

RMat projection(const MetaplecticElement& elem);

// At most two factors; single factor exactly when the C block of M is
// invertible, otherwise a left factor S(0,-I,0) (or S(tI,I,0) as fallback)
// makes the remainder's C block invertible.
MetaplecticElement decompose_symplectic(const RMat& m);

// Amplitude factor the generator applies to a Gaussian with this Omega.
BranchedScalar gaussian_action_scalar(const MetaplecticGenerator& gen, const Mat& omega);

GaussianState act_on_gaussian(const MetaplecticGenerator& gen, const GaussianState& state);

// Scalar relating the half-form trivializations at Omega and Omega':
// i^{-m} |det L|^{-1/2} e^{+i pi g/4} / det_invsqrt_posreal(-i(Omega+Q)).
// Its product with gaussian_action_scalar at the same Omega is exactly 1.
BranchedScalar act_on_halfform(const MetaplecticGenerator& gen, const Mat& omega);

GaussianState act(const MetaplecticElement& elem, const GaussianState& state);

// Product of the factors' half-form scalars along the induced Omega path.
BranchedScalar halfform_scalar(const MetaplecticElement& elem, const Mat& omega);

// Transports the level-k basis Gaussian with characteristic l at Omega by
// the decomposition of M with the half-form correction; returns
// |amplitude - 1| + ||Omega_image - M(Omega)||_max, which vanishes when the
// frame is invariant.
double sp_invariance_check(const RMat& m, const IVec& l, const Mat& omega, int k);

}  // namespace thetaquant
