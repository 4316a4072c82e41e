// Determinant branch tracking for complex symmetric matrices.
//
// Two branch conventions are used throughout the library:
//   * det_invsqrt_posreal(M): product of principal inverse square roots of the
//     eigenvalues of M.  When the real part of M (as a quadratic form on real
//     vectors) is positive semidefinite, the eigenvalues lie in the closed
//     right half-plane, the principal branch is unambiguous, and the value
//     equals the Gaussian integral  \int_{R^g} exp(-pi x^T M x) dx.
//   * det_sqrt_path(M(t)): continuation of sqrt(det M(t)) along a path from a
//     known anchor at t = 0, with adaptive step halving so that the argument
//     of det never jumps by pi/2 or more between consecutive samples.
#pragma once

#include <functional>
#include <optional>
#include <string>

#include "thetaquant/errors.hpp"
#include "thetaquant/types.hpp"

namespace thetaquant {

// A scalar with a record of how its branch was fixed.
struct BranchedScalar {
  cd value{};
  std::string anchor;
};

inline double symmetry_tolerance(const Mat& m) { return 1e-12 * std::max(1.0, max_abs(m)); }

void require_complex_symmetric(const Mat& m);

// Eigenvalues of m, no ordering guarantees beyond determinism.
Vec complex_eigenvalues(const Mat& m);

// Principal-branch product of lambda_j^{-1/2} over the eigenvalues of m.
// Preconditions: m complex symmetric, real part positive semidefinite
// (min eigenvalue of the symmetrized real part >= -1e-10), smallest singular
// value > 1e-12.
BranchedScalar det_invsqrt_posreal(const Mat& m);

// Continuation of sqrt(det path(t)) over t in [0,1].  The branch at t = 0 is
// `anchor` if given, else the principal square root of det path(0).  Steps are
// halved adaptively until every consecutive determinant ratio has argument
// below pi/2; throws PathCrossesZero when |det| < 1e-12 at any sample.
BranchedScalar det_sqrt_path(const std::function<Mat(double)>& path, int steps,
                             std::optional<cd> anchor = std::nullopt);

// Symmetric positive definiteness with explicit margin tol on the smallest
// eigenvalue.  Throws NonSymmetric for non-symmetric input.
bool is_posdef(const RMat& m, double tol);

inline cd principal_sqrt(cd z) { return std::sqrt(z); }  // std::sqrt is principal

}  // namespace thetaquant
