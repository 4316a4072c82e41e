// Theta series with characteristics and the corresponding level-k sections
// over the torus R^{2g}/Z^{2g}, with certified lattice-sum truncation.
//
// theta_eval computes the classical series
//     theta(z) = sum_{m in Z^g} exp(k pi i (m+l/k)^T Omega (m+l/k)
//                                    + 2 k pi i (m+l/k)^T z),
// theta_section_eval the trivialized section
//     s(x,y) = exp(-k pi i x^T y) *
//              sum_m exp(k pi i (y-m-l/k)^T Omega (y-m-l/k)
//                        + 2 k pi i (m+l/k)^T x).
// Both truncate over sup-norm shells around the dominant lattice point and
// return the value together with a certified bound on the discarded tail.
#pragma once

#include "thetaquant/errors.hpp"
#include "thetaquant/types.hpp"

namespace thetaquant {

struct LatticeData {
  int g = 1;
  int k = 1;       // level, >= 1
  Mat omega;       // g x g, in the Siegel space (Im positive definite)
};

void validate(const LatticeData& data);

// Reduce each entry into [0, k).
IVec normalize_characteristic(const IVec& l, int k);

// (-1)^{sum_j lambda_j lambda_{g+j}} on Z^{2g}.
int semicharacter(const IVec& lambda);

// F_Omega(z, w) = -z^T (Im Omega)^{-1} Im w; linear in z, real-linear in w.
cd bilinear_F(const Mat& omega, const Vec& z, const Vec& w);

struct ThetaResult {
  cd value{};
  double error_bound = 0.0;  // certified absolute bound on the truncated tail
};

struct TruncationOptions {
  int max_radius = 4096;  // sup-norm shell cap before TruncationFailure
};

ThetaResult theta_eval(const LatticeData& data, const IVec& l, const Vec& z, double tol,
                       const TruncationOptions& opts = {});

ThetaResult theta_section_eval(const LatticeData& data, const IVec& l, const RVec& x,
                               const RVec& y, double tol, const TruncationOptions& opts = {});

}  // namespace thetaquant
