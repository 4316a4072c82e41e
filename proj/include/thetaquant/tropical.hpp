#pragma once

#include <vector>

#include "thetaquant/theta.hpp"
#include "thetaquant/types.hpp"

namespace thetaquant {

// One-parameter family Omega(s) = B A^T + i A exp(2 s Lambda) A^T of
// period matrices escaping to the boundary at rates lambda.
struct GeodesicRay {
  RMat a;       // g x g, invertible
  RMat b;       // g x g, with B A^T symmetric
  RVec lambda;  // g positive rates
};

void validate(const GeodesicRay& ray);

Mat omega_at(const GeodesicRay& ray, double s);

// All lattice points minimizing ||target - m||_G within tie_tol of the
// minimum, searched over a box of the given radius (0 = pick one from the
// conditioning of G).  Errors with RadiusTooSmall when a minimizer touches
// the search boundary, so results are always certified.
std::vector<IVec> lattice_neighbors(const RMat& gram, const RVec& target, int radius = 0,
                                    double tie_tol = 1e-9);

// Membership in the level-k tropical theta divisor: k*y admits at least
// two nearest lattice points in the G-metric.
bool tropical_divisor_membership(const RMat& gram, int k, const RVec& y, double tie_tol = 1e-9);

// Genus-one divisor is G-independent: the odd half-multiples (2j+1)/(2k).
std::vector<double> tropical_divisor_g1(int k);

// Zeros of the level-k section sum_l coeffs[l] sigma^l on the 2-torus
// (genus one), located by winding numbers on an offset grid and
// quadrisection refinement.  Returned as (x, y) pairs sorted by y then x.
std::vector<RVec> theta_zero_locus(const LatticeData& data, const Vec& coeffs, int grid = 16,
                                   int refine_depth = 8);

inline std::vector<double> project_to_y(const std::vector<RVec>& points) {
  std::vector<double> ys;
  ys.reserve(points.size());
  for (const RVec& p : points) ys.push_back(p[1]);
  return ys;
}

// Metric of the ray rescaled by its top growth rate.  The y-y block
// converges to A P A^T with P projecting onto the top-rate directions;
// distinct rates are reported, not rejected.
struct RescaledMetricResult {
  RMat rescaled;     // exp(-2 s max(lambda)) * metric at s
  RMat limit_block;  // g x g limit of the y-y block
  bool mixed_rates = false;
  int limit_rank = 0;  // multiplicity of the top rate
};

RescaledMetricResult rescaled_metric(const GeodesicRay& ray, double s);

// Limit of metric(s * Omega_dot) / s: zero except the y-y block
// O1 O2^{-1} O1 + O2 of the direction matrix.
RMat halfline_rescaled_metric(const Mat& omega_dot);

// Hausdorff distance between finite subsets of R/Z.
double hausdorff_circle(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace thetaquant
