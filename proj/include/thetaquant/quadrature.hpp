// Grid quadrature used to cross-check every closed-form value in the
// library.  Trapezoid sums over [-w, w]^g are spectrally accurate for the
// decaying Gaussian-type integrands that appear here, so the oracles reach
// near machine precision with modest grids.
#pragma once

#include <functional>

#include "thetaquant/types.hpp"
#include "thetaquant/weil_brezin.hpp"

namespace thetaquant {

// Trapezoid rule on [-w, w]^g with n subintervals per dimension.
inline cd trapezoid_nd(const std::function<cd(const RVec&)>& f, int g, double w, int n) {
  const double h = 2.0 * w / n;
  IVec j = IVec::Zero(g);
  RVec x(g);
  cd acc{0.0, 0.0};
  while (true) {
    double weight = 1.0;
    for (int d = 0; d < g; ++d) {
      x[d] = -w + h * j[d];
      if (j[d] == 0 || j[d] == n) weight *= 0.5;
    }
    acc += weight * f(x);
    int axis = g - 1;
    while (axis >= 0) {
      if (++j[axis] <= n) break;
      j[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  return acc * std::pow(h, g);
}

// int_{R^g} exp(-pi xi^T M xi) d xi for Re M positive definite: the
// quadrature side of the determinant-branch convention.
inline cd gaussian_integral_quadrature(const Mat& m, double w, int n) {
  const int g = static_cast<int>(m.rows());
  return trapezoid_nd(
      [&](const RVec& xi) {
        const Vec xc = xi.cast<cd>();
        return std::exp(-pi * (xc.transpose() * (m * xc))(0));
      },
      g, w, n);
}

// Summed component pairing  sum_l a_l conj(b_l) int e^{k pi i y^T Omega y}
// conj(e^{k pi i y^T Omega' y}) dy  of two Gaussian states at equal level.
inline cd gaussian_wb_pairing_quadrature(const GaussianState& a, const GaussianState& b, double w,
                                         int n) {
  const cd integral = trapezoid_nd(
      [&](const RVec& y) {
        const Vec yc = y.cast<cd>();
        const cd qa = (yc.transpose() * (a.omega * yc))(0);
        const cd qb = (yc.transpose() * (b.omega * yc))(0);
        return std::exp(iu * pi * static_cast<double>(a.k) * qa) *
               std::conj(std::exp(iu * pi * static_cast<double>(b.k) * qb));
      },
      a.g, w, n);
  return b.amplitudes.dot(a.amplitudes) * integral;
}

// Window wide enough that exp(-k pi lam y^2) is below ~1e-21 at the edge.
inline double gaussian_window(int k, double lam_min) { return 4.0 / std::sqrt(k * lam_min); }

}  // namespace thetaquant
