// Shared scalar/matrix aliases and small utilities used across the library.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>

namespace thetaquant {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using IVec = Eigen::VectorXi;

inline constexpr double pi = std::numbers::pi;
inline constexpr cd iu{0.0, 1.0};

// i^phi with the convention i^phi = exp(i*pi*phi/2), used for quarter-turn
// phases m and for the g/2 offsets in integral-operator prefactors.
inline cd quarter_phase(double phi) { return std::exp(iu * (pi * phi / 2.0)); }

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const RMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline double sym_residual(const Mat& m) { return max_abs(Mat(m - m.transpose())); }
inline double sym_residual(const RMat& m) { return max_abs(RMat(m - m.transpose())); }

// Lexicographic characteristic <-> linear index, first entry most significant.
inline long charv_count(int g, int k) {
  long n = 1;
  for (int i = 0; i < g; ++i) n *= k;
  return n;
}

inline long charv_to_index(const IVec& l, int k) {
  long idx = 0;
  for (int i = 0; i < l.size(); ++i) idx = idx * k + (((l[i] % k) + k) % k);
  return idx;
}

inline IVec index_to_charv(long idx, int g, int k) {
  IVec l(g);
  for (int i = g - 1; i >= 0; --i) {
    l[i] = static_cast<int>(idx % k);
    idx /= k;
  }
  return l;
}

}  // namespace thetaquant
