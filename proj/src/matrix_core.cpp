#include "thetaquant/matrix_core.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace thetaquant {

void require_complex_symmetric(const Mat& m) {
  if (m.rows() != m.cols()) throw NonSymmetricError("matrix is not square");
  const double res = max_abs(Mat(m - m.transpose()));
  if (res > symmetry_tolerance(m))
    throw NonSymmetricError("asymmetry " + std::to_string(res) + " exceeds tolerance");
}

Vec complex_eigenvalues(const Mat& m) {
  Eigen::ComplexEigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw Error("eigenvalue computation failed");
  return es.eigenvalues();
}

BranchedScalar det_invsqrt_posreal(const Mat& m) {
  require_complex_symmetric(m);

  // Gate on conditioning before looking at the spectrum.
  Eigen::JacobiSVD<Mat> svd(m);
  const double smin = svd.singularValues().minCoeff();
  if (smin <= 1e-12)
    throw SingularMatrixError("smallest singular value " + std::to_string(smin));

  // Real part of the quadratic form x -> x^T m x on real vectors.
  const RMat re_part = 0.5 * (m.real() + m.real().transpose());
  Eigen::SelfAdjointEigenSolver<RMat> res(re_part);
  const double re_min = res.eigenvalues().minCoeff();
  if (re_min < -1e-10)
    throw RealPartNegativeError("real part has eigenvalue " + std::to_string(re_min));

  // Eigenvalues lie in the closed right half-plane; principal branch per factor.
  const Vec lam = complex_eigenvalues(m);
  cd prod{1.0, 0.0};
  for (Eigen::Index j = 0; j < lam.size(); ++j) prod *= 1.0 / std::sqrt(lam[j]);
  return BranchedScalar{prod, "posreal"};
}

BranchedScalar det_sqrt_path(const std::function<Mat(double)>& path, int steps,
                             std::optional<cd> anchor) {
  if (steps < 1) throw InvalidParamsError("steps must be >= 1");

  constexpr int kMaxDoublings = 16;
  for (int attempt = 0; attempt <= kMaxDoublings; ++attempt) {
    const int n = steps << attempt;
    std::vector<cd> dets(static_cast<size_t>(n) + 1);
    bool coarse = false;
    for (int j = 0; j <= n; ++j) {
      const cd d = Mat(path(static_cast<double>(j) / n)).determinant();
      if (std::abs(d) < 1e-12)
        throw PathCrossesZeroError("|det| = " + std::to_string(std::abs(d)) + " at t = " +
                                   std::to_string(static_cast<double>(j) / n));
      dets[static_cast<size_t>(j)] = d;
      if (j > 0 && std::abs(std::arg(d / dets[static_cast<size_t>(j) - 1])) >= pi / 2) {
        coarse = true;
        break;
      }
    }
    if (coarse) continue;

    // Continue the square root: half the accumulated argument increments.
    const cd start = anchor ? *anchor : std::sqrt(dets[0]);
    double darg = 0.0;
    for (int j = 1; j <= n; ++j)
      darg += std::arg(dets[static_cast<size_t>(j)] / dets[static_cast<size_t>(j) - 1]);
    const double mag = std::sqrt(std::abs(dets[static_cast<size_t>(n)] / dets[0]));
    const cd value = start * mag * std::polar(1.0, darg / 2);
    return BranchedScalar{value, anchor ? "supplied" : "principal at t=0"};
  }
  throw ConvergenceFailureError("argument steps did not fall below pi/2");
}

bool is_posdef(const RMat& m, double tol) {
  if (m.rows() != m.cols()) throw NonSymmetricError("matrix is not square");
  if (max_abs(RMat(m - m.transpose())) > 1e-12 * std::max(1.0, max_abs(m)))
    throw NonSymmetricError("matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(m);
  return es.eigenvalues().minCoeff() > tol;
}

}  // namespace thetaquant
