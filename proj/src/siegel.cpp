#include "thetaquant/siegel.hpp"

#include <Eigen/Dense>

#include "thetaquant/matrix_core.hpp"

namespace thetaquant {

namespace {

int half_dim(const Eigen::Index rows) { return static_cast<int>(rows / 2); }

void require_even_square(const RMat& m) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0)
    throw InvalidParamsError("expected a 2g x 2g matrix");
}

// Solve X = N D^{-1} (right division) via D^T X^T = N^T.
Mat right_divide(const Mat& n, const Mat& d, const char* who) {
  Eigen::FullPivLU<Mat> lu(d.transpose());
  if (!lu.isInvertible()) throw NoSolutionError(std::string(who) + ": denominator is singular");
  return lu.solve(n.transpose()).transpose();
}

}  // namespace

RMat standard_form(int g) {
  if (g < 1) throw InvalidParamsError("g must be >= 1");
  RMat j = RMat::Zero(2 * g, 2 * g);
  j.topRightCorner(g, g) = -RMat::Identity(g, g);
  j.bottomLeftCorner(g, g) = RMat::Identity(g, g);
  return j;
}

double omega_form(const RVec& u, const RVec& v) {
  if (u.size() != v.size() || u.size() % 2 != 0)
    throw InvalidParamsError("omega_form needs two vectors of equal even length");
  const int g = half_dim(u.size());
  return u.tail(g).dot(v.head(g)) - u.head(g).dot(v.tail(g));
}

bool is_symplectic(const RMat& m, double tol) {
  require_even_square(m);
  const RMat j = standard_form(half_dim(m.rows()));
  return max_abs(RMat(m.transpose() * j * m - j)) <= tol;
}

void require_symplectic(const RMat& m, double tol) {
  require_even_square(m);
  if (!is_symplectic(m, tol)) throw NotSymplecticError("M^T J M != J within tolerance");
}

bool in_siegel(const Mat& omega_mat, double tol) {
  if (omega_mat.rows() != omega_mat.cols()) return false;
  if (max_abs(Mat(omega_mat - omega_mat.transpose())) > symmetry_tolerance(omega_mat)) return false;
  Eigen::SelfAdjointEigenSolver<RMat> es(RMat(0.5 * (omega_mat.imag() + omega_mat.imag().transpose())));
  return es.eigenvalues().minCoeff() > tol;
}

bool in_disc(const Mat& tau, double tol) {
  if (tau.rows() != tau.cols()) return false;
  if (max_abs(Mat(tau - tau.transpose())) > symmetry_tolerance(tau)) return false;
  const Mat one_minus = Mat::Identity(tau.rows(), tau.cols()) - tau.adjoint() * tau;
  Eigen::SelfAdjointEigenSolver<Mat> es(one_minus);
  return es.eigenvalues().minCoeff() >= -tol;
}

Mat cayley(const Mat& omega_mat) {
  if (omega_mat.rows() != omega_mat.cols()) throw InvalidParamsError("Omega must be square");
  const Mat eye = Mat::Identity(omega_mat.rows(), omega_mat.cols());
  // (i - Omega) and (i + Omega)^{-1} commute, so a left solve suffices.
  Eigen::FullPivLU<Mat> lu(iu * eye + omega_mat);
  if (!lu.isInvertible()) throw SingularMatrixError("i + Omega is singular");
  return lu.solve(iu * eye - omega_mat);
}

Mat cayley_inverse(const Mat& tau) {
  if (tau.rows() != tau.cols()) throw InvalidParamsError("tau must be square");
  const Mat eye = Mat::Identity(tau.rows(), tau.cols());
  Eigen::FullPivLU<Mat> lu(eye + tau);
  if (!lu.isInvertible()) throw ChartSingularError("det(1 + tau) = 0");
  return iu * lu.solve(eye - tau);
}

Mat sp_act_H(const RMat& m, const Mat& omega_mat) {
  require_symplectic(m);
  const int g = half_dim(m.rows());
  if (omega_mat.rows() != g || omega_mat.cols() != g)
    throw InvalidParamsError("dimension mismatch between M and Omega");
  const Mat a = m.topLeftCorner(g, g).cast<cd>();
  const Mat b = m.topRightCorner(g, g).cast<cd>();
  const Mat c = m.bottomLeftCorner(g, g).cast<cd>();
  const Mat d = m.bottomRightCorner(g, g).cast<cd>();
  return right_divide(a * omega_mat + b, c * omega_mat + d, "sp_act_H");
}

Mat sp_act_D(const RMat& m, const Mat& tau) {
  require_symplectic(m);
  const int g = half_dim(m.rows());
  if (tau.rows() != g || tau.cols() != g)
    throw InvalidParamsError("dimension mismatch between M and tau");
  const Mat a = m.topLeftCorner(g, g).cast<cd>();
  const Mat b = m.topRightCorner(g, g).cast<cd>();
  const Mat c = m.bottomLeftCorner(g, g).cast<cd>();
  const Mat d = m.bottomRightCorner(g, g).cast<cd>();
  const Mat v = 0.5 * ((a + d) + iu * (b - c));
  const Mat w = 0.5 * ((a - d) + iu * (b + c));
  return right_divide(v * tau - w.conjugate(), v.conjugate() - w * tau, "sp_act_D");
}

RMat complex_structure(const Mat& omega_mat) {
  if (!in_siegel(omega_mat)) throw InvalidParamsError("Omega is not in the Siegel space");
  const int g = static_cast<int>(omega_mat.rows());
  const RMat o1 = omega_mat.real();
  const RMat o2 = 0.5 * (omega_mat.imag() + omega_mat.imag().transpose());
  const RMat s = Eigen::LLT<RMat>(o2).solve(RMat::Identity(g, g));  // O2^{-1}
  RMat j(2 * g, 2 * g);
  j.topLeftCorner(g, g) = -o1 * s;
  j.topRightCorner(g, g) = o1 * s * o1 + o2;
  j.bottomLeftCorner(g, g) = -s;
  j.bottomRightCorner(g, g) = s * o1;
  return j;
}

RMat siegel_metric(const Mat& omega_mat) {
  const RMat gamma = standard_form(static_cast<int>(omega_mat.rows())) * complex_structure(omega_mat);
  return 0.5 * (gamma + gamma.transpose());
}

}  // namespace thetaquant
