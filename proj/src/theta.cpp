#include "thetaquant/theta.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "thetaquant/siegel.hpp"

namespace thetaquant {

void validate(const LatticeData& data) {
  if (data.k < 1) throw InvalidParamsError("level k must be >= 1");
  if (data.omega.rows() != data.g || data.omega.cols() != data.g)
    throw InvalidParamsError("Omega must be g x g");
  if (!in_siegel(data.omega, 1e-10))
    throw InvalidParamsError("Omega is not in the Siegel space");
}

IVec normalize_characteristic(const IVec& l, int k) {
  if (k < 1) throw InvalidParamsError("level k must be >= 1");
  IVec out = l;
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] = ((out[j] % k) + k) % k;
  return out;
}

int semicharacter(const IVec& lambda) {
  if (lambda.size() % 2 != 0) throw InvalidParamsError("lambda must have even length");
  const int g = static_cast<int>(lambda.size() / 2);
  long s = 0;
  for (int j = 0; j < g; ++j) s += static_cast<long>(lambda[j]) * lambda[g + j];
  return (s % 2 == 0) ? 1 : -1;
}

cd bilinear_F(const Mat& omega, const Vec& z, const Vec& w) {
  if (!in_siegel(omega, 1e-10)) throw InvalidParamsError("Omega is not in the Siegel space");
  const RMat im = 0.5 * (omega.imag() + omega.imag().transpose());
  const RVec w2 = Eigen::LLT<RMat>(im).solve(RVec(w.imag()));
  return -(z.transpose() * w2.cast<cd>())(0);
}

namespace {

// Lexicographic walk over { m : ||m - center||_inf == rho }.
void for_each_on_shell(const IVec& center, int rho, const std::function<void(const IVec&)>& f) {
  const int g = static_cast<int>(center.size());
  IVec d = IVec::Constant(g, -rho);
  IVec m(g);
  while (true) {
    if (d.cwiseAbs().maxCoeff() == rho) {
      m = center + d;
      f(m);
    }
    int axis = g - 1;
    while (axis >= 0) {
      if (++d[axis] <= rho) break;
      d[axis] = -rho;
      --axis;
    }
    if (axis < 0) break;
  }
}

double shell_count(int g, long rho) {
  if (rho == 0) return 1.0;
  return std::pow(2.0 * rho + 1.0, g) - std::pow(2.0 * rho - 1.0, g);
}

// Certified bound on sum_{||m-center||_inf > rho} T exp(-kpi lam_min |m+mu|^2),
// using |m + mu|_inf >= r - off on shell r, off = ||center + mu||_inf <= 1/2.
double tail_bound(int g, int k, double lam_min, double big_t, double off, int rho) {
  double bound = 0.0;
  for (int r = rho + 1; r <= rho + 600; ++r) {
    const double dist = std::max(0.0, r - off);
    const double term = big_t * shell_count(g, r) * std::exp(-k * pi * lam_min * dist * dist);
    bound += term;
    if (term < 1e-300 || (bound > 0.0 && term < bound * 1e-18)) break;
  }
  return bound;
}

// Shell-ordered accumulation of sum_m term(m) whose magnitudes are dominated
// by T exp(-kpi (m+mu)^T Omega_2 (m+mu)).  Deterministic order.
ThetaResult sum_lattice(const LatticeData& data, const RVec& mu, double big_t,
                        const std::function<cd(const IVec&)>& term, double tol,
                        const TruncationOptions& opts) {
  const RMat im = 0.5 * (data.omega.imag() + data.omega.imag().transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(im);
  const double lam_min = es.eigenvalues().minCoeff();

  IVec center(data.g);
  for (int j = 0; j < data.g; ++j) center[j] = static_cast<int>(-std::lround(mu[j]));
  const double off = (center.cast<double>() + mu).cwiseAbs().maxCoeff();

  cd acc{0.0, 0.0};
  for (int rho = 0;; ++rho) {
    if (rho > opts.max_radius)
      throw TruncationFailureError("required shell radius exceeds max_radius = " +
                                   std::to_string(opts.max_radius));
    for_each_on_shell(center, rho, [&](const IVec& m) { acc += term(m); });
    const double bound = tail_bound(data.g, data.k, lam_min, big_t, off, rho);
    if (bound <= tol) return ThetaResult{acc, bound};
  }
}

cd quad_form(const Mat& omega, const RVec& v) {
  const Vec vc = v.cast<cd>();
  return (vc.transpose() * (omega * vc))(0);
}

}  // namespace

ThetaResult theta_eval(const LatticeData& data, const IVec& l, const Vec& z, double tol,
                       const TruncationOptions& opts) {
  validate(data);
  if (tol <= 0.0) throw InvalidParamsError("tol must be positive");
  if (l.size() != data.g || z.size() != data.g)
    throw InvalidParamsError("l and z must have length g");
  const IVec ln = normalize_characteristic(l, data.k);
  const RVec a = ln.cast<double>() / data.k;

  const RMat im = 0.5 * (data.omega.imag() + data.omega.imag().transpose());
  const RVec c = Eigen::LLT<RMat>(im).solve(RVec(z.imag()));
  const double big_t = std::exp(data.k * pi * c.dot(im * c));

  const auto term = [&](const IVec& m) {
    const RVec v = m.cast<double>() + a;
    const cd lin = (v.cast<cd>().transpose() * z)(0);
    return std::exp(iu * pi * static_cast<double>(data.k) * (quad_form(data.omega, v) + 2.0 * lin));
  };
  return sum_lattice(data, a + c, big_t, term, tol, opts);
}

ThetaResult theta_section_eval(const LatticeData& data, const IVec& l, const RVec& x,
                               const RVec& y, double tol, const TruncationOptions& opts) {
  validate(data);
  if (tol <= 0.0) throw InvalidParamsError("tol must be positive");
  if (l.size() != data.g || x.size() != data.g || y.size() != data.g)
    throw InvalidParamsError("l, x, y must have length g");
  const IVec ln = normalize_characteristic(l, data.k);
  const RVec a = ln.cast<double>() / data.k;

  const auto term = [&](const IVec& m) {
    const RVec w = y - m.cast<double>() - a;
    const double lin = (m.cast<double>() + a).dot(x);
    return std::exp(iu * pi * static_cast<double>(data.k) * (quad_form(data.omega, w) + 2.0 * lin));
  };
  ThetaResult r = sum_lattice(data, a - y, 1.0, term, tol, opts);
  r.value *= std::exp(-iu * pi * static_cast<double>(data.k) * x.dot(y));
  return r;
}

}  // namespace thetaquant
