#include "thetaquant/metaplectic.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "thetaquant/siegel.hpp"
#include "thetaquant/theta.hpp"

namespace thetaquant {

namespace {

cd unit_power(int m) {  // i^m
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void require_real_symmetric(const RMat& m, const char* name) {
  if (m.rows() != m.cols() || max_abs(RMat(m - m.transpose())) > 1e-12 * std::max(1.0, max_abs(m)))
    throw InvalidParamsError(std::string(name) + " must be symmetric");
}

Eigen::FullPivLU<Mat> shifted_lu(const MetaplecticGenerator& gen, const Mat& omega) {
  const Mat shifted = omega + gen.Q.cast<cd>();
  Eigen::FullPivLU<Mat> lu(shifted);
  if (!lu.isInvertible() || std::abs(shifted.determinant()) <= 1e-10)
    throw SingularShiftError("Omega + Q is singular; image leaves the chart");
  return lu;
}

MetaplecticGenerator single_factor(const RMat& m) {
  const int g = static_cast<int>(m.rows()) / 2;
  const RMat a = m.topLeftCorner(g, g);
  const RMat c = m.bottomLeftCorner(g, g);
  const RMat d = m.bottomRightCorner(g, g);
  const RMat cinv = c.inverse();
  return make_generator(a * cinv, cinv, cinv * d);
}

double c_block_det(const RMat& m) {
  const int g = static_cast<int>(m.rows()) / 2;
  return m.bottomLeftCorner(g, g).determinant();
}

}  // namespace

MetaplecticGenerator make_generator(const RMat& P, const RMat& L, const RMat& Q) {
  MetaplecticGenerator gen;
  gen.P = P;
  gen.L = L;
  gen.Q = Q;
  gen.m = (L.determinant() > 0.0) ? 0 : 1;
  validate(gen);
  return gen;
}

void validate(const MetaplecticGenerator& gen) {
  require_real_symmetric(gen.P, "P");
  require_real_symmetric(gen.Q, "Q");
  if (gen.L.rows() != gen.L.cols() || gen.L.rows() != gen.P.rows())
    throw InvalidParamsError("P, L, Q must be g x g");
  const double det = gen.L.determinant();
  if (std::abs(det) <= 1e-12) throw SingularLError("|det L| too small");
  const bool even = ((gen.m % 2) + 2) % 2 == 0;
  if (even != (det > 0.0))
    throw InvalidParamsError("index parity must satisfy (-1)^m = sign det L");
}

RMat generator_to_symplectic(const MetaplecticGenerator& gen) {
  validate(gen);
  const int g = static_cast<int>(gen.L.rows());
  const RMat linv = gen.L.inverse();
  RMat m(2 * g, 2 * g);
  m.topLeftCorner(g, g) = gen.P * linv;
  m.topRightCorner(g, g) = gen.P * linv * gen.Q - gen.L.transpose();
  m.bottomLeftCorner(g, g) = linv;
  m.bottomRightCorner(g, g) = linv * gen.Q;
  return m;
}

RMat projection(const MetaplecticElement& elem) {
  if (elem.factors.empty()) throw InvalidParamsError("element has no factors");
  RMat p = generator_to_symplectic(elem.factors.front());
  for (size_t i = 1; i < elem.factors.size(); ++i) p = p * generator_to_symplectic(elem.factors[i]);
  return p;
}

MetaplecticElement decompose_symplectic(const RMat& m) {
  require_symplectic(m);
  const int g = static_cast<int>(m.rows()) / 2;

  MetaplecticElement elem;
  if (std::abs(c_block_det(m)) > 1e-8) {
    elem.factors = {single_factor(m)};
  } else {
    const RMat eye = RMat::Identity(g, g);
    const MetaplecticGenerator flip = make_generator(RMat::Zero(g, g), -eye, RMat::Zero(g, g));
    // flip^{-1} M = [[-C, -D], [A, B]]: its C block is the A block of M.
    const RMat g_inv_m = generator_to_symplectic(flip).inverse() * m;
    if (std::abs(c_block_det(g_inv_m)) > 1e-8) {
      elem.factors = {flip, single_factor(g_inv_m)};
    } else {
      bool found = false;
      for (const double t : {1.0, 0.5, 1.0 / 3.0}) {
        const MetaplecticGenerator shear = make_generator(t * eye, eye, RMat::Zero(g, g));
        const RMat rest = generator_to_symplectic(shear).inverse() * m;
        if (std::abs(c_block_det(rest)) > 1e-8) {
          elem.factors = {shear, single_factor(rest)};
          found = true;
          break;
        }
      }
      if (!found)
        throw DecompositionFailureError("no two-factor split with an invertible C block found");
    }
  }

  if (max_abs(RMat(projection(elem) - m)) > 1e-10 * std::max(1.0, max_abs(m)))
    throw DecompositionFailureError("factor product does not reproduce M");

  GaussianState ref;
  ref.g = g;
  ref.k = 1;
  ref.amplitudes = Vec::Ones(1);
  ref.omega = iu * Mat::Identity(g, g);
  const GaussianState image = act(elem, ref);
  elem.reference_scalar = BranchedScalar{image.amplitudes[0], "reference Gaussian at iI"};
  return elem;
}

BranchedScalar gaussian_action_scalar(const MetaplecticGenerator& gen, const Mat& omega) {
  validate(gen);
  const int g = static_cast<int>(gen.L.rows());
  shifted_lu(gen, omega);  // gate on invertibility
  const BranchedScalar root = det_invsqrt_posreal(Mat(-iu * (omega + gen.Q.cast<cd>())));
  const cd value = unit_power(gen.m) * std::sqrt(std::abs(gen.L.determinant())) *
                   quarter_phase(-0.5 * g) * root.value;
  return BranchedScalar{value, "Gaussian-integral branch"};
}

GaussianState act_on_gaussian(const MetaplecticGenerator& gen, const GaussianState& state) {
  validate(state);
  auto lu = shifted_lu(gen, state.omega);
  const Mat lc = gen.L.cast<cd>();
  Mat omega_new = gen.P.cast<cd>() - gen.L.transpose().cast<cd>() * lu.solve(lc);
  omega_new = 0.5 * (omega_new + omega_new.transpose()).eval();

  GaussianState out = state;
  out.omega = omega_new;
  out.amplitudes = state.amplitudes * gaussian_action_scalar(gen, state.omega).value;
  validate(out);
  return out;
}

BranchedScalar act_on_halfform(const MetaplecticGenerator& gen, const Mat& omega) {
  validate(gen);
  const int g = static_cast<int>(gen.L.rows());
  shifted_lu(gen, omega);
  const BranchedScalar root = det_invsqrt_posreal(Mat(-iu * (omega + gen.Q.cast<cd>())));
  const cd value = unit_power(-gen.m) / std::sqrt(std::abs(gen.L.determinant())) *
                   quarter_phase(0.5 * g) / root.value;
  return BranchedScalar{value, "Gaussian-integral branch"};
}

GaussianState act(const MetaplecticElement& elem, const GaussianState& state) {
  GaussianState s = state;
  for (auto it = elem.factors.rbegin(); it != elem.factors.rend(); ++it) s = act_on_gaussian(*it, s);
  return s;
}

BranchedScalar halfform_scalar(const MetaplecticElement& elem, const Mat& omega) {
  cd total{1.0, 0.0};
  Mat om = omega;
  GaussianState probe;
  probe.g = static_cast<int>(omega.rows());
  probe.k = 1;
  probe.amplitudes = Vec::Ones(1);
  probe.omega = omega;
  for (auto it = elem.factors.rbegin(); it != elem.factors.rend(); ++it) {
    total *= act_on_halfform(*it, probe.omega).value;
    probe = act_on_gaussian(*it, probe);
  }
  return BranchedScalar{total, "Gaussian-integral branch along the Omega path"};
}

double sp_invariance_check(const RMat& m, const IVec& l, const Mat& omega, int k) {
  const int g = static_cast<int>(omega.rows());
  GaussianState state;
  state.g = g;
  state.k = k;
  state.amplitudes = Vec::Zero(charv_count(g, k));
  state.amplitudes[charv_to_index(normalize_characteristic(l, k), k)] = 1.0;
  state.omega = omega;

  const MetaplecticElement elem = decompose_symplectic(m);
  const GaussianState image = act(elem, state);
  const cd total = image.amplitudes[charv_to_index(normalize_characteristic(l, k), k)] *
                   halfform_scalar(elem, omega).value;
  const Mat target = sp_act_H(m, omega);
  return std::abs(total - cd{1.0, 0.0}) + max_abs(Mat(image.omega - target));
}

}  // namespace thetaquant
