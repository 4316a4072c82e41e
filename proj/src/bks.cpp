#include "thetaquant/bks.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <string>

#include "thetaquant/errors.hpp"
#include "thetaquant/quadrature.hpp"
#include "thetaquant/siegel.hpp"
#include "thetaquant/theta.hpp"

namespace thetaquant {

namespace {

constexpr double kBoundaryTol = 1e-8;

double unitary_defect(const Mat& tau) {
  const Mat eye = Mat::Identity(tau.rows(), tau.cols());
  return max_abs(Mat(tau.adjoint() * tau - eye));
}

void require_disc_point(const Mat& tau, const char* who) {
  if (tau.rows() != tau.cols() || tau.rows() < 1)
    throw InvalidParamsError(std::string(who) + ": tau must be square");
  if (!in_disc(tau, kBoundaryTol))
    throw InvalidParamsError(std::string(who) + ": tau is outside the closed disc");
}

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

// Width covering the decay exp(-pi xi^T R xi) of a quadrature integrand.
double window_for(const RMat& re_part, double requested) {
  if (requested > 0.0) return requested;
  Eigen::SelfAdjointEigenSolver<RMat> es(RMat(0.5 * (re_part + re_part.transpose())));
  const double lam = es.eigenvalues().minCoeff();
  if (lam <= 0.0) throw DegeneratePairError("quadrature integrand does not decay");
  return 4.0 / std::sqrt(lam);
}

Mat half_pairing_arg(int k, const Mat& omega, const Mat& omega_p) {
  return -iu / (2.0 * k) * (omega - omega_p.conjugate());
}

Mat prequantum_pairing_arg(int k, const Mat& omega, const Mat& omega_p) {
  return static_cast<double>(k) * iu * (omega_p.conjugate() - omega);
}

// All routes produce the pairing matrix against the same frame ordering;
// only the evaluation strategy differs.
Mat pairing_matrix_closed(const Mat& omega, const Mat& omega_p, int g, int k) {
  const long n = charv_count(g, k);
  const cd diag = prequantum_pairing(k, IVec::Zero(g), IVec::Zero(g), omega, omega_p) *
                  halfform_pairing(k, omega, omega_p).value;
  return diag * Mat::Identity(n, n);
}

Mat pairing_matrix_wb(const Mat& omega, const Mat& omega_p, int g, int k,
                      const PairingParams& params) {
  const long n = charv_count(g, k);
  // Component Gaussians share one integrand across characteristics and are
  // supported on disjoint index sets, so the matrix is a quadrature scalar
  // on the diagonal and exactly zero off it.
  const RMat rate =
      static_cast<double>(k) * 0.5 * (omega.imag() + omega_p.imag());
  const double w = window_for(rate, params.window);
  const cd pre = trapezoid_nd(
      [&](const RVec& y) {
        const Vec yc = y.cast<cd>();
        const cd qa = (yc.transpose() * (omega * yc))(0);
        const cd qb = (yc.transpose() * (omega_p * yc))(0);
        return std::exp(iu * pi * static_cast<double>(k) * (qa - std::conj(qb)));
      },
      g, w, params.quad_points);
  const Mat arg = half_pairing_arg(k, omega, omega_p);
  const double wh = window_for(arg.real(), params.window);
  const cd half = 1.0 / gaussian_integral_quadrature(arg, wh, params.quad_points);
  return (pre * half) * Mat::Identity(n, n);
}

Mat pairing_matrix_torus(const Mat& omega, const Mat& omega_p, int g, int k,
                         const PairingParams& params) {
  const long n = charv_count(g, k);
  const int grid = params.torus_n;
  if (grid < 2) throw InvalidParamsError("torus grid too small");
  LatticeData da{g, k, omega};
  LatticeData db{g, k, omega_p};
  const long cells = [&] {
    long c = 1;
    for (int d = 0; d < 2 * g; ++d) c *= grid;
    return c;
  }();

  std::vector<Vec> va(n), vb(n);
  for (long l = 0; l < n; ++l) {
    va[l] = Vec(cells);
    vb[l] = Vec(cells);
  }
  IVec j = IVec::Zero(2 * g);
  RVec x(g), y(g);
  for (long c = 0; c < cells; ++c) {
    for (int d = 0; d < g; ++d) {
      x[d] = static_cast<double>(j[d]) / grid;
      y[d] = static_cast<double>(j[g + d]) / grid;
    }
    for (long l = 0; l < n; ++l) {
      const IVec lv = index_to_charv(l, g, k);
      va[l][c] = theta_section_eval(da, lv, x, y, params.series_tol).value;
      vb[l][c] = theta_section_eval(db, lv, x, y, params.series_tol).value;
    }
    for (int axis = 2 * g - 1; axis >= 0; --axis) {
      if (++j[axis] < grid) break;
      j[axis] = 0;
    }
  }

  const Mat arg = half_pairing_arg(k, omega, omega_p);
  const double wh = window_for(arg.real(), params.window);
  const cd half = 1.0 / gaussian_integral_quadrature(arg, wh, params.quad_points);

  Mat p(n, n);
  for (long l = 0; l < n; ++l)
    for (long lp = 0; lp < n; ++lp)
      p(l, lp) = vb[lp].dot(va[l]) / static_cast<double>(cells) * half;
  return p;
}

}  // namespace

void validate(const QuantumVector& u) {
  if (u.g < 1 || u.k < 1) throw InvalidParamsError("quantum vector needs g >= 1 and k >= 1");
  require_disc_point(u.tau, "quantum vector");
  if (u.tau.rows() != u.g) throw InvalidParamsError("tau dimension does not match g");
  if (u.coeffs.size() != charv_count(u.g, u.k))
    throw InvalidParamsError("coefficient vector must have length k^g");
}

HalfFormFactor halfform_conversion(const Mat& tau) {
  require_disc_point(tau, "halfform_conversion");
  const Mat eye = Mat::Identity(tau.rows(), tau.cols());
  const BranchedScalar root =
      det_sqrt_path([&](double t) { return Mat(eye + t * tau); }, 64);
  return HalfFormFactor{tau, root};
}

BranchedScalar halfform_pairing(int k, const Mat& omega, const Mat& omega_p) {
  if (k < 1) throw InvalidParamsError("k must be >= 1");
  require_complex_symmetric(omega);
  require_complex_symmetric(omega_p);
  try {
    const BranchedScalar root = det_invsqrt_posreal(half_pairing_arg(k, omega, omega_p));
    return BranchedScalar{1.0 / root.value, root.anchor};
  } catch (const SingularMatrixError&) {
    throw DegeneratePairError("half-form pairing is singular for this pair");
  } catch (const RealPartNegativeError&) {
    throw DegeneratePairError("pair leaves the positive half-space");
  }
}

cd prequantum_pairing(int k, const IVec& l, const IVec& lp, const Mat& omega,
                      const Mat& omega_p) {
  if (k < 1) throw InvalidParamsError("k must be >= 1");
  require_complex_symmetric(omega);
  require_complex_symmetric(omega_p);
  if (l.size() != omega.rows() || lp.size() != omega.rows())
    throw InvalidParamsError("characteristic length must equal g");
  cd diag;
  try {
    diag = det_invsqrt_posreal(prequantum_pairing_arg(k, omega, omega_p)).value;
  } catch (const SingularMatrixError&) {
    throw DegeneratePairError("prequantum pairing is singular for this pair");
  } catch (const RealPartNegativeError&) {
    throw DegeneratePairError("pair leaves the positive half-space");
  }
  if (normalize_characteristic(l, k) != normalize_characteristic(lp, k)) return cd{0.0, 0.0};
  return diag;
}

double bks_frame_constant(int g, int k) {
  if (g < 1 || k < 1) throw InvalidParamsError("need g >= 1 and k >= 1");
  return std::pow(2.0 * k * k, -0.5 * g);
}

cd bks_pairing(const QuantumVector& u, const QuantumVector& v) {
  validate(u);
  validate(v);
  if (u.g != v.g || u.k != v.k) throw InvalidParamsError("pairing needs matching g and k");
  if (unitary_defect(u.tau) < kBoundaryTol && unitary_defect(v.tau) < kBoundaryTol &&
      transversality_gap(u.tau, v.tau) < kBoundaryTol)
    throw DegeneratePairError("boundary polarizations are not transverse");
  return bks_frame_constant(u.g, u.k) * v.coeffs.dot(u.coeffs);
}

double transversality_gap(const Mat& tau, const Mat& tau_p) {
  require_disc_point(tau, "transversality_gap");
  require_disc_point(tau_p, "transversality_gap");
  if (tau.rows() != tau_p.rows()) throw InvalidParamsError("mismatched genus");
  const int g = static_cast<int>(tau.rows());
  const Mat eye = Mat::Identity(g, g);
  Mat stacked(2 * g, 2 * g);
  stacked.topLeftCorner(g, g) = -iu * (eye - tau.conjugate());
  stacked.topRightCorner(g, g) = -iu * (eye - tau_p.conjugate());
  stacked.bottomLeftCorner(g, g) = eye + tau.conjugate();
  stacked.bottomRightCorner(g, g) = eye + tau_p.conjugate();
  Eigen::JacobiSVD<Mat> svd(stacked);
  return svd.singularValues().minCoeff();
}

Mat frame_pairing_matrix(const Mat& tau, const Mat& tau_p, int k, const PairingParams& params) {
  require_disc_point(tau, "frame_pairing_matrix");
  require_disc_point(tau_p, "frame_pairing_matrix");
  if (k < 1) throw InvalidParamsError("k must be >= 1");
  if (tau.rows() != tau_p.rows()) throw InvalidParamsError("mismatched genus");
  const int g = static_cast<int>(tau.rows());
  const Mat omega = cayley_inverse(tau);
  const Mat omega_p = cayley_inverse(tau_p);
  switch (params.route) {
    case PairingRoute::closed_form:
      return pairing_matrix_closed(omega, omega_p, g, k);
    case PairingRoute::wb_quadrature:
      return pairing_matrix_wb(omega, omega_p, g, k, params);
    case PairingRoute::torus_grid:
      return pairing_matrix_torus(omega, omega_p, g, k, params);
  }
  throw InvalidParamsError("unknown pairing route");
}

Mat frame_gram_matrix(const Mat& tau, int k, const PairingParams& params) {
  return frame_pairing_matrix(tau, tau, k, params);
}

Mat bks_map(const Mat& tau, const Mat& tau_p, int k, const PairingParams& params) {
  const Mat gram_p = frame_gram_matrix(tau_p, k, params);
  const Mat pairings = frame_pairing_matrix(tau, tau_p, k, params);
  Eigen::JacobiSVD<Mat> svd(gram_p);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > 1e6)
    throw IllConditionedGramError("target frame Gram matrix is ill-conditioned");
  // <B sigma^l, sigma^i> = <sigma^l, sigma^i> reads G'^T B = P^T columnwise.
  return Mat(gram_p.transpose().fullPivLu().solve(pairings.transpose()));
}

void validate(const HeisenbergElement& h, int k) {
  if (k < 1) throw InvalidParamsError("k must be >= 1");
  if (h.a.size() != h.b.size() || h.a.size() < 1)
    throw InvalidParamsError("translation data a, b must have equal positive length");
  if (std::abs(std::abs(h.lambda) - 1.0) > 1e-12)
    throw InvalidParamsError("lambda must have unit modulus");
}

HeisenbergElement heisenberg_product(const HeisenbergElement& h1, const HeisenbergElement& h2,
                                     int k) {
  validate(h1, k);
  validate(h2, k);
  if (h1.a.size() != h2.a.size()) throw InvalidParamsError("mismatched genus");
  const double cross = static_cast<double>(h1.b.dot(h2.a)) - static_cast<double>(h1.a.dot(h2.b));
  HeisenbergElement out;
  const IVec sum_a = h1.a + h2.a;
  const IVec sum_b = h1.b + h2.b;
  out.a = normalize_characteristic(sum_a, k);
  out.b = normalize_characteristic(sum_b, k);
  // Reducing a by k*m rescales the translation operator by (-1)^{m.b}, and
  // likewise for b; fold those signs into the central part so the reduced
  // element acts identically.
  const IVec ma = (sum_a - out.a) / k;
  const IVec mb = (sum_b - out.b) / k;
  const long flips = static_cast<long>(ma.dot(sum_b)) + static_cast<long>(out.a.dot(mb));
  const double sign = (flips % 2 == 0) ? 1.0 : -1.0;
  out.lambda = sign * h1.lambda * h2.lambda * std::exp(iu * pi * cross / static_cast<double>(k));
  return out;
}

Mat heisenberg_matrix(const HeisenbergElement& h, int g, int k) {
  validate(h, k);
  if (h.a.size() != g) throw InvalidParamsError("translation data length must equal g");
  const long n = charv_count(g, k);
  const double ab = static_cast<double>(h.a.dot(h.b));
  Mat m = Mat::Zero(n, n);
  for (long col = 0; col < n; ++col) {
    const IVec l = index_to_charv(col, g, k);
    const IVec shifted = l + h.b;
    const double la = static_cast<double>(shifted.dot(h.a));
    const long row = charv_to_index(shifted, k);
    m(row, col) = h.lambda * std::exp(iu * pi * ab / static_cast<double>(k)) *
                  std::exp(-2.0 * pi * iu * la / static_cast<double>(k));
  }
  return m;
}

QuantumVector heisenberg_act(const HeisenbergElement& h, const QuantumVector& u) {
  validate(u);
  QuantumVector out = u;
  out.coeffs = heisenberg_matrix(h, u.g, u.k) * u.coeffs;
  return out;
}

double intertwining_heisenberg_check(const Mat& tau, const Mat& tau_p, const HeisenbergElement& h,
                                     int k, const PairingParams& params) {
  const int g = static_cast<int>(tau.rows());
  const Mat b = bks_map(tau, tau_p, k, params);
  const Mat hm = heisenberg_matrix(h, g, k);
  return max_abs(Mat(b * hm - hm * b));
}

namespace {

std::string matrix_key(const RMat& m) {
  std::string key;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      key += std::to_string(static_cast<long long>(std::llround(m(i, j)))) + ",";
  return key;
}

bool moves_minus_one_to(const RMat& m, const Mat& tau) {
  const int g = static_cast<int>(tau.rows());
  try {
    const Mat image = sp_act_D(m, Mat(-Mat::Identity(g, g)));
    return max_abs(Mat(image - tau)) < 1e-10;
  } catch (const Error&) {
    return false;
  }
}

// Integer symplectic generators: the standard form plus upper and lower
// elementary shears over a symmetric integer basis.
std::vector<RMat> integer_generators(int g) {
  std::vector<RMat> gens;
  gens.push_back(standard_form(g));
  gens.push_back(RMat(standard_form(g).transpose()));  // inverse of the above
  const RMat eye = RMat::Identity(g, g);
  std::vector<RMat> basis;
  for (int i = 0; i < g; ++i) {
    RMat e = RMat::Zero(g, g);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < g; ++i)
    for (int j = i + 1; j < g; ++j) {
      RMat e = RMat::Zero(g, g);
      e(i, j) = e(j, i) = 1.0;
      basis.push_back(e);
    }
  for (const RMat& s : basis)
    for (double sign : {1.0, -1.0}) {
      RMat upper = RMat::Identity(2 * g, 2 * g);
      upper.topRightCorner(g, g) = sign * s;
      gens.push_back(upper);
      RMat lower = RMat::Identity(2 * g, 2 * g);
      lower.bottomLeftCorner(g, g) = sign * s;
      gens.push_back(lower);
    }
  return gens;
}

std::optional<RMat> search_transform(const Mat& tau, int bound) {
  const int g = static_cast<int>(tau.rows());
  if (moves_minus_one_to(RMat::Identity(2 * g, 2 * g), tau))
    return RMat::Identity(2 * g, 2 * g);
  if (g == 1) {
    for (int a = -bound; a <= bound; ++a)
      for (int b = -bound; b <= bound; ++b)
        for (int c = -bound; c <= bound; ++c)
          for (int d = -bound; d <= bound; ++d) {
            if (a * d - b * c != 1) continue;
            RMat m(2, 2);
            m << a, b, c, d;
            if (moves_minus_one_to(m, tau)) return m;
          }
    return std::nullopt;
  }
  // Breadth-first search over short generator words, shortest first.
  const auto gens = integer_generators(g);
  const int max_len = std::min(bound, 6);
  std::map<std::string, bool> seen;
  std::deque<RMat> frontier{RMat::Identity(2 * g, 2 * g)};
  seen[matrix_key(frontier.front())] = true;
  long visited = 0;
  for (int len = 0; len < max_len && !frontier.empty(); ++len) {
    std::deque<RMat> next;
    for (const RMat& word : frontier)
      for (const RMat& gen : gens) {
        const RMat cand = word * gen;
        if (max_abs(cand) > 64.0) continue;
        const std::string key = matrix_key(cand);
        if (seen.count(key)) continue;
        seen[key] = true;
        if (moves_minus_one_to(cand, tau)) return cand;
        next.push_back(cand);
        if (++visited > 200000) return std::nullopt;
      }
    frontier.swap(next);
  }
  return std::nullopt;
}

}  // namespace

BohrSommerfeldData bohr_sommerfeld(const Mat& tau, int k, int search_bound) {
  require_disc_point(tau, "bohr_sommerfeld");
  if (k < 1 || search_bound < 1) throw InvalidParamsError("need k >= 1 and search_bound >= 1");
  if (unitary_defect(tau) > kBoundaryTol)
    throw NotReducibleError("tau is not a boundary polarization");
  const int g = static_cast<int>(tau.rows());
  const auto m = search_transform(tau, search_bound);
  if (!m) throw NoIntegerTransformFoundError("no integer symplectic transform within the bound");

  BohrSommerfeldData out;
  out.tau = tau;
  out.transform = *m;
  const long n = charv_count(g, k);
  for (long idx = 0; idx < n; ++idx) {
    const IVec l = index_to_charv(idx, g, k);
    RVec anchor = RVec::Zero(2 * g);
    for (int d = 0; d < g; ++d) anchor[g + d] = static_cast<double>(l[d]) / k;
    Fiber fiber;
    fiber.basepoint = (*m * anchor).unaryExpr([](double v) { return wrap_unit(v); });
    fiber.directions = m->leftCols(g);
    out.fibers.push_back(std::move(fiber));
  }
  return out;
}

namespace {

Mat regularized_period(const Mat& tau, double eps) {
  const int g = static_cast<int>(tau.rows());
  const Mat eye = Mat::Identity(g, g);
  if (max_abs(Mat(tau + eye)) < kBoundaryTol) return (iu / eps) * eye;
  return cayley_inverse(tau) + iu * eps * eye;
}

}  // namespace

double intersection_pairing_check(const Mat& tau, const Mat& tau_p, int k,
                                  const std::vector<double>& eps_schedule) {
  require_disc_point(tau, "intersection_pairing_check");
  require_disc_point(tau_p, "intersection_pairing_check");
  if (k < 1) throw InvalidParamsError("k must be >= 1");
  if (eps_schedule.empty()) throw InvalidParamsError("empty regularization schedule");
  if (unitary_defect(tau) > kBoundaryTol || unitary_defect(tau_p) > kBoundaryTol)
    throw InvalidParamsError("expected two boundary polarizations");
  if (transversality_gap(tau, tau_p) < kBoundaryTol)
    throw NotTransverseError("boundary polarizations intersect");

  const int g = static_cast<int>(tau.rows());
  const double target = bks_frame_constant(g, k);
  const IVec zero = IVec::Zero(g);
  double worst = 0.0;
  cd prev{0.0, 0.0};
  bool have_prev = false;
  for (double eps : eps_schedule) {
    const Mat omega = regularized_period(tau, eps);
    const Mat omega_p = regularized_period(tau_p, eps);
    const cd value =
        prequantum_pairing(k, zero, zero, omega, omega_p) * halfform_pairing(k, omega, omega_p).value;
    worst = std::max(worst, std::abs(value - target));
    if (have_prev) worst = std::max(worst, std::abs(value - prev));
    prev = value;
    have_prev = true;
  }
  return worst;
}

Mat smatrix_limit(int k, const std::vector<double>& eps_schedule) {
  if (k < 1) throw InvalidParamsError("k must be >= 1");
  if (eps_schedule.empty()) throw InvalidParamsError("empty regularization schedule");
  const RVec samples = (RVec(3) << 0.1, 0.2, 0.37).finished();

  Mat prev;
  for (double eps : eps_schedule) {
    LatticeData data{1, k, Mat::Constant(1, 1, iu * eps)};
    Mat s(k, k);
    for (int l = 0; l < k; ++l) {
      for (int n = 0; n < k; ++n) {
        const double x = static_cast<double>(n) / k;
        cd acc{0.0, 0.0};
        for (Eigen::Index si = 0; si < samples.size(); ++si) {
          const double y = samples[si];
          const cd section = theta_section_eval(data, IVec::Constant(1, l),
                                                RVec::Constant(1, x), RVec::Constant(1, y), 1e-12)
                                 .value;
          // Strip the auxiliary chart prefactor before averaging.
          acc += section * std::exp(iu * pi * static_cast<double>(k) * x * y);
        }
        s(n, l) = acc / static_cast<double>(samples.size());
      }
      s.col(l) /= s.col(l).norm();
    }
    if (prev.size() && max_abs(Mat(s - prev)) > 1e-6)
      throw ConvergenceFailureError("sampled matrices disagree across the schedule");
    prev = s;
  }
  return prev;
}

}  // namespace thetaquant
