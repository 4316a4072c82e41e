#include "thetaquant/verify.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <thread>

#include "thetaquant/bks.hpp"
#include "thetaquant/errors.hpp"
#include "thetaquant/matrix_core.hpp"
#include "thetaquant/metaplectic.hpp"
#include "thetaquant/quadrature.hpp"
#include "thetaquant/random.hpp"
#include "thetaquant/siegel.hpp"
#include "thetaquant/theta.hpp"
#include "thetaquant/tropical.hpp"
#include "thetaquant/weil_brezin.hpp"

namespace thetaquant {

void validate(const RunConfig& config) {
  if (config.g < 1 || config.g > 4) throw ConfigInvalidError("g must be in [1, 4]");
  if (config.k < 1 || config.k > 8) throw ConfigInvalidError("k must be in [1, 8]");
  if (config.threads < 0 || config.threads > 64)
    throw ConfigInvalidError("threads must be in [0, 64]");
}

int resolve_threads(const RunConfig& config) {
  if (config.threads > 0) return config.threads;
  if (const char* env = std::getenv("THETAQUANT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return std::min(n, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(4u, hw ? hw : 1u));
}

namespace {

long ipow(int b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// A case reports a residual and the gate it must stay under; the runner
// derives pass/fail and catches escaping exceptions as failures.
struct Outcome {
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

using CaseFn = std::function<Outcome(const RunConfig&, std::mt19937_64&)>;

struct CaseDef {
  std::string name;
  CaseFn fn;
};

double rel_diff(cd a, cd b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

Vec random_cvec(std::mt19937_64& rng, long n) {
  Vec v(n);
  for (long i = 0; i < n; ++i)
    v[i] = cd{uniform_range(rng, -1.0, 1.0), uniform_range(rng, -1.0, 1.0)};
  return v;
}

// Interior period matrix with Im >= I, keeping grid transforms alias-free
// at moderate N.
Mat stiff_siegel(std::mt19937_64& rng, int g) {
  const RMat o1 = random_symmetric(rng, g, 0.5);
  RMat r(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) r(i, j) = uniform_range(rng, -1.0, 1.0);
  const RMat o2 = 0.2 * (r.transpose() * r) + RMat::Identity(g, g);
  return o1.cast<cd>() + iu * o2.cast<cd>();
}

cd gaussian_quadratic(const Mat& omega, int k, const RVec& y) {
  const Vec yc = y.cast<cd>();
  return std::exp(iu * pi * static_cast<double>(k) * (yc.transpose() * (omega * yc))(0));
}

template <typename E>
Outcome expect_error(const std::function<void()>& body, const std::string& label) {
  try {
    body();
  } catch (const E&) {
    return {0.0, 0.5, label + ": rejected as required"};
  } catch (const Error& e) {
    return {1.0, 0.5, label + ": wrong error type: " + e.what()};
  }
  return {1.0, 0.5, label + ": no error raised"};
}

// ---------------------------------------------------------------- theta ----

std::vector<CaseDef> theta_cases() {
  std::vector<CaseDef> cases;

  cases.push_back({"theta/anchor-value", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    LatticeData data{1, 1, Mat::Constant(1, 1, iu)};
    const cd value = theta_eval(data, IVec::Zero(1), Vec::Zero(1), 1e-13).value;
    return {std::abs(value - 1.08643481121331), 1e-12, ""};
  }});

  cases.push_back({"theta/vertical-period", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    // One full Omega-translate at Omega = i rescales by e^{pi - 2 pi i z}.
    LatticeData data{1, 1, Mat::Constant(1, 1, iu)};
    const cd z{0.31, 0.17};
    const cd lhs = theta_eval(data, IVec::Zero(1), Vec::Constant(1, z + iu), 1e-13).value;
    const cd rhs =
        std::exp(pi - 2.0 * pi * iu * z) * theta_eval(data, IVec::Zero(1), Vec::Constant(1, z), 1e-13).value;
    return {rel_diff(lhs, rhs), 1e-10, ""};
  }});

  cases.push_back({"theta/lattice-translation", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g, k = cfg.k;
    LatticeData data{g, k, random_siegel(rng, g)};
    IVec l(g), nvec(g), mvec(g);
    RVec x(g), y(g);
    for (int d = 0; d < g; ++d) {
      l[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
      nvec[d] = static_cast<int>(rng() % 5) - 2;
      mvec[d] = static_cast<int>(rng() % 5) - 2;
      x[d] = uniform_unit(rng);
      y[d] = uniform_unit(rng);
    }
    const cd base = theta_section_eval(data, l, x, y, 1e-13).value;
    const RVec xs = x + nvec.cast<double>();
    const RVec ys = y + mvec.cast<double>();
    const cd shifted = theta_section_eval(data, l, xs, ys, 1e-13).value;
    const double ny = nvec.cast<double>().dot(y + mvec.cast<double>());
    const double xm = x.dot(mvec.cast<double>());
    const cd factor = std::exp(-iu * pi * static_cast<double>(k) * ny) *
                      std::exp(iu * pi * static_cast<double>(k) * xm);
    return {rel_diff(shifted, factor * base), 1e-9, ""};
  }});

  cases.push_back({"theta/error-bound", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2);
    LatticeData data{g, cfg.k, random_siegel(rng, g)};
    Vec z(g);
    for (int d = 0; d < g; ++d) z[d] = cd{uniform_range(rng, -1.0, 1.0), uniform_range(rng, -0.3, 0.3)};
    const IVec l = IVec::Zero(g);
    const ThetaResult loose = theta_eval(data, l, z, 1e-4);
    const ThetaResult tight = theta_eval(data, l, z, 1e-13);
    const double diff = std::abs(loose.value - tight.value);
    double residual = std::max(0.0, diff - loose.error_bound - 1e-15);
    if (loose.error_bound > 1e-4) residual = std::max(residual, loose.error_bound - 1e-4);
    return {residual, 0.0, ""};
  }});

  cases.push_back({"theta/truncation-guard", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    return expect_error<TruncationFailureError>([] {
      LatticeData data{1, 1, Mat::Constant(1, 1, iu * 5e-3)};
      TruncationOptions opts;
      opts.max_radius = 2;
      theta_eval(data, IVec::Zero(1), Vec::Zero(1), 1e-12, opts);
    }, "shell cap");
  }});

  cases.push_back({"theta/component-transform", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2), k = cfg.k;
    const int n = k * (g == 1 ? 12 : 8);
    LatticeData data{g, k, stiff_siegel(rng, g)};
    const long kg = charv_count(g, k);
    const long l_pick = static_cast<long>(rng() % static_cast<unsigned>(kg));
    const IVec l = index_to_charv(l_pick, g, k);

    SampledSection s;
    s.g = g;
    s.k = k;
    s.N = n;
    s.data = Vec(ipow(n, 2 * g));
    const long ng = ipow(n, g);
    IVec jx(g), jy(g);
    RVec x(g), y(g);
    for (long fy = 0; fy < ng; ++fy) {
      long rem = fy;
      for (int d = g - 1; d >= 0; --d) { jy[d] = static_cast<int>(rem % n); rem /= n; }
      for (int d = 0; d < g; ++d) y[d] = static_cast<double>(jy[d]) / n;
      for (long fx = 0; fx < ng; ++fx) {
        long r2 = fx;
        for (int d = g - 1; d >= 0; --d) { jx[d] = static_cast<int>(r2 % n); r2 /= n; }
        for (int d = 0; d < g; ++d) x[d] = static_cast<double>(jx[d]) / n;
        s.data[section_index(s, jx, jy)] = theta_section_eval(data, l, x, y, 1e-13).value;
      }
    }

    const WBVector v = wb_forward(s);
    double worst = 0.0;
    for (long li = 0; li < kg; ++li) {
      const auto& comp = v.comps[static_cast<size_t>(li)];
      const long cells = comp.values.size();
      IVec q(g);
      RVec yy(g);
      for (long c = 0; c < cells; ++c) {
        long rem = c;
        for (int d = g - 1; d >= 0; --d) { q[d] = static_cast<int>(rem % comp.extent); rem /= comp.extent; }
        for (int d = 0; d < g; ++d) yy[d] = static_cast<double>(comp.base[d] + q[d]) / n;
        const cd want = (li == l_pick) ? gaussian_quadratic(data.omega, k, yy) : cd{0.0, 0.0};
        worst = std::max(worst, std::abs(comp.values[c] - want));
      }
    }
    return {worst, 1e-9, ""};
  }});

  return cases;
}

// ------------------------------------------------------------------- wb ----

std::vector<CaseDef> wb_cases() {
  std::vector<CaseDef> cases;

  cases.push_back({"wb/round-trip", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2), k = cfg.k, n = 6 * k;
    SampledSection s;
    s.g = g;
    s.k = k;
    s.N = n;
    s.data = random_cvec(rng, ipow(n, 2 * g));
    const SampledSection back = wb_inverse(wb_forward(s));
    return {max_abs(Mat((back.data - s.data).asDiagonal())), 1e-12, ""};
  }});

  cases.push_back({"wb/parseval", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2), k = cfg.k, n = 6 * k;
    SampledSection s, sp;
    s.g = sp.g = g;
    s.k = sp.k = k;
    s.N = sp.N = n;
    s.data = random_cvec(rng, ipow(n, 2 * g));
    sp.data = random_cvec(rng, ipow(n, 2 * g));
    const auto [torus, comps] = wb_unitarity_check(s, sp);
    return {rel_diff(torus, comps), 1e-12, ""};
  }});

  cases.push_back({"wb/gaussian-forward", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2), k = cfg.k;
    const int n = k * (g == 1 ? 12 : 8);
    GaussianState state;
    state.g = g;
    state.k = k;
    state.omega = stiff_siegel(rng, g);
    state.amplitudes = random_cvec(rng, charv_count(g, k));
    const WBVector v = wb_forward(wb_inverse(state, n));
    double worst = 0.0;
    for (long li = 0; li < charv_count(g, k); ++li) {
      const auto& comp = v.comps[static_cast<size_t>(li)];
      IVec q(g);
      RVec yy(g);
      for (long c = 0; c < comp.values.size(); ++c) {
        long rem = c;
        for (int d = g - 1; d >= 0; --d) { q[d] = static_cast<int>(rem % comp.extent); rem /= comp.extent; }
        for (int d = 0; d < g; ++d) yy[d] = static_cast<double>(comp.base[d] + q[d]) / n;
        const cd want = state.amplitudes[li] * gaussian_quadratic(state.omega, k, yy);
        worst = std::max(worst, std::abs(comp.values[c] - want));
      }
    }
    return {worst, 1e-9, ""};
  }});

  cases.push_back({"wb/narrow-peak", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    const int k = cfg.k, n = 4 * k;
    GaussianState state;
    state.g = 1;
    state.k = k;
    state.omega = Mat::Constant(1, 1, iu * 1e4);
    state.amplitudes = Vec::Ones(k);
    const SampledSection s = wb_inverse(state, n);
    IVec zero = IVec::Zero(1);
    double on_line = 0.0, off_line = 0.0;
    for (int jx = 0; jx < n; ++jx) {
      const IVec jxv = IVec::Constant(1, jx);
      on_line = std::max(on_line, std::abs(s.data[section_index(s, jxv, zero)]));
      const IVec mid = IVec::Constant(1, n / (2 * k));
      off_line = std::max(off_line, std::abs(s.data[section_index(s, jxv, mid)]));
    }
    return {off_line / std::max(on_line, 1e-300), 1e-10, ""};
  }});

  cases.push_back({"wb/xi-kernel-interior", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g;
    const Mat tau = cayley(random_siegel(rng, g));
    const auto kernel = xi_kernel(XiOperator{tau, cfg.k}, g);
    if (!std::holds_alternative<GaussianState>(kernel))
      return {1.0, 0.5, "expected a Gaussian kernel for interior tau"};
    const Mat omega = std::get<GaussianState>(kernel).omega;
    const double zero_res = xi_residual(tau, omega);
    const double moved = xi_residual(tau, Mat(omega + 0.3 * iu * Mat::Identity(g, g)));
    double residual = zero_res;
    if (moved < 1e-3) residual = std::max(residual, 1.0);  // must not be vacuous
    return {residual, 1e-10, ""};
  }});

  cases.push_back({"wb/xi-kernel-vertical", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    const int g = cfg.g;
    const Mat tau = -Mat::Identity(g, g);
    const auto kernel = xi_kernel(XiOperator{tau, cfg.k}, g);
    if (!std::holds_alternative<DeltaState>(kernel))
      return {1.0, 0.5, "expected a point mass at tau = -1"};
    return {std::get<DeltaState>(kernel).support.cwiseAbs().maxCoeff(), 1e-14, ""};
  }});

  cases.push_back({"wb/xi-transport", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    // Moving a mismatched pair (tau, Omega) by one generator multiplies the
    // defect matrix by the intertwiner on the left and the Gaussian shift
    // on the right.
    const int g = cfg.g;
    const MetaplecticGenerator gen = random_generator(rng, g);
    const RMat m = generator_to_symplectic(gen);
    const Mat tau = cayley(random_siegel(rng, g));
    const Mat omega = random_siegel(rng, g);
    const Mat eye = Mat::Identity(g, g);

    GaussianState state;
    state.g = g;
    state.k = 1;
    state.amplitudes = Vec::Ones(1);
    state.omega = omega;
    const Mat omega_p = act_on_gaussian(gen, state).omega;
    const Mat tau_p = sp_act_D(m, tau);

    const Mat defect = iu * (tau + eye) * omega - (tau - eye);
    const Mat defect_p = iu * (tau_p + eye) * omega_p - (tau_p - eye);
    const Mat shift =
        Eigen::FullPivLU<Mat>(omega + gen.Q.cast<cd>()).solve(gen.L.cast<cd>());
    const Mat transported = xi_intertwiner(m, tau_p) * defect * shift;
    const double scale = std::max(1.0, max_abs(defect_p));
    return {max_abs(Mat(defect_p - transported)) / scale, 1e-8, ""};
  }});

  cases.push_back({"wb/intertwining-generator", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g;
    const RMat m = generator_to_symplectic(random_generator(rng, g));
    const Mat tau = cayley(random_siegel(rng, g));
    return {intertwining_check(m, tau), 1e-8, ""};
  }});

  cases.push_back({"wb/grid-guard", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    return expect_error<GridTooCoarseError>([] {
      SampledSection s;
      s.g = 1;
      s.k = 4;
      s.N = 6;  // even, but not a multiple of k
      s.data = Vec::Zero(36);
      wb_forward(s);
    }, "grid divisibility");
  }});

  return cases;
}

// ------------------------------------------------------------ metaplectic ----

std::vector<CaseDef> metaplectic_cases() {
  std::vector<CaseDef> cases;

  cases.push_back({"mp/standard-flip", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    RMat m(2, 2);
    m << 0, -1, 1, 0;
    const MetaplecticElement elem = decompose_symplectic(m);
    double residual = std::abs(static_cast<double>(elem.factors.size()) - 1.0);
    residual += max_abs(RMat(projection(elem) - m));
    GaussianState state;
    state.g = 1;
    state.k = 1;
    state.amplitudes = Vec::Ones(1);
    state.omega = Mat::Constant(1, 1, iu);
    const GaussianState image = act(elem, state);
    residual += std::abs(image.amplitudes[0] - std::exp(-iu * pi / 4.0));
    residual += max_abs(Mat(image.omega - state.omega));
    return {residual, 1e-12, ""};
  }});

  cases.push_back({"mp/identity-element", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g;
    const MetaplecticElement elem = decompose_symplectic(RMat::Identity(2 * g, 2 * g));
    double residual = max_abs(RMat(projection(elem) - RMat::Identity(2 * g, 2 * g)));
    GaussianState state;
    state.g = g;
    state.k = 1;
    state.amplitudes = Vec::Ones(1);
    state.omega = random_siegel(rng, g);
    const GaussianState image = act(elem, state);
    residual += std::abs(image.amplitudes[0] - 1.0);
    residual += max_abs(Mat(image.omega - state.omega));
    return {residual, 1e-10, ""};
  }});

  cases.push_back({"mp/kernel-quadrature", [](const RunConfig&, std::mt19937_64& rng) -> Outcome {
    // The closed-form action must match the integral operator with kernel
    // i^m |det L|^{1/2} k^{1/2} e^{-i pi/4} e^{k pi i (P u^2 - 2 L u v + Q v^2)}.
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const MetaplecticGenerator gen = random_generator(rng, 1);
      const int k = 1 + static_cast<int>(rng() % 2);
      const Mat omega = random_siegel(rng, 1);
      GaussianState state;
      state.g = 1;
      state.k = k;
      state.amplitudes = Vec::Ones(k);
      state.omega = omega;
      const GaussianState image = act_on_gaussian(gen, state);

      const double p = gen.P(0, 0), q = gen.Q(0, 0), lmat = gen.L(0, 0);
      cd im{0.0, 1.0};
      cd unit = 1.0;
      for (int t = 0; t < ((gen.m % 4) + 4) % 4; ++t) unit *= im;
      const cd front = unit * std::sqrt(std::abs(lmat)) * std::sqrt(static_cast<double>(k)) *
                       std::exp(-iu * pi / 4.0);
      for (double u : {0.2, -0.7}) {
        const cd lhs = trapezoid_nd(
            [&](const RVec& vv) {
              const double v = vv[0];
              const cd phase = iu * pi * static_cast<double>(k) *
                               (p * u * u - 2.0 * lmat * u * v + q * v * v);
              const cd gaussian = std::exp(iu * pi * static_cast<double>(k) * omega(0, 0) * v * v);
              return front * std::exp(phase) * gaussian;
            },
            1, 8.0, 2048);
        const cd rhs = image.amplitudes[0] *
                       std::exp(iu * pi * static_cast<double>(k) * image.omega(0, 0) * u * u);
        worst = std::max(worst, rel_diff(lhs, rhs));
      }
    }
    return {worst, 1e-6, ""};
  }});

  cases.push_back({"mp/composition", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g;
    const RMat m = random_symplectic(rng, g);
    const MetaplecticElement elem = decompose_symplectic(m);
    const double scale = std::max(1.0, max_abs(m));
    double residual = max_abs(RMat(projection(elem) - m)) / scale;
    GaussianState state;
    state.g = g;
    state.k = cfg.k;
    state.amplitudes = random_cvec(rng, charv_count(g, cfg.k));
    state.omega = random_siegel(rng, g);
    const GaussianState image = act(elem, state);
    GaussianState chained = state;
    for (auto it = elem.factors.rbegin(); it != elem.factors.rend(); ++it)
      chained = act_on_gaussian(*it, chained);
    residual += max_abs(Mat((image.amplitudes - chained.amplitudes).asDiagonal()));
    residual += max_abs(Mat(image.omega - sp_act_H(m, state.omega)));
    return {residual, 1e-9, ""};
  }});

  cases.push_back({"mp/shear-fallback", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    // Both C and the post-flip C block are singular; the shear branch must
    // still produce a valid two-factor decomposition.
    RMat m = RMat::Zero(4, 4);
    m(0, 0) = 1.0;               // A = diag(1, 0)
    m(1, 3) = -1.0;              // B = diag(0, -1)
    m(3, 1) = 1.0;               // C = diag(0, 1)
    m(2, 2) = 1.0;               // D = diag(1, 0)
    require_symplectic(m);
    const MetaplecticElement elem = decompose_symplectic(m);
    double residual = max_abs(RMat(projection(elem) - m));
    residual += std::abs(static_cast<double>(elem.factors.size()) - 2.0);
    GaussianState state;
    state.g = 2;
    state.k = 1;
    state.amplitudes = Vec::Ones(1);
    state.omega = iu * Mat::Identity(2, 2);
    const GaussianState image = act(elem, state);
    residual += max_abs(Mat(image.omega - sp_act_H(m, state.omega)));
    return {residual, 1e-9, ""};
  }});

  cases.push_back({"mp/halfform-times-action", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g;
    const MetaplecticGenerator gen = random_generator(rng, g);
    const Mat omega = random_siegel(rng, g);
    const cd prod = act_on_halfform(gen, omega).value * gaussian_action_scalar(gen, omega).value;
    return {std::abs(prod - 1.0), 1e-13, ""};
  }});

  cases.push_back({"mp/halfform-square", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g;
    const RMat m = random_symplectic(rng, g);
    const Mat omega = random_siegel(rng, g);
    const MetaplecticElement elem = decompose_symplectic(m);
    const cd square = halfform_scalar(elem, omega).value * halfform_scalar(elem, omega).value;
    const Mat c = m.bottomLeftCorner(g, g).cast<cd>();
    const Mat d = m.bottomRightCorner(g, g).cast<cd>();
    const cd det = Mat(c * omega + d).determinant();
    return {rel_diff(square, det), 1e-9, ""};
  }});

  cases.push_back({"mp/frame-invariance", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g, k = cfg.k;
    double worst = 0.0;
    for (int trial = 0; trial < 2; ++trial) {
      const RMat m = trial == 0 ? generator_to_symplectic(random_generator(rng, g))
                                : random_symplectic(rng, g);
      IVec l(g);
      for (int d = 0; d < g; ++d) l[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
      worst = std::max(worst, sp_invariance_check(m, l, random_siegel(rng, g), k));
    }
    return {worst, 1e-9, ""};
  }});

  cases.push_back({"mp/branch-loop", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    // det goes once around the origin; the continued square root must end
    // at -1, not the principal +1.  Cross-checked by a fixed fine walk.
    const auto path = [](double t) {
      return Mat(std::exp(iu * pi * t) * Mat::Identity(2, 2));
    };
    const cd tracked = det_sqrt_path(path, 64).value;
    double total = 0.0;
    cd prev = path(0.0).determinant();
    const int steps = 20000;
    for (int i = 1; i <= steps; ++i) {
      const cd det = path(static_cast<double>(i) / steps).determinant();
      total += std::arg(det / prev);
      prev = det;
    }
    const cd oracle = std::sqrt(std::abs(prev)) * std::exp(iu * (total / 2.0));
    double residual = std::abs(tracked - oracle);
    residual += std::abs(tracked - cd{-1.0, 0.0});
    return {residual, 1e-10, ""};
  }});

  cases.push_back({"mp/det-invsqrt-quadrature", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2);
    RMat r(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) r(i, j) = uniform_range(rng, -1.0, 1.0);
    const Mat m = (r.transpose() * r + 0.5 * RMat::Identity(g, g)).cast<cd>() +
                  iu * random_symmetric(rng, g, 0.8).cast<cd>();
    const cd closed = det_invsqrt_posreal(m).value;
    Eigen::SelfAdjointEigenSolver<RMat> es(RMat(m.real()));
    const double w = 4.0 / std::sqrt(es.eigenvalues().minCoeff());
    const cd quad = gaussian_integral_quadrature(m, w, g == 1 ? 2000 : 500);
    return {rel_diff(closed, quad), 1e-8, ""};
  }});

  cases.push_back({"mp/chart-consistency", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g;
    const Mat omega = random_siegel(rng, g);
    const RMat m = random_symplectic(rng, g);
    const Mat tau = cayley(omega);
    double residual = max_abs(Mat(cayley_inverse(tau) - omega));
    residual += max_abs(Mat(cayley(sp_act_H(m, omega)) - sp_act_D(m, tau)));
    if (!in_disc(tau)) residual = std::max(residual, 1.0);
    const RMat j = complex_structure(omega);
    residual += max_abs(RMat(j * j + RMat::Identity(2 * g, 2 * g)));
    return {residual, 1e-9, ""};
  }});

  return cases;
}

// ------------------------------------------------------------------ bks ----

std::vector<CaseDef> bks_cases() {
  std::vector<CaseDef> cases;

  cases.push_back({"bks/pairing-anchors", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    const Mat oi = Mat::Constant(1, 1, iu);
    const Mat o2i = Mat::Constant(1, 1, 2.0 * iu);
    double residual = std::abs(halfform_pairing(1, oi, oi).value - 1.0);
    residual += std::abs(halfform_pairing(1, oi, o2i).value - std::sqrt(1.5));
    const IVec zero = IVec::Zero(1);
    residual += std::abs(prequantum_pairing(1, zero, zero, oi, oi) - std::pow(2.0, -0.5));
    residual += std::abs(prequantum_pairing(1, zero, zero, oi, o2i) - std::pow(3.0, -0.5));
    residual += std::abs(bks_frame_constant(2, 3) - 1.0 / 18.0);
    return {residual, 1e-12, ""};
  }});

  cases.push_back({"bks/constant-everywhere", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g, k = cfg.k;
    const Mat omega = random_siegel(rng, g);
    const Mat omega_p = random_siegel(rng, g);
    const IVec zero = IVec::Zero(g);
    const cd value =
        prequantum_pairing(k, zero, zero, omega, omega_p) * halfform_pairing(k, omega, omega_p).value;
    return {rel_diff(value, bks_frame_constant(g, k)), 1e-10, ""};
  }});

  cases.push_back({"bks/gram-quadrature", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2), k = cfg.k;
    const Mat tau = cayley(random_siegel(rng, g));
    const Mat tau_p = cayley(random_siegel(rng, g));
    PairingParams params;
    params.route = PairingRoute::wb_quadrature;
    params.quad_points = g == 1 ? 2048 : 400;
    const Mat quad = frame_pairing_matrix(tau, tau_p, k, params);
    const Mat closed = frame_pairing_matrix(tau, tau_p, k, {});
    return {max_abs(Mat(quad - closed)) / bks_frame_constant(g, k), 1e-8, ""};
  }});

  cases.push_back({"bks/torus-gram", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int k = cfg.k;
    const Mat tau = cayley(random_siegel(rng, 1));
    PairingParams params;
    params.route = PairingRoute::torus_grid;
    params.torus_n = 64;
    const Mat grid = frame_gram_matrix(tau, k, params);
    const Mat closed = frame_gram_matrix(tau, k, {});
    double off_diag = 0.0;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) off_diag = std::max(off_diag, std::abs(grid(i, j)));
    const double residual = max_abs(Mat(grid - closed)) / bks_frame_constant(1, k);
    return {std::max(residual, off_diag), 1e-8, ""};
  }});

  cases.push_back({"bks/map-transitivity", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2), k = cfg.k;
    const Mat tau0 = cayley(random_siegel(rng, g));
    const Mat tau1 = cayley(random_siegel(rng, g));
    const Mat tau2 = cayley(random_siegel(rng, g));
    PairingParams params;
    params.route = PairingRoute::wb_quadrature;
    params.quad_points = g == 1 ? 2048 : 400;
    const Mat b01 = bks_map(tau0, tau1, k, params);
    const Mat b12 = bks_map(tau1, tau2, k, params);
    const Mat b02 = bks_map(tau0, tau2, k, params);
    double residual = max_abs(Mat(b12 * b01 - b02));
    residual += max_abs(Mat(b01 - Mat::Identity(b01.rows(), b01.cols())));
    return {residual, 1e-8, ""};
  }});

  cases.push_back({"bks/map-unitarity", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = std::min(cfg.g, 2), k = cfg.k;
    const Mat tau = cayley(random_siegel(rng, g));
    const Mat tau_p = cayley(random_siegel(rng, g));
    PairingParams params;
    params.route = PairingRoute::wb_quadrature;
    params.quad_points = g == 1 ? 2048 : 400;
    const Mat b = bks_map(tau, tau_p, k, params);
    const Mat gram = frame_gram_matrix(tau, k, params);
    const Mat gram_p = frame_gram_matrix(tau_p, k, params);
    return {max_abs(Mat(b.adjoint() * gram_p * b - gram)), 1e-8, ""};
  }});

  cases.push_back({"bks/degenerate-guard", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    const int k = cfg.k;
    const Outcome first = expect_error<DegeneratePairError>([k] {
      QuantumVector u;
      u.g = 1;
      u.k = k;
      u.tau = -Mat::Identity(1, 1);
      u.coeffs = Vec::Ones(k);
      bks_pairing(u, u);
    }, "parallel boundary pair");
    if (first.residual > 0.0) return first;
    return expect_error<DegeneratePairError>([k] {
      const Mat real_omega = Mat::Constant(1, 1, cd{0.7, 0.0});
      halfform_pairing(k, real_omega, real_omega);
    }, "identical real polarization");
  }});

  cases.push_back({"bks/halfform-conversion", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g;
    const Mat tau = cayley(random_siegel(rng, g));
    const HalfFormFactor factor = halfform_conversion(tau);
    const cd det = Mat(Mat::Identity(g, g) + tau).determinant();
    return {std::abs(factor.scalar.value * factor.scalar.value / det - 1.0), 1e-10, ""};
  }});

  return cases;
}

// ------------------------------------------------------------- heisenberg ----

std::vector<CaseDef> heisenberg_cases() {
  std::vector<CaseDef> cases;

  cases.push_back({"heis/anchor", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    HeisenbergElement h;
    h.lambda = 1.0;
    h.a = IVec::Constant(1, 1);
    h.b = IVec::Zero(1);
    QuantumVector u;
    u.g = 1;
    u.k = 2;
    u.tau = Mat::Zero(1, 1);
    u.coeffs = Vec::Zero(2);
    u.coeffs[1] = 1.0;
    const QuantumVector out = heisenberg_act(h, u);
    return {std::abs(out.coeffs[1] - cd{-1.0, 0.0}) + std::abs(out.coeffs[0]), 1e-14, ""};
  }});

  cases.push_back({"heis/product-action", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g, k = cfg.k;
    const auto draw = [&]() {
      HeisenbergElement h;
      h.lambda = std::exp(iu * uniform_range(rng, 0.0, 2.0 * pi));
      h.a = IVec(g);
      h.b = IVec(g);
      for (int d = 0; d < g; ++d) {
        h.a[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
        h.b[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
      }
      return h;
    };
    const HeisenbergElement h1 = draw(), h2 = draw();
    QuantumVector u;
    u.g = g;
    u.k = k;
    u.tau = Mat::Zero(g, g);
    u.coeffs = random_cvec(rng, charv_count(g, k));
    const QuantumVector twice = heisenberg_act(h1, heisenberg_act(h2, u));
    const QuantumVector once = heisenberg_act(heisenberg_product(h1, h2, k), u);
    return {max_abs(Mat((twice.coeffs - once.coeffs).asDiagonal())), 1e-12, ""};
  }});

  cases.push_back({"heis/unitary", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g, k = cfg.k;
    HeisenbergElement h;
    h.lambda = std::exp(iu * uniform_range(rng, 0.0, 2.0 * pi));
    h.a = IVec(g);
    h.b = IVec(g);
    for (int d = 0; d < g; ++d) {
      h.a[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
      h.b[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
    }
    const Mat hm = heisenberg_matrix(h, g, k);
    return {max_abs(Mat(hm.adjoint() * hm - Mat::Identity(hm.rows(), hm.cols()))), 1e-12, ""};
  }});

  cases.push_back({"heis/central-commutator", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int g = cfg.g, k = cfg.k;
    HeisenbergElement h1, h2;
    h1.lambda = h2.lambda = 1.0;
    h1.a = IVec(g);
    h1.b = IVec(g);
    h2.a = IVec(g);
    h2.b = IVec(g);
    for (int d = 0; d < g; ++d) {
      h1.a[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
      h1.b[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
      h2.a[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
      h2.b[d] = static_cast<int>(rng() % static_cast<unsigned>(k));
    }
    const cd forward = heisenberg_product(h1, h2, k).lambda;
    const cd backward = heisenberg_product(h2, h1, k).lambda;
    const double cross =
        static_cast<double>(h1.b.dot(h2.a)) - static_cast<double>(h1.a.dot(h2.b));
    const cd expected = std::exp(2.0 * iu * pi * cross / static_cast<double>(k));
    return {std::abs(forward / backward - expected), 1e-12, ""};
  }});

  cases.push_back({"heis/intertwines-bks", [](const RunConfig& cfg, std::mt19937_64& rng) -> Outcome {
    const int k = std::min(cfg.k, 4);
    const Mat tau = cayley(random_siegel(rng, 1));
    const Mat tau_p = cayley(random_siegel(rng, 1));
    PairingParams params;
    params.route = PairingRoute::wb_quadrature;
    params.quad_points = 2048;
    double worst = 0.0;
    for (int which = 0; which < 2; ++which) {
      HeisenbergElement h;
      h.lambda = 1.0;
      h.a = IVec::Constant(1, which == 0 ? 1 : 0);
      h.b = IVec::Constant(1, which == 0 ? 0 : 1);
      worst = std::max(worst, intertwining_heisenberg_check(tau, tau_p, h, k, params));
    }
    return {worst, 1e-8, ""};
  }});

  return cases;
}

// ------------------------------------------------------------ intersection ----

std::vector<CaseDef> intersection_cases() {
  std::vector<CaseDef> cases;

  cases.push_back({"int/vertical-horizontal", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    const int g = std::min(cfg.g, 2);
    const Mat tau = Mat::Identity(g, g);
    const Mat tau_p = -Mat::Identity(g, g);
    return {intersection_pairing_check(tau, tau_p, cfg.k), 1e-6, ""};
  }});

  cases.push_back({"int/quadrature-cross-check", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    const int k = cfg.k;
    const double eps = 1e-3;
    const Mat omega = Mat::Constant(1, 1, iu * eps);
    const Mat omega_p = Mat::Constant(1, 1, iu / eps);
    const IVec zero = IVec::Zero(1);
    const cd closed = prequantum_pairing(k, zero, zero, omega, omega_p);
    const Mat arg = static_cast<double>(k) * iu * (omega_p.conjugate() - omega);
    const double w = 4.0 / std::sqrt(arg.real()(0, 0));
    const cd quad = gaussian_integral_quadrature(arg, w, 2000);
    double residual = rel_diff(closed, quad);
    const cd product = closed * halfform_pairing(k, omega, omega_p).value;
    residual += rel_diff(product, bks_frame_constant(1, k));
    return {residual, 1e-8, ""};
  }});

  cases.push_back({"int/not-transverse-guard", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    return expect_error<NotTransverseError>([&cfg] {
      const Mat tau = -Mat::Identity(1, 1);
      intersection_pairing_check(tau, tau, cfg.k);
    }, "parallel fibers");
  }});

  cases.push_back({"int/interior-rejected", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    return expect_error<InvalidParamsError>([&cfg] {
      intersection_pairing_check(Mat::Zero(1, 1), Mat::Identity(1, 1), cfg.k);
    }, "interior point");
  }});

  cases.push_back({"int/fibers-vertical", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    const int g = cfg.g, k = cfg.k;
    const BohrSommerfeldData data = bohr_sommerfeld(-Mat::Identity(g, g), k);
    double residual = max_abs(RMat(data.transform - RMat::Identity(2 * g, 2 * g)));
    const long kg = charv_count(g, k);
    residual += std::abs(static_cast<double>(data.fibers.size()) - static_cast<double>(kg));
    for (long li = 0; li < kg; ++li) {
      const IVec l = index_to_charv(li, g, k);
      const Fiber& fiber = data.fibers[static_cast<size_t>(li)];
      for (int d = 0; d < g; ++d) {
        residual += std::abs(fiber.basepoint[d]);
        residual += std::abs(fiber.basepoint[g + d] - static_cast<double>(l[d]) / k);
      }
    }
    return {residual, 1e-12, ""};
  }});

  cases.push_back({"int/fibers-horizontal", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    const int k = cfg.k;
    const BohrSommerfeldData data = bohr_sommerfeld(Mat::Identity(1, 1), k);
    // The x-coordinates of the basepoints must exhaust {l/k} as a set and the
    // leaves must run vertically; where along its leaf each basepoint sits is
    // not pinned down.
    std::vector<double> got, want;
    double residual = 0.0;
    for (const Fiber& fiber : data.fibers) {
      got.push_back(fiber.basepoint[0]);
      residual += std::abs(std::abs(fiber.directions(1, 0)) - 1.0);
      residual += std::abs(fiber.directions(0, 0));
    }
    for (int l = 0; l < k; ++l) want.push_back(static_cast<double>(l) / k);
    residual += hausdorff_circle(got, want);
    return {residual, 1e-12, ""};
  }});

  cases.push_back({"int/fibers-slope", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    const Mat tau = Mat::Constant(1, 1, iu);
    const BohrSommerfeldData data = bohr_sommerfeld(tau, 2);
    double residual = max_abs(Mat(sp_act_D(data.transform, -Mat::Identity(1, 1)) - tau));
    require_symplectic(data.transform);
    for (Eigen::Index i = 0; i < data.transform.size(); ++i) {
      const double entry = data.transform.data()[i];
      residual += std::abs(entry - std::round(entry));
    }
    residual += std::abs(static_cast<double>(data.fibers.size()) - 2.0);
    return {residual, 1e-10, ""};
  }});

  cases.push_back({"int/unreachable-slope", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    return expect_error<NoIntegerTransformFoundError>([] {
      const Mat tau = Mat::Constant(1, 1, cd{12.0 / 13.0, 5.0 / 13.0});
      bohr_sommerfeld(tau, 1, 3);
    }, "non-elementary slope at small bound");
  }});

  cases.push_back({"int/interior-not-reducible", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    return expect_error<NotReducibleError>([] {
      bohr_sommerfeld(Mat::Zero(1, 1), 2);
    }, "interior polarization");
  }});

  return cases;
}

// ---------------------------------------------------------------- smatrix ----

std::vector<CaseDef> smatrix_cases() {
  std::vector<CaseDef> cases;

  for (int k = 1; k <= 4; ++k) {
    cases.push_back({"smx/level-" + std::to_string(k), [k](const RunConfig&, std::mt19937_64&) -> Outcome {
      const Mat s = smatrix_limit(k);
      double residual = max_abs(Mat(s.adjoint() * s - Mat::Identity(k, k)));
      const double modulus = 1.0 / std::sqrt(static_cast<double>(k));
      for (int n = 0; n < k; ++n)
        for (int l = 0; l < k; ++l) {
          residual = std::max(residual, std::abs(std::abs(s(n, l)) - modulus));
          const cd expected =
              modulus * std::exp(2.0 * pi * iu * static_cast<double>(n) * static_cast<double>(l) /
                                 static_cast<double>(k));
          residual = std::max(residual, std::abs(s(n, l) - expected));
        }
      return {residual, 1e-4, ""};
    }});
  }

  cases.push_back({"smx/schedule-guard", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    return expect_error<InvalidParamsError>([] { smatrix_limit(2, {}); }, "empty schedule");
  }});

  return cases;
}

// --------------------------------------------------------------- tropical ----

std::vector<CaseDef> tropical_cases() {
  std::vector<CaseDef> cases;

  cases.push_back({"trop/divisor-g1", [](const RunConfig& cfg, std::mt19937_64&) -> Outcome {
    const int k = cfg.k;
    const RMat gram = RMat::Constant(1, 1, 1.0);
    double residual = 0.0;
    for (double y : tropical_divisor_g1(k))
      if (!tropical_divisor_membership(gram, k, RVec::Constant(1, y))) residual += 1.0;
    for (int j = 0; j < k; ++j) {
      const double off = (2.0 * j + 1.0) / (2.0 * k) + 0.3 / k;
      if (tropical_divisor_membership(gram, k, RVec::Constant(1, off))) residual += 1.0;
    }
    return {residual, 0.5, ""};
  }});

  cases.push_back({"trop/neighbor-ties", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    RVec target(2);
    target << 0.5, 0.3;
    const auto pts = lattice_neighbors(RMat::Identity(2, 2), target);
    double residual = std::abs(static_cast<double>(pts.size()) - 2.0);
    if (pts.size() == 2) {
      residual += std::abs(pts[0][0] - 0) + std::abs(pts[0][1] - 0);
      residual += std::abs(pts[1][0] - 1) + std::abs(pts[1][1] - 0);
    }
    return {residual, 0.5, ""};
  }});

  cases.push_back({"trop/radius-guard", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    return expect_error<RadiusTooSmallError>([] {
      RVec target(2);
      target << 0.5, 0.0;
      lattice_neighbors(RMat::Identity(2, 2), target, 1);
    }, "tie on the search boundary");
  }});

  cases.push_back({"trop/zero-locus-anchor", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    LatticeData data{1, 1, Mat::Constant(1, 1, iu)};
    const auto zeros = theta_zero_locus(data, Vec::Ones(1));
    if (zeros.size() != 1) return {1.0, 0.5, "expected a single zero"};
    return {std::max(std::abs(zeros[0][0] - 0.5), std::abs(zeros[0][1] - 0.5)), 2e-3, ""};
  }});

  cases.push_back({"trop/zero-locus-level2", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    GeodesicRay ray{RMat::Identity(1, 1), RMat::Zero(1, 1), RVec::Ones(1)};
    LatticeData data{1, 2, omega_at(ray, 2.0)};
    const auto zeros = theta_zero_locus(data, Vec::Ones(2));
    if (zeros.size() != 2) return {1.0, 0.5, "expected two zeros"};
    const double dist = hausdorff_circle(project_to_y(zeros), tropical_divisor_g1(2));
    return {dist, 0.02, ""};
  }});

  cases.push_back({"trop/locus-shrinks-to-divisor", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    GeodesicRay ray{RMat::Identity(1, 1), RMat::Zero(1, 1), RVec::Ones(1)};
    const auto divisor = tropical_divisor_g1(2);
    double prev = 0.0;
    double residual = 0.0;
    for (int si = 0; si < 2; ++si) {
      const double s = 3.0 + si;
      LatticeData data{1, 2, omega_at(ray, s)};
      const auto zeros = theta_zero_locus(data, Vec::Ones(2));
      if (zeros.size() != 2) return {1.0, 0.5, "expected two zeros along the ray"};
      const double dist = hausdorff_circle(project_to_y(zeros), divisor);
      if (si == 0) {
        residual = std::max(residual, dist <= 0.02 ? 0.0 : dist);
        prev = dist;
      } else {
        residual = std::max(residual, dist - prev - 1e-6);
      }
    }
    return {residual, 0.0, ""};
  }});

  cases.push_back({"trop/rescaled-limit", [](const RunConfig&, std::mt19937_64& rng) -> Outcome {
    const RMat a = random_invertible(rng, 2);
    const RMat s_sym = random_symmetric(rng, 2);
    const RMat b = s_sym * a.transpose().inverse();
    GeodesicRay uniform_ray{a, b, RVec::Ones(2)};
    const RescaledMetricResult uni = rescaled_metric(uniform_ray, 4.0);
    double residual = uni.mixed_rates ? 1.0 : 0.0;
    residual += std::abs(static_cast<double>(uni.limit_rank) - 2.0);
    RMat expected = RMat::Zero(4, 4);
    expected.bottomRightCorner(2, 2) = uni.limit_block;
    residual += max_abs(RMat(uni.rescaled - expected)) / std::max(1.0, max_abs(expected));

    RVec rates(2);
    rates << 0.5, 1.0;
    GeodesicRay mixed_ray{a, b, rates};
    const RescaledMetricResult mix = rescaled_metric(mixed_ray, 6.0);
    residual += mix.mixed_rates ? 0.0 : 1.0;
    residual += std::abs(static_cast<double>(mix.limit_rank) - 1.0);
    RMat proj = RMat::Zero(2, 2);
    proj(1, 1) = 1.0;
    residual += max_abs(RMat(mix.limit_block - a * proj * a.transpose()));
    residual += max_abs(RMat(mix.rescaled.bottomRightCorner(2, 2) - mix.limit_block)) /
                std::max(1.0, max_abs(mix.limit_block)) * 1e-1;
    return {residual, 1e-2, ""};
  }});

  cases.push_back({"trop/halfline-block", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    const Mat dir = Mat::Constant(1, 1, cd{1.0, 1.0});
    const RMat closed = halfline_rescaled_metric(dir);
    double residual = std::abs(closed(0, 0) - 2.0);
    const double s = 1e3;
    const RMat numeric = siegel_metric(Mat(s * dir)) / s;
    residual += std::abs(numeric(1, 1) - closed(0, 0)) / closed(0, 0);
    residual += std::abs(numeric(0, 0));
    // Metric anchor at Omega = 1 + i.
    RMat gamma_exact(2, 2);
    gamma_exact << 1, -1, -1, 2;
    residual += max_abs(RMat(siegel_metric(dir) - gamma_exact));
    return {residual, 2e-3, ""};
  }});

  cases.push_back({"trop/hausdorff-wrap", [](const RunConfig&, std::mt19937_64&) -> Outcome {
    const double d = hausdorff_circle({0.02}, {0.98});
    return {std::abs(d - 0.04), 1e-14, ""};
  }});

  return cases;
}

// ----------------------------------------------------------------- runner ----

std::vector<CaseDef> cases_for(const std::string& name) {
  if (name == "theta") return theta_cases();
  if (name == "wb") return wb_cases();
  if (name == "metaplectic") return metaplectic_cases();
  if (name == "bks") return bks_cases();
  if (name == "heisenberg") return heisenberg_cases();
  if (name == "intersection") return intersection_cases();
  if (name == "smatrix") return smatrix_cases();
  if (name == "tropical") return tropical_cases();
  throw UnknownSuiteError("no suite named '" + name + "'");
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "theta", "wb", "metaplectic", "bks", "heisenberg", "intersection", "smatrix", "tropical"};
  return names;
}

SuiteReport run_suite(const std::string& name, const RunConfig& config) {
  validate(config);
  const auto defs = cases_for(name);
  std::vector<CaseResult> results(defs.size());

  std::atomic<size_t> next{0};
  const auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= defs.size()) return;
      CaseResult r;
      r.name = defs[i].name;
      try {
        auto rng = case_rng(config.seed, defs[i].name);
        const Outcome out = defs[i].fn(config, rng);
        r.residual = out.residual;
        r.tolerance = out.tolerance;
        r.detail = out.detail;
        r.passed = out.residual <= out.tolerance;
      } catch (const std::exception& e) {
        r.passed = false;
        r.residual = std::numeric_limits<double>::infinity();
        r.tolerance = 0.0;
        r.detail = e.what();
      }
      results[i] = std::move(r);
    }
  };

  const int nthreads = std::max(1, std::min<int>(resolve_threads(config), static_cast<int>(defs.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  SuiteReport report;
  report.suite = name;
  report.cases = std::move(results);
  report.passed = true;
  for (const auto& c : report.cases) report.passed = report.passed && c.passed;
  return report;
}

std::vector<SuiteReport> run_suites(const std::string& name, const RunConfig& config) {
  validate(config);
  std::vector<SuiteReport> reports;
  if (name == "all") {
    for (const auto& suite : suite_names()) reports.push_back(run_suite(suite, config));
  } else {
    reports.push_back(run_suite(name, config));
  }
  return reports;
}

const std::vector<std::pair<std::string, std::string>>& convention_notes() {
  static const std::vector<std::pair<std::string, std::string>> notes = {
      {"det-branch",
       "inverse square roots use the positive-real-spectrum anchor; elsewhere roots are continued "
       "along explicit paths from that anchor"},
      {"pairing-constant", "frame pairing is (2 k^2)^{-g/2} on the positive real branch"},
      {"smatrix-phase", "S[n,l] = k^{-1/2} exp(+2 pi i n l / k)"},
      {"heisenberg-cocycle", "(a,b)(a',b') picks up exp(+ i pi (b.a' - a.b') / k)"},
      {"composition-order", "two-factor elements apply factors[1] first; the projection is "
                            "factors[0] * factors[1]"},
  };
  return notes;
}

std::string render_text_report(const std::vector<SuiteReport>& reports, const RunConfig& config) {
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "config g=%d k=%d seed=%llu\n", config.g, config.k,
                static_cast<unsigned long long>(config.seed));
  out += line;
  for (const auto& [key, text] : convention_notes()) {
    out += "convention " + key + ": " + text + "\n";
  }
  for (const auto& report : reports) {
    out += "suite " + report.suite + "\n";
    for (const auto& c : report.cases) {
      std::snprintf(line, sizeof line, "  %s %s residual=%.6e tol=%.6e%s%s\n",
                    c.passed ? "PASS" : "FAIL", c.name.c_str(), c.residual, c.tolerance,
                    c.detail.empty() ? "" : " # ", c.detail.c_str());
      out += line;
    }
    int passed = 0;
    for (const auto& c : report.cases) passed += c.passed ? 1 : 0;
    std::snprintf(line, sizeof line, "suite %s: %s (%d/%zu)\n", report.suite.c_str(),
                  report.passed ? "PASS" : "FAIL", passed, report.cases.size());
    out += line;
  }
  out += std::string("overall: ") + (all_passed(reports) ? "PASS" : "FAIL") + "\n";
  return out;
}

bool all_passed(const std::vector<SuiteReport>& reports) {
  for (const auto& r : reports)
    if (!r.passed) return false;
  return !reports.empty();
}

}  // namespace thetaquant
