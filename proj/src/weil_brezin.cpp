#include "thetaquant/weil_brezin.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <unsupported/Eigen/FFT>

#include "thetaquant/metaplectic.hpp"
#include "thetaquant/siegel.hpp"

namespace thetaquant {

namespace {

long ipow(int b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

IVec decode(long flat, int g, int n) {
  IVec j(g);
  for (int d = g - 1; d >= 0; --d) {
    j[d] = static_cast<int>(flat % n);
    flat /= n;
  }
  return j;
}

// In-place unnormalized DFT (sign -) or unnormalized inverse (sign +)
// along one axis of a row-major N^g array.
void dft_axis(Vec& a, int g, int n, int axis, bool inverse) {
  Eigen::FFT<double> fft;
  const long stride = ipow(n, g - 1 - axis);
  const long block = stride * n;
  std::vector<cd> in(static_cast<size_t>(n)), out(static_cast<size_t>(n));
  for (long start = 0; start < a.size(); start += block)
    for (long off = 0; off < stride; ++off) {
      for (int t = 0; t < n; ++t) in[static_cast<size_t>(t)] = a[start + off + t * stride];
      if (inverse)
        for (auto& v : in) v = std::conj(v);
      fft.fwd(out, in);
      if (inverse)
        for (auto& v : out) v = std::conj(v);
      for (int t = 0; t < n; ++t) a[start + off + t * stride] = out[static_cast<size_t>(t)];
    }
}

void dft_all_axes(Vec& a, int g, int n, bool inverse) {
  for (int axis = 0; axis < g; ++axis) dft_axis(a, g, n, axis, inverse);
}

void require_grid(const SampledSection& s) {
  if (s.N < 2 || s.N % 2 != 0 || s.N % s.k != 0)
    throw GridTooCoarseError("N must be even, >= 2, and divisible by k");
  if (s.data.size() != ipow(s.N, 2 * s.g))
    throw GridTooCoarseError("data size does not match N^{2g}");
}

int m_lo(int l, int k, int n) {
  // smallest m with l - k m in the frequency band [-N/2, N/2-1]
  const int num = l - n / 2 + 1;
  return static_cast<int>(std::ceil(static_cast<double>(num) / k));
}

}  // namespace

long section_index(const SampledSection& s, const IVec& jx, const IVec& jy) {
  const long ng = ipow(s.N, s.g);
  long fx = 0, fy = 0;
  for (int d = 0; d < s.g; ++d) {
    fx = fx * s.N + jx[d];
    fy = fy * s.N + jy[d];
  }
  return fy * ng + fx;
}

void validate(const GaussianState& state) {
  if (state.g < 1 || state.k < 1) throw InvalidParamsError("need g >= 1 and k >= 1");
  if (state.amplitudes.size() != charv_count(state.g, state.k))
    throw InvalidParamsError("amplitude count must be k^g");
  if (state.omega.rows() != state.g || state.omega.cols() != state.g)
    throw InvalidParamsError("Omega must be g x g");
  if (max_abs(Mat(state.omega - state.omega.transpose())) > symmetry_tolerance(state.omega))
    throw NonSymmetricError("Omega must be symmetric");
  Eigen::SelfAdjointEigenSolver<RMat> es(
      RMat(0.5 * (state.omega.imag() + state.omega.imag().transpose())));
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw InvalidParamsError("Im Omega must be positive semidefinite");
}

WBVector wb_forward(const SampledSection& s) {
  require_grid(s);
  const int g = s.g, k = s.k, n = s.N;
  const long ng = ipow(n, g);
  const int extent = n * (n / k);
  const long kg = charv_count(g, k);

  WBVector out;
  out.g = g;
  out.k = k;
  out.N = n;
  out.comps.resize(static_cast<size_t>(kg));
  for (long li = 0; li < kg; ++li) {
    const IVec l = index_to_charv(li, g, k);
    auto& comp = out.comps[static_cast<size_t>(li)];
    comp.base = IVec(g);
    for (int d = 0; d < g; ++d) comp.base[d] = n * m_lo(l[d], k, n) - (n / k) * l[d];
    comp.extent = extent;
    comp.values = Vec::Zero(ipow(extent, g));
  }

  Vec row(ng);
  for (long fy = 0; fy < ng; ++fy) {
    const IVec jy = decode(fy, g, n);
    for (long fx = 0; fx < ng; ++fx) {
      const IVec jx = decode(fx, g, n);
      long dot = 0;
      for (int d = 0; d < g; ++d) dot += static_cast<long>(jx[d]) * jy[d];
      // g(x) = s(x, eta) e^{k pi i x.eta} on the row eta = jy / N
      row[fx] = s.data[fy * ng + fx] * std::exp(iu * pi * (k * static_cast<double>(dot)) / (n * static_cast<double>(n)));
    }
    dft_all_axes(row, g, n, /*inverse=*/false);
    row /= static_cast<double>(ng);

    for (long ft = 0; ft < ng; ++ft) {
      const IVec t = decode(ft, g, n);
      IVec l(g), q(g);
      for (int d = 0; d < g; ++d) {
        const int freq = (t[d] < n / 2) ? t[d] : t[d] - n;
        l[d] = ((freq % k) + k) % k;
        const int m = (l[d] - freq) / k;
        q[d] = jy[d] + n * m - (n / k) * l[d];
      }
      auto& comp = out.comps[static_cast<size_t>(charv_to_index(l, k))];
      long fq = 0;
      for (int d = 0; d < g; ++d) fq = fq * extent + (q[d] - comp.base[d]);
      comp.values[fq] = row[ft];
    }
  }
  return out;
}

SampledSection wb_inverse(const WBVector& v) {
  const int g = v.g, k = v.k, n = v.N;
  if (n < 2 || n % 2 != 0 || n % k != 0)
    throw GridTooCoarseError("N must be even, >= 2, and divisible by k");
  const long ng = ipow(n, g);
  const int extent = n * (n / k);
  const long kg = charv_count(g, k);
  if (static_cast<long>(v.comps.size()) != kg)
    throw WindowTooSmallError("component count must be k^g");
  for (long li = 0; li < kg; ++li) {
    const IVec l = index_to_charv(li, g, k);
    const auto& comp = v.comps[static_cast<size_t>(li)];
    if (comp.extent != extent || comp.values.size() != ipow(extent, g))
      throw WindowTooSmallError("component grid does not cover the reconstruction window");
    for (int d = 0; d < g; ++d)
      if (comp.base[d] != n * m_lo(l[d], k, n) - (n / k) * l[d])
        throw WindowTooSmallError("component grid offset mismatch");
  }

  SampledSection s;
  s.g = g;
  s.k = k;
  s.N = n;
  s.data = Vec::Zero(ipow(n, 2 * g));

  Vec spec(ng);
  for (long fy = 0; fy < ng; ++fy) {
    const IVec jy = decode(fy, g, n);
    for (long ft = 0; ft < ng; ++ft) {
      const IVec t = decode(ft, g, n);
      IVec l(g);
      long fq = 0;
      for (int d = 0; d < g; ++d) {
        const int freq = (t[d] < n / 2) ? t[d] : t[d] - n;
        l[d] = ((freq % k) + k) % k;
        const int m = (l[d] - freq) / k;
        const int q = jy[d] + n * m - (n / k) * l[d];
        const int base = n * m_lo(l[d], k, n) - (n / k) * l[d];
        fq = fq * extent + (q - base);
      }
      spec[ft] = v.comps[static_cast<size_t>(charv_to_index(l, k))].values[fq];
    }
    dft_all_axes(spec, g, n, /*inverse=*/true);
    for (long fx = 0; fx < ng; ++fx) {
      const IVec jx = decode(fx, g, n);
      long dot = 0;
      for (int d = 0; d < g; ++d) dot += static_cast<long>(jx[d]) * jy[d];
      s.data[fy * ng + fx] =
          spec[fx] * std::exp(-iu * pi * (k * static_cast<double>(dot)) / (n * static_cast<double>(n)));
    }
  }
  return s;
}

cd gaussian_component(const GaussianState& state, long l_index, const RVec& y) {
  const Vec yc = y.cast<cd>();
  const cd quad = (yc.transpose() * (state.omega * yc))(0);
  return state.amplitudes[l_index] * std::exp(iu * pi * static_cast<double>(state.k) * quad);
}

cd gaussian_section_value(const GaussianState& state, const RVec& x, const RVec& y) {
  validate(state);
  const int g = state.g, k = state.k;
  Eigen::SelfAdjointEigenSolver<RMat> es(
      RMat(0.5 * (state.omega.imag() + state.omega.imag().transpose())));
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min <= 1e-10)
    throw InvalidParamsError("direct summation needs Im Omega positive definite");
  const int radius = static_cast<int>(std::ceil(std::sqrt(40.0 / (k * pi * lam_min)))) + 1;

  cd acc{0.0, 0.0};
  const long kg = charv_count(g, k);
  for (long li = 0; li < kg; ++li) {
    const IVec l = index_to_charv(li, g, k);
    const RVec a = l.cast<double>() / k;
    IVec center(g);
    for (int d = 0; d < g; ++d) center[d] = static_cast<int>(std::lround(y[d] - a[d]));
    // box walk, lexicographic
    IVec off = IVec::Constant(g, -radius);
    while (true) {
      const IVec m = center + off;
      const RVec arg = y - m.cast<double>() - a;
      double phase = 0.0;
      for (int d = 0; d < g; ++d) phase += (k * m[d] + l[d]) * x[d];
      acc += gaussian_component(state, li, arg) * std::exp(2.0 * pi * iu * phase);
      int axis = g - 1;
      while (axis >= 0) {
        if (++off[axis] <= radius) break;
        off[axis] = -radius;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  return acc * std::exp(-iu * pi * static_cast<double>(k) * x.dot(y));
}

SampledSection wb_inverse(const GaussianState& state, int n) {
  validate(state);
  const int g = state.g;
  SampledSection s;
  s.g = g;
  s.k = state.k;
  s.N = n;
  const long ng = ipow(n, g);
  s.data = Vec::Zero(ipow(n, 2 * g));
  for (long fy = 0; fy < ng; ++fy) {
    const RVec y = decode(fy, g, n).cast<double>() / n;
    for (long fx = 0; fx < ng; ++fx) {
      const RVec x = decode(fx, g, n).cast<double>() / n;
      s.data[fy * ng + fx] = gaussian_section_value(state, x, y);
    }
  }
  return s;
}

std::pair<cd, cd> wb_unitarity_check(const SampledSection& s, const SampledSection& sp) {
  if (s.g != sp.g || s.k != sp.k || s.N != sp.N)
    throw GridMismatchError("sections must share g, k, N");
  require_grid(s);
  // Eigen's dot conjugates the first factor; the pairing is antilinear in sp.
  const cd torus = sp.data.dot(s.data) / static_cast<double>(s.data.size());

  const WBVector vs = wb_forward(s);
  const WBVector vsp = wb_forward(sp);
  cd comp{0.0, 0.0};
  const double h_g = 1.0 / static_cast<double>(ipow(s.N, s.g));
  for (size_t li = 0; li < vs.comps.size(); ++li)
    comp += vsp.comps[li].values.dot(vs.comps[li].values) * h_g;
  return {torus, comp};
}

XiResult xi_apply(const XiOperator& op, const GaussianState& state) {
  validate(state);
  if (!in_disc(op.tau, 1e-9)) throw InvalidParamsError("tau must lie in the closed disc");
  const Mat eye = Mat::Identity(state.g, state.g);
  const double tk = 2.0 * pi * state.k;
  XiResult r;
  r.linear_factor = tk * (iu * (op.tau + eye) * state.omega - (op.tau - eye));
  r.base = state;
  return r;
}

double xi_residual(const Mat& tau, const Mat& omega) {
  const Mat eye = Mat::Identity(tau.rows(), tau.cols());
  return max_abs(Mat(iu * (tau + eye) * omega - (tau - eye)));
}

std::variant<GaussianState, DeltaState> xi_kernel(const XiOperator& op, int g) {
  const Mat eye = Mat::Identity(g, g);
  if (max_abs(Mat(op.tau + eye)) < 1e-10) {
    DeltaState d;
    d.support = RVec::Zero(g);
    return d;
  }
  GaussianState s;
  s.g = g;
  s.k = op.k;
  s.amplitudes = Vec::Ones(charv_count(g, op.k));
  s.omega = cayley_inverse(op.tau);
  return s;
}

Mat xi_intertwiner(const RMat& m, const Mat& tau_prime) {
  const int g = static_cast<int>(m.rows()) / 2;
  const Mat a = m.topLeftCorner(g, g).cast<cd>();
  const Mat b = m.topRightCorner(g, g).cast<cd>();
  const Mat c = m.bottomLeftCorner(g, g).cast<cd>();
  const Mat d = m.bottomRightCorner(g, g).cast<cd>();
  const Mat eye = Mat::Identity(g, g);
  return 0.5 * ((tau_prime + eye) * (a + iu * b) + (tau_prime - eye) * (iu * c - d));
}

double intertwining_check(const RMat& m, const Mat& tau) {
  const int g = static_cast<int>(tau.rows());
  const Mat omega = cayley_inverse(tau);
  if (!in_siegel(omega, 1e-10)) throw InvalidParamsError("tau must be interior");
  GaussianState state;
  state.g = g;
  state.k = 1;
  state.amplitudes = Vec::Ones(1);
  state.omega = omega;
  const MetaplecticElement elem = decompose_symplectic(m);
  const GaussianState image = act(elem, state);
  const Mat tau_prime = sp_act_D(m, tau);
  return xi_residual(tau_prime, image.omega);
}

}  // namespace thetaquant
