#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <variant>

#include "doctest.h"
#include "thetaquant/errors.hpp"
#include "thetaquant/metaplectic.hpp"
#include "thetaquant/random.hpp"
#include "thetaquant/siegel.hpp"
#include "thetaquant/theta.hpp"
#include "thetaquant/weil_brezin.hpp"

using namespace thetaquant;

namespace {

SampledSection random_section(std::mt19937_64& rng, int g, int k, int n) {
  SampledSection s;
  s.g = g;
  s.k = k;
  s.N = n;
  long total = 1;
  for (int d = 0; d < 2 * g; ++d) total *= n;
  s.data = Vec(total);
  for (long i = 0; i < total; ++i)
    s.data[i] = cd{uniform_range(rng, -1.0, 1.0), uniform_range(rng, -1.0, 1.0)};
  return s;
}

}  // namespace

TEST_CASE("transform round-trips exactly") {
  auto rng = case_rng(31, "wb/round-trip");
  for (int k : {1, 2, 3}) {
    const SampledSection s = random_section(rng, 1, k, 6 * k);
    const SampledSection back = wb_inverse(wb_forward(s));
    CHECK(back.N == s.N);
    CHECK((back.data - s.data).cwiseAbs().maxCoeff() < 1e-12);
  }
  const SampledSection s2 = random_section(rng, 2, 2, 4);
  const SampledSection back2 = wb_inverse(wb_forward(s2));
  CHECK((back2.data - s2.data).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("pairings agree on both sides") {
  auto rng = case_rng(31, "wb/pairing");
  const SampledSection a = random_section(rng, 1, 2, 8);
  const SampledSection b = random_section(rng, 1, 2, 8);
  const auto [torus, comps] = wb_unitarity_check(a, b);
  CHECK(std::abs(torus - comps) < 1e-12 * std::abs(torus));
}

TEST_CASE("grid guards") {
  auto rng = case_rng(31, "wb/grid-guards");
  SampledSection odd = random_section(rng, 1, 1, 5);
  CHECK_THROWS_AS(wb_forward(odd), GridTooCoarseError);
  SampledSection indivisible = random_section(rng, 1, 4, 6);
  CHECK_THROWS_AS(wb_forward(indivisible), GridTooCoarseError);

  const SampledSection a = random_section(rng, 1, 2, 8);
  const SampledSection b = random_section(rng, 1, 2, 12);
  CHECK_THROWS_AS(wb_unitarity_check(a, b), GridMismatchError);

  WBVector v = wb_forward(a);
  v.comps[0].base[0] += 1;  // offset no longer matches the window layout
  CHECK_THROWS_AS(wb_inverse(v), WindowTooSmallError);
}

TEST_CASE("component state samples to the theta section") {
  auto rng = case_rng(31, "wb/gaussian-sampling");
  GaussianState state;
  state.g = 1;
  state.k = 2;
  state.omega = random_siegel(rng, 1);
  state.amplitudes = Vec(2);
  state.amplitudes << cd{0.7, 0.1}, cd{-0.2, 0.5};

  const int n = 24;
  const SampledSection s = wb_inverse(state, n);
  LatticeData data{1, 2, state.omega};
  double worst = 0.0;
  for (int jx = 0; jx < n; jx += 5)
    for (int jy = 0; jy < n; jy += 5) {
      const RVec x = RVec::Constant(1, static_cast<double>(jx) / n);
      const RVec y = RVec::Constant(1, static_cast<double>(jy) / n);
      cd expected = 0.0;
      for (int l = 0; l < 2; ++l)
        expected += state.amplitudes[l] *
                    theta_section_eval(data, IVec::Constant(1, l), x, y, 1e-13).value;
      const cd got = s.data[section_index(s, IVec::Constant(1, jx), IVec::Constant(1, jy))];
      worst = std::max(worst, std::abs(got - expected));
    }
  CHECK(worst < 1e-9);
}

TEST_CASE("gaussian component values") {
  GaussianState state;
  state.g = 1;
  state.k = 1;
  state.omega = Mat::Constant(1, 1, cd{0.3, 1.2});
  state.amplitudes = Vec::Constant(1, cd{2.0, -1.0});
  const RVec y = RVec::Constant(1, 0.37);
  const cd expected = state.amplitudes[0] * std::exp(iu * pi * state.omega(0, 0) * y[0] * y[0]);
  CHECK(std::abs(gaussian_component(state, 0, y) - expected) < 1e-14);
}

TEST_CASE("vertical-field kernels follow the chart") {
  // Interior tau: Gaussian kernel whose period matrix solves the linear
  // factor exactly.  tau = 0 must give the square lattice.
  const auto at_zero = xi_kernel(XiOperator{Mat::Zero(1, 1), 1}, 1);
  REQUIRE(std::holds_alternative<GaussianState>(at_zero));
  CHECK(std::abs(std::get<GaussianState>(at_zero).omega(0, 0) - iu) < 1e-12);

  auto rng = case_rng(31, "wb/xi-kernel");
  const Mat tau = cayley(random_siegel(rng, 2));
  const auto kernel = xi_kernel(XiOperator{tau, 3}, 2);
  REQUIRE(std::holds_alternative<GaussianState>(kernel));
  CHECK(xi_residual(tau, std::get<GaussianState>(kernel).omega) < 1e-10);
  // Any other period matrix leaves a nonzero residual.
  CHECK(xi_residual(tau, Mat(std::get<GaussianState>(kernel).omega + 0.4 * iu * Mat::Identity(2, 2))) >
        1e-3);

  const auto vertical = xi_kernel(XiOperator{-Mat::Identity(1, 1), 2}, 1);
  REQUIRE(std::holds_alternative<DeltaState>(vertical));
  CHECK(std::abs(std::get<DeltaState>(vertical).support[0]) < 1e-14);
}

TEST_CASE("derivation acts on gaussians by the linear factor") {
  auto rng = case_rng(31, "wb/xi-apply");
  const Mat tau = cayley(random_siegel(rng, 1));
  const Mat omega = random_siegel(rng, 1);
  GaussianState state;
  state.g = 1;
  state.k = 2;
  state.omega = omega;
  state.amplitudes = Vec::Ones(2);
  const XiResult r = xi_apply(XiOperator{tau, 2}, state);
  // The factor is linear in y with the documented matrix coefficient.
  const Mat expected = 2.0 * pi * 2.0 * (iu * (tau + Mat::Identity(1, 1)) * omega -
                                         (tau - Mat::Identity(1, 1)));
  CHECK(max_abs(Mat(r.linear_factor - expected)) < 1e-12);
}

TEST_CASE("intertwiner matches the residual transport") {
  auto rng = case_rng(31, "wb/intertwiner");
  const int g = 2;
  const MetaplecticGenerator gen = random_generator(rng, g);
  const RMat m = generator_to_symplectic(gen);
  const Mat tau = cayley(random_siegel(rng, g));
  CHECK(intertwining_check(m, tau) < 1e-8);
}
