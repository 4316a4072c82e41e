#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "thetaquant/errors.hpp"
#include "thetaquant/matrix_core.hpp"
#include "thetaquant/metaplectic.hpp"
#include "thetaquant/random.hpp"
#include "thetaquant/siegel.hpp"

using namespace thetaquant;

namespace {

MetaplecticGenerator flip_generator() {
  return make_generator(RMat::Zero(1, 1), RMat::Identity(1, 1), RMat::Zero(1, 1));
}

}  // namespace

TEST_CASE("generator bookkeeping") {
  const MetaplecticGenerator flip = flip_generator();
  CHECK(flip.m == 0);
  RMat neg = -RMat::Identity(1, 1);
  CHECK(make_generator(RMat::Zero(1, 1), neg, RMat::Zero(1, 1)).m == 1);

  MetaplecticGenerator bad = flip;
  bad.m = 1;  // parity must follow sign det L
  CHECK_THROWS_AS(validate(bad), InvalidParamsError);

  MetaplecticGenerator singular = flip;
  singular.L = RMat::Zero(1, 1);
  CHECK_THROWS_AS(validate(singular), SingularLError);

  RMat expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK(max_abs(RMat(generator_to_symplectic(flip) - expected)) < 1e-15);
}

TEST_CASE("flip amplitude anchor, level independent") {
  const MetaplecticGenerator flip = flip_generator();
  const Mat omega = Mat::Constant(1, 1, iu);
  for (int k : {1, 3}) {
    GaussianState state;
    state.g = 1;
    state.k = k;
    state.amplitudes = Vec::Ones(k);
    state.omega = omega;
    const GaussianState image = act_on_gaussian(flip, state);
    CHECK(std::abs(image.omega(0, 0) - iu) < 1e-14);
    CHECK(std::abs(image.amplitudes[0] - std::exp(-iu * pi / 4.0)) < 1e-14);
  }
}

TEST_CASE("decomposition chooses the fewest factors") {
  RMat flip_m(2, 2);
  flip_m << 0, -1, 1, 0;
  CHECK(decompose_symplectic(flip_m).factors.size() == 1);

  // Invertible C: a single factor covers it.
  auto rng = case_rng(41, "mp/decompose");
  const RMat generic = generator_to_symplectic(random_generator(rng, 2));
  CHECK(decompose_symplectic(generic).factors.size() == 1);
  CHECK(max_abs(RMat(projection(decompose_symplectic(generic)) - generic)) < 1e-12);

  // C = 0 forces a flip first.
  RMat shear(2, 2);
  shear << 1, 0.7, 0, 1;
  const MetaplecticElement two = decompose_symplectic(shear);
  CHECK(two.factors.size() == 2);
  CHECK(max_abs(RMat(projection(two) - shear)) < 1e-12);
}

TEST_CASE("singular C with singular A still decomposes") {
  RMat m = RMat::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 3) = -1.0;
  m(3, 1) = 1.0;
  m(2, 2) = 1.0;
  require_symplectic(m);
  const MetaplecticElement elem = decompose_symplectic(m);
  CHECK(elem.factors.size() == 2);
  CHECK(max_abs(RMat(projection(elem) - m)) < 1e-12);
}

TEST_CASE("two-factor action composes right to left") {
  auto rng = case_rng(41, "mp/order");
  RMat shear(2, 2);
  shear << 1, -0.4, 0, 1;
  const MetaplecticElement elem = decompose_symplectic(shear);
  REQUIRE(elem.factors.size() == 2);
  GaussianState state;
  state.g = 1;
  state.k = 2;
  state.amplitudes = Vec(2);
  state.amplitudes << cd{0.3, 0.2}, cd{-1.0, 0.1};
  state.omega = random_siegel(rng, 1);
  GaussianState manual = act_on_gaussian(elem.factors[1], state);
  manual = act_on_gaussian(elem.factors[0], manual);
  const GaussianState combined = act(elem, state);
  CHECK(max_abs(Mat(combined.omega - manual.omega)) < 1e-12);
  CHECK((combined.amplitudes - manual.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_abs(Mat(combined.omega - sp_act_H(shear, state.omega))) < 1e-12);
}

TEST_CASE("half-form factor inverts the amplitude factor") {
  auto rng = case_rng(41, "mp/halfform");
  for (int g : {1, 2}) {
    const MetaplecticGenerator gen = random_generator(rng, g);
    const Mat omega = random_siegel(rng, g);
    const cd product = act_on_halfform(gen, omega).value * gaussian_action_scalar(gen, omega).value;
    CHECK(std::abs(product - 1.0) < 1e-13);
  }
}

TEST_CASE("half-form scalar squares to the chart jacobian determinant") {
  auto rng = case_rng(41, "mp/halfform-square");
  const int g = 2;
  const RMat m = random_symplectic(rng, g);
  const Mat omega = random_siegel(rng, g);
  const cd s = halfform_scalar(decompose_symplectic(m), omega).value;
  const Mat c = m.bottomLeftCorner(g, g).cast<cd>();
  const Mat d = m.bottomRightCorner(g, g).cast<cd>();
  const cd det = Mat(c * omega + d).determinant();
  CHECK(std::abs(s * s - det) < 1e-9 * std::abs(det));
}

TEST_CASE("frame transported covariantly") {
  auto rng = case_rng(41, "mp/frame");
  RMat j(2, 2);
  j << 0, -1, 1, 0;
  CHECK(sp_invariance_check(j, IVec::Zero(1), Mat::Constant(1, 1, iu), 2) < 1e-9);
  const RMat m = random_symplectic(rng, 1);
  CHECK(sp_invariance_check(m, IVec::Constant(1, 1), random_siegel(rng, 1), 2) < 1e-9);
}
