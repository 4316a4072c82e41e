#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "thetaquant/errors.hpp"
#include "thetaquant/random.hpp"
#include "thetaquant/siegel.hpp"

using namespace thetaquant;

TEST_CASE("chart anchors") {
  CHECK(max_abs(Mat(cayley(Mat::Constant(1, 1, iu)))) < 1e-15);
  const Mat tau = cayley(Mat::Constant(1, 1, cd{1.0, 1.0}));
  CHECK(std::abs(tau(0, 0) - cd{-0.2, 0.4}) < 1e-14);
  CHECK(in_disc(tau));
}

TEST_CASE("charts invert each other") {
  auto rng = case_rng(11, "siegel/chart-inverse");
  for (int g : {1, 2, 3}) {
    const Mat omega = random_siegel(rng, g);
    CHECK(max_abs(Mat(cayley_inverse(cayley(omega)) - omega)) < 1e-12);
  }
  CHECK_THROWS_AS(cayley_inverse(-Mat::Identity(2, 2)), ChartSingularError);
}

TEST_CASE("group action in both charts") {
  RMat j(2, 2);
  j << 0, -1, 1, 0;
  // i is the fixed point of the flip.
  CHECK(std::abs(sp_act_H(j, Mat::Constant(1, 1, iu))(0, 0) - iu) < 1e-14);
  // On the disc the flip exchanges the two real boundary points.
  CHECK(std::abs(sp_act_D(j, -Mat::Identity(1, 1))(0, 0) - 1.0) < 1e-14);

  auto rng = case_rng(11, "siegel/equivariance");
  for (int g : {1, 2}) {
    const RMat m = random_symplectic(rng, g);
    const Mat omega = random_siegel(rng, g);
    CHECK(max_abs(Mat(cayley(sp_act_H(m, omega)) - sp_act_D(m, cayley(omega)))) < 1e-10);
  }
}

TEST_CASE("symplectic guard") {
  RMat not_symplectic = RMat::Identity(2, 2);
  not_symplectic(0, 0) = 2.0;
  CHECK_THROWS_AS(require_symplectic(not_symplectic), NotSymplecticError);
}

TEST_CASE("membership tolerances") {
  CHECK(in_siegel(Mat::Constant(1, 1, iu)));
  CHECK(!in_siegel(Mat::Constant(1, 1, cd{1.0, -0.1})));
  CHECK(in_disc(Mat::Zero(2, 2)));
  CHECK(in_disc(-Mat::Identity(2, 2)));  // boundary counts
  CHECK(!in_disc(Mat::Constant(1, 1, cd{1.2, 0.0})));
}

TEST_CASE("compatible complex structure squares to minus one") {
  auto rng = case_rng(11, "siegel/complex-structure");
  for (int g : {1, 2, 3}) {
    const RMat j = complex_structure(random_siegel(rng, g));
    CHECK(max_abs(RMat(j * j + RMat::Identity(2 * g, 2 * g))) < 1e-11);
  }
}

TEST_CASE("metric anchors") {
  RMat expected(2, 2);
  expected << 1, -1, -1, 2;
  CHECK(max_abs(RMat(siegel_metric(Mat::Constant(1, 1, cd{1.0, 1.0})) - expected)) < 1e-12);

  const double s = 0.7;
  const RMat gamma = siegel_metric(Mat::Constant(1, 1, iu * std::exp(2.0 * s)));
  CHECK(std::abs(gamma(0, 0) - std::exp(-2.0 * s)) < 1e-12);
  CHECK(std::abs(gamma(1, 1) - std::exp(2.0 * s)) < 1e-12);
  CHECK(std::abs(gamma(0, 1)) < 1e-12);
}

TEST_CASE("metric is symplectic-invariant") {
  auto rng = case_rng(11, "siegel/metric-invariance");
  const int g = 2;
  const Mat omega = random_siegel(rng, g);
  const RMat m = random_symplectic(rng, g);
  // gamma transforms by congruence with the inverse differential: pulling
  // back along M recovers the metric at the image point.
  const RMat pulled = m.transpose() * siegel_metric(sp_act_H(m, omega)) * m;
  CHECK(max_abs(RMat(pulled - siegel_metric(omega))) < 1e-9);
}
