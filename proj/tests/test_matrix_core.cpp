#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "thetaquant/errors.hpp"
#include "thetaquant/matrix_core.hpp"

using namespace thetaquant;

TEST_CASE("inverse square root on the principal branch") {
  CHECK(std::abs(det_invsqrt_posreal(Mat::Identity(3, 3)).value - 1.0) < 1e-14);
  CHECK(std::abs(det_invsqrt_posreal(Mat::Constant(1, 1, cd{2.0, 0.0})).value -
                 std::pow(2.0, -0.5)) < 1e-14);
  const cd z{1.0, 1.0};
  CHECK(std::abs(det_invsqrt_posreal(Mat::Constant(1, 1, z)).value - std::pow(z, cd{-0.5, 0.0})) <
        1e-14);
  Mat two = Mat::Zero(2, 2);
  two(0, 0) = cd{1.0, 2.0};
  two(1, 1) = cd{3.0, -1.0};
  const cd det = two(0, 0) * two(1, 1);
  CHECK(std::abs(det_invsqrt_posreal(two).value * det_invsqrt_posreal(two).value * det - 1.0) <
        1e-13);
}

TEST_CASE("inverse square root guards") {
  CHECK_THROWS_AS(det_invsqrt_posreal(Mat::Zero(2, 2)), SingularMatrixError);
  CHECK_THROWS_AS(det_invsqrt_posreal(Mat::Constant(1, 1, cd{-1.0, 0.0})), RealPartNegativeError);
  Mat asym(2, 2);
  asym << cd{1.0, 0.0}, cd{2.0, 0.0}, cd{0.0, 0.0}, cd{1.0, 0.0};
  CHECK_THROWS_AS(require_complex_symmetric(asym), NonSymmetricError);
}

TEST_CASE("path-continued square root tracks the winding") {
  // A constant path stays at the principal value.
  const auto constant = [](double) { return Mat(Mat::Constant(1, 1, cd{4.0, 0.0})); };
  CHECK(std::abs(det_sqrt_path(constant, 16).value - 2.0) < 1e-13);

  // One full turn of the determinant flips the sign of the root.
  const auto loop = [](double t) { return Mat(std::exp(2.0 * pi * iu * t) * Mat::Identity(1, 1)); };
  CHECK(std::abs(det_sqrt_path(loop, 64).value - cd{-1.0, 0.0}) < 1e-12);

  // Step count must not matter once the walk resolves the winding.
  CHECK(std::abs(det_sqrt_path(loop, 64).value - det_sqrt_path(loop, 257).value) < 1e-12);

  const auto crossing = [](double t) { return Mat((1.0 - 2.0 * t) * Mat::Identity(1, 1)); };
  CHECK_THROWS_AS(det_sqrt_path(crossing, 64), PathCrossesZeroError);
}

TEST_CASE("principal square root stays on the right half plane") {
  for (cd z : {cd{2.0, 1.0}, cd{0.3, -4.0}, cd{-1.0, 0.1}}) {
    const cd r = principal_sqrt(z);
    CHECK(std::abs(r * r - z) < 1e-12);
    CHECK(r.real() >= 0.0);
  }
}

TEST_CASE("positive definiteness probe") {
  RMat good(2, 2);
  good << 2.0, 0.3, 0.3, 1.0;
  CHECK(is_posdef(good, 1e-12));
  RMat bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK(!is_posdef(bad, 1e-12));
}
