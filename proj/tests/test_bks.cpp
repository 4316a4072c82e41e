#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "thetaquant/bks.hpp"
#include "thetaquant/errors.hpp"
#include "thetaquant/random.hpp"
#include "thetaquant/siegel.hpp"
#include "thetaquant/tropical.hpp"

using namespace thetaquant;

TEST_CASE("pairing anchors") {
  const Mat oi = Mat::Constant(1, 1, iu);
  const Mat o2i = Mat::Constant(1, 1, 2.0 * iu);
  CHECK(std::abs(halfform_pairing(1, oi, oi).value - 1.0) < 1e-14);
  CHECK(std::abs(halfform_pairing(1, oi, o2i).value - std::sqrt(1.5)) < 1e-14);
  const IVec z = IVec::Zero(1);
  CHECK(std::abs(prequantum_pairing(1, z, z, oi, oi) - std::pow(2.0, -0.5)) < 1e-14);
  CHECK(std::abs(prequantum_pairing(1, z, z, oi, o2i) - std::pow(3.0, -0.5)) < 1e-14);
  CHECK(std::abs(bks_frame_constant(1, 1) - std::pow(2.0, -0.5)) < 1e-15);
  CHECK(std::abs(bks_frame_constant(2, 3) - 1.0 / 18.0) < 1e-15);
}

TEST_CASE("product of the two pairings is polarization independent") {
  auto rng = case_rng(51, "bks/constant");
  for (int k : {1, 2, 3}) {
    const Mat a = random_siegel(rng, 1);
    const Mat b = random_siegel(rng, 1);
    const cd product =
        prequantum_pairing(k, IVec::Zero(1), IVec::Zero(1), a, b) * halfform_pairing(k, a, b).value;
    CHECK(std::abs(product - bks_frame_constant(1, k)) < 1e-12);
  }
  const Mat a2 = random_siegel(rng, 2);
  const Mat b2 = random_siegel(rng, 2);
  const cd product2 = prequantum_pairing(2, IVec::Zero(2), IVec::Zero(2), a2, b2) *
                      halfform_pairing(2, a2, b2).value;
  CHECK(std::abs(product2 - bks_frame_constant(2, 2)) < 1e-12);
}

TEST_CASE("distinct characteristics never pair") {
  auto rng = case_rng(51, "bks/off-diagonal");
  const Mat a = random_siegel(rng, 1);
  const Mat b = random_siegel(rng, 1);
  CHECK(std::abs(prequantum_pairing(3, IVec::Constant(1, 1), IVec::Constant(1, 2), a, b)) == 0.0);
  // Characteristic comparison happens mod k.
  CHECK(std::abs(prequantum_pairing(3, IVec::Constant(1, 1), IVec::Constant(1, 4), a, b) -
                 prequantum_pairing(3, IVec::Constant(1, 1), IVec::Constant(1, 1), a, b)) < 1e-15);
}

TEST_CASE("degenerate pairs are rejected") {
  const Mat real_omega = Mat::Constant(1, 1, cd{0.7, 0.0});
  CHECK_THROWS_AS(halfform_pairing(2, real_omega, real_omega), DegeneratePairError);

  QuantumVector u;
  u.g = 1;
  u.k = 2;
  u.tau = -Mat::Identity(1, 1);
  u.coeffs = Vec::Ones(2);
  CHECK_THROWS_AS(bks_pairing(u, u), DegeneratePairError);
}

TEST_CASE("half-form conversion continues from the center of the disc") {
  CHECK(std::abs(halfform_conversion(Mat::Zero(1, 1)).scalar.value - 1.0) < 1e-13);
  CHECK(std::abs(halfform_conversion(Mat::Constant(1, 1, cd{0.5, 0.0})).scalar.value -
                 std::sqrt(1.5)) < 1e-12);
  auto rng = case_rng(51, "bks/halfform-conversion");
  const Mat tau = cayley(random_siegel(rng, 2));
  const cd s = halfform_conversion(tau).scalar.value;
  const cd det = Mat(Mat::Identity(2, 2) + tau).determinant();
  CHECK(std::abs(s * s - det) < 1e-10 * std::abs(det));
}

TEST_CASE("pairing routes agree") {
  auto rng = case_rng(51, "bks/routes");
  const Mat tau = cayley(random_siegel(rng, 1));
  const Mat tau_p = cayley(random_siegel(rng, 1));
  const int k = 2;

  const Mat closed = frame_pairing_matrix(tau, tau_p, k);
  PairingParams quad;
  quad.route = PairingRoute::wb_quadrature;
  CHECK(max_abs(Mat(frame_pairing_matrix(tau, tau_p, k, quad) - closed)) < 1e-8);

  PairingParams grid;
  grid.route = PairingRoute::torus_grid;
  grid.torus_n = 32;
  CHECK(max_abs(Mat(frame_pairing_matrix(tau, tau_p, k, grid) - closed)) < 1e-8);
}

TEST_CASE("identity and transitivity of the polarization maps") {
  auto rng = case_rng(51, "bks/maps");
  const Mat t0 = cayley(random_siegel(rng, 1));
  const Mat t1 = cayley(random_siegel(rng, 1));
  const Mat t2 = cayley(random_siegel(rng, 1));
  const int k = 3;
  CHECK(max_abs(Mat(bks_map(t0, t0, k) - Mat::Identity(k, k))) < 1e-12);
  const Mat b01 = bks_map(t0, t1, k);
  const Mat b12 = bks_map(t1, t2, k);
  const Mat b02 = bks_map(t0, t2, k);
  CHECK(max_abs(Mat(b12 * b01 - b02)) < 1e-10);
  const Mat gram0 = frame_gram_matrix(t0, k);
  const Mat gram1 = frame_gram_matrix(t1, k);
  CHECK(max_abs(Mat(b01.adjoint() * gram1 * b01 - gram0)) < 1e-10);
}

TEST_CASE("heisenberg action on the frame") {
  // Level two: translating by a = (1) flips the sign of sigma^1.
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
  CHECK(std::abs(out.coeffs[1] - cd{-1.0, 0.0}) < 1e-15);
  CHECK(std::abs(out.coeffs[0]) < 1e-15);

  // b-translations shift the characteristic cyclically.
  HeisenbergElement shift;
  shift.lambda = 1.0;
  shift.a = IVec::Zero(1);
  shift.b = IVec::Constant(1, 1);
  const QuantumVector moved = heisenberg_act(shift, u);
  CHECK(std::abs(moved.coeffs[0]) > 0.5);
  CHECK(std::abs(moved.coeffs[1]) < 1e-15);
}

TEST_CASE("heisenberg group law") {
  const int k = 2;
  HeisenbergElement ha, hb;
  ha.lambda = hb.lambda = 1.0;
  ha.a = IVec::Constant(1, 1);
  ha.b = IVec::Zero(1);
  hb.a = IVec::Zero(1);
  hb.b = IVec::Constant(1, 1);
  const cd forward = heisenberg_product(ha, hb, k).lambda;
  const cd backward = heisenberg_product(hb, ha, k).lambda;
  CHECK(std::abs(forward / backward - cd{-1.0, 0.0}) < 1e-14);

  const Mat m = heisenberg_matrix(ha, 1, k);
  CHECK(max_abs(Mat(m.adjoint() * m - Mat::Identity(k, k))) < 1e-14);

  HeisenbergElement bad = ha;
  bad.lambda = 2.0;
  CHECK_THROWS_AS(validate(bad, k), InvalidParamsError);
}

TEST_CASE("level fibers of the boundary polarizations") {
  const BohrSommerfeldData vertical = bohr_sommerfeld(-Mat::Identity(1, 1), 2);
  REQUIRE(vertical.fibers.size() == 2);
  CHECK(max_abs(RMat(vertical.transform - RMat::Identity(2, 2))) < 1e-12);
  CHECK(std::abs(vertical.fibers[1].basepoint[1] - 0.5) < 1e-12);
  CHECK(std::abs(vertical.fibers[1].basepoint[0]) < 1e-12);

  const BohrSommerfeldData horizontal = bohr_sommerfeld(Mat::Identity(1, 1), 2);
  REQUIRE(horizontal.fibers.size() == 2);
  std::vector<double> xs;
  for (const Fiber& f : horizontal.fibers) {
    xs.push_back(f.basepoint[0]);
    CHECK(std::abs(f.directions(0, 0)) < 1e-12);  // leaves run vertically
    CHECK(std::abs(std::abs(f.directions(1, 0)) - 1.0) < 1e-12);
  }
  std::sort(xs.begin(), xs.end());
  CHECK(hausdorff_circle(xs, {0.0, 0.5}) < 1e-12);

  const Mat slope = Mat::Constant(1, 1, iu);
  const BohrSommerfeldData diagonal = bohr_sommerfeld(slope, 2);
  CHECK(max_abs(Mat(sp_act_D(diagonal.transform, -Mat::Identity(1, 1)) - slope)) < 1e-10);
  require_symplectic(diagonal.transform);

  CHECK_THROWS_AS(bohr_sommerfeld(Mat::Zero(1, 1), 2), NotReducibleError);
  const Mat steep = Mat::Constant(1, 1, cd{12.0 / 13.0, 5.0 / 13.0});
  CHECK_THROWS_AS(bohr_sommerfeld(steep, 1, 3), NoIntegerTransformFoundError);
}

TEST_CASE("regularized boundary pairings stabilize") {
  CHECK(intersection_pairing_check(Mat::Identity(1, 1), -Mat::Identity(1, 1), 2) < 1e-6);
  CHECK_THROWS_AS(intersection_pairing_check(-Mat::Identity(1, 1), -Mat::Identity(1, 1), 2),
                  NotTransverseError);
  CHECK_THROWS_AS(intersection_pairing_check(Mat::Zero(1, 1), -Mat::Identity(1, 1), 2),
                  InvalidParamsError);
}

TEST_CASE("limit matrix is the normalized character table") {
  const Mat s1 = smatrix_limit(1);
  CHECK(std::abs(s1(0, 0) - 1.0) < 1e-10);

  const Mat s2 = smatrix_limit(2);
  const double r = std::pow(2.0, -0.5);
  CHECK(std::abs(s2(0, 0) - r) < 1e-8);
  CHECK(std::abs(s2(1, 1) + r) < 1e-8);
  CHECK(max_abs(Mat(s2.adjoint() * s2 - Mat::Identity(2, 2))) < 1e-8);

  CHECK_THROWS_AS(smatrix_limit(2, {}), InvalidParamsError);
}
