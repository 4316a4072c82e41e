// Acceptance gate: one line per criterion, nonzero exit if any fail.
// Tolerances and budgets are fixed here, not configurable.
#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

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

using namespace thetaquant;

namespace {

constexpr std::uint64_t kSeed = 2026;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

double rel_diff(cd a, cd b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// 1. Frame pairing matrices across polarization pairs equal the constant
//    multiple of the identity, via grid and line quadrature oracles.
Outcome criterion_gram_constancy() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int g : {1, 2})
    for (int k : {1, 2, 3}) {
      auto rng = case_rng(kSeed, "acc/gram-" + std::to_string(g) + "-" + std::to_string(k));
      PairingParams params;
      if (g == 1) {
        params.route = PairingRoute::torus_grid;
        params.torus_n = 64;
      } else {
        params.route = PairingRoute::wb_quadrature;
        params.quad_points = 400;
      }
      const long n = charv_count(g, k);
      const Mat target = bks_frame_constant(g, k) * Mat::Identity(n, n);
      for (int trial = 0; trial < 10; ++trial) {
        const Mat tau = cayley(random_siegel(rng, g));
        const Mat tau_p = cayley(random_siegel(rng, g));
        const Mat p = frame_pairing_matrix(tau, tau_p, k, params);
        worst = std::max(worst, max_abs(Mat(p - target)));
      }
    }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = worst < 1e-7 && secs < 60.0;
  return {pass, fmt("max |P - c I| = %.2e, %.1fs", worst, secs)};
}

// 2. Closed-form component pairing against direct line quadrature.
Outcome criterion_prequantum_quadrature() {
  const auto start = std::chrono::steady_clock::now();
  auto rng = case_rng(kSeed, "acc/prequantum");
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + trial % 2;
    const Mat omega = random_siegel(rng, 1);
    const Mat omega_p = random_siegel(rng, 1);
    const cd closed = prequantum_pairing(k, IVec::Zero(1), IVec::Zero(1), omega, omega_p);
    const double rate = k * (omega(0, 0).imag() + omega_p(0, 0).imag());
    const double w = 4.0 / std::sqrt(rate);
    const cd quad = trapezoid_nd(
        [&](const RVec& y) {
          return std::exp(iu * pi * static_cast<double>(k) *
                          (omega(0, 0) - std::conj(omega_p(0, 0))) * y[0] * y[0]);
        },
        1, w, 32768);
    worst = std::max(worst, rel_diff(closed, quad));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = worst < 1e-8 && secs < 10.0;
  return {pass, fmt("max rel err = %.2e, %.1fs", worst, secs)};
}

// 3. Grid transform round trip and pairing identity on random sections.
Outcome criterion_wb_identities() {
  auto rng = case_rng(kSeed, "acc/wb");
  double worst_rt = 0.0, worst_pair = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + trial % 3;
    const int n = 6 * k;
    SampledSection s, sp;
    s.g = sp.g = 1;
    s.k = sp.k = k;
    s.N = sp.N = n;
    s.data = Vec(n * n);
    sp.data = Vec(n * n);
    for (long i = 0; i < s.data.size(); ++i) {
      s.data[i] = cd{uniform_range(rng, -1.0, 1.0), uniform_range(rng, -1.0, 1.0)};
      sp.data[i] = cd{uniform_range(rng, -1.0, 1.0), uniform_range(rng, -1.0, 1.0)};
    }
    const SampledSection back = wb_inverse(wb_forward(s));
    worst_rt = std::max(worst_rt, (back.data - s.data).cwiseAbs().maxCoeff());
    const auto [torus, comps] = wb_unitarity_check(s, sp);
    worst_pair = std::max(worst_pair, std::abs(torus - comps) / std::abs(torus));
  }
  const bool pass = worst_rt < 1e-10 && worst_pair < 1e-8;
  return {pass, fmt("round trip %.2e, pairing %.2e", worst_rt, worst_pair)};
}

// 4. Generator action against quadrature of its integral kernel, plus
//    norm preservation of the closed-form amplitude factor.
Outcome criterion_kernel_quadrature() {
  auto rng = case_rng(kSeed, "acc/kernel");
  double worst = 0.0, worst_norm = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int k = 1 + trial % 2;
    const MetaplecticGenerator gen = random_generator(rng, 1);
    const Mat omega = random_siegel(rng, 1);
    GaussianState state;
    state.g = 1;
    state.k = k;
    state.amplitudes = Vec::Ones(k);
    state.omega = omega;
    const GaussianState image = act_on_gaussian(gen, state);

    const double p = gen.P(0, 0), q = gen.Q(0, 0), lmat = gen.L(0, 0);
    cd unit = 1.0;
    for (int t = 0; t < ((gen.m % 4) + 4) % 4; ++t) unit *= iu;
    const cd front = unit * std::sqrt(std::abs(lmat)) * std::sqrt(static_cast<double>(k)) *
                     std::exp(-iu * pi / 4.0);
    for (double u : {0.2, -0.7}) {
      const cd lhs = trapezoid_nd(
          [&](const RVec& vv) {
            const double v = vv[0];
            const cd phase = iu * pi * static_cast<double>(k) *
                             (p * u * u - 2.0 * lmat * u * v + q * v * v);
            return front * std::exp(phase) *
                   std::exp(iu * pi * static_cast<double>(k) * omega(0, 0) * v * v);
          },
          1, 8.0, 2048);
      const cd rhs = image.amplitudes[0] *
                     std::exp(iu * pi * static_cast<double>(k) * image.omega(0, 0) * u * u);
      worst = std::max(worst, rel_diff(lhs, rhs));
    }
    const cd scalar = gaussian_action_scalar(gen, omega).value;
    worst_norm = std::max(worst_norm, std::abs(std::norm(scalar) -
                                               std::sqrt(image.omega(0, 0).imag() /
                                                         omega(0, 0).imag())));
  }
  const bool pass = worst < 1e-6 && worst_norm < 1e-6;
  return {pass, fmt("kernel %.2e, norm %.2e", worst, worst_norm)};
}

// 5. Transport of the canonical frame along symplectic matrices,
//    including matrices that need both factors of the decomposition.
Outcome criterion_frame_invariance() {
  auto rng = case_rng(kSeed, "acc/frame");
  std::vector<RMat> matrices;
  for (int trial = 0; trial < 6; ++trial) matrices.push_back(random_symplectic(rng, 1));
  for (double b : {0.7, -1.3}) {
    RMat shear(2, 2);
    shear << 1, b, 0, 1;
    matrices.push_back(shear);
  }
  for (double a : {1.5, 0.6}) {
    RMat stretch(2, 2);
    stretch << a, 0, 0, 1.0 / a;
    matrices.push_back(stretch);
  }
  int two_factor = 0;
  double worst = 0.0;
  for (const RMat& m : matrices) {
    if (decompose_symplectic(m).factors.size() == 2) ++two_factor;
    for (int k : {1, 2})
      for (int l = 0; l < k; ++l)
        worst = std::max(worst,
                         sp_invariance_check(m, IVec::Constant(1, l), random_siegel(rng, 1), k));
  }
  const bool pass = worst < 1e-7 && two_factor >= 2;
  return {pass, fmt("max residual %.2e, two-factor count %.0f", worst,
                    static_cast<double>(two_factor))};
}

// 6. Transitivity and unitarity of the polarization-change maps on
//    interior triples, by quadrature.
Outcome criterion_map_transitivity() {
  double worst = 0.0;
  for (int round = 0; round < 3; ++round) {
    const int g = round == 2 ? 2 : 1;
    const int k = round == 1 ? 3 : 2;
    auto rng = case_rng(kSeed, "acc/maps-" + std::to_string(round));
    PairingParams params;
    params.route = PairingRoute::wb_quadrature;
    params.quad_points = g == 1 ? 2048 : 400;
    const Mat t0 = cayley(random_siegel(rng, g));
    const Mat t1 = cayley(random_siegel(rng, g));
    const Mat t2 = cayley(random_siegel(rng, g));
    const Mat b01 = bks_map(t0, t1, k, params);
    const Mat b12 = bks_map(t1, t2, k, params);
    const Mat b02 = bks_map(t0, t2, k, params);
    worst = std::max(worst, max_abs(Mat(b12 * b01 - b02)));
    const Mat gram0 = frame_gram_matrix(t0, k, params);
    const Mat gram1 = frame_gram_matrix(t1, k, params);
    worst = std::max(worst, max_abs(Mat(b01.adjoint() * gram1 * b01 - gram0)));
  }
  return {worst < 1e-8, fmt("max residual %.2e", worst)};
}

// 7. The maps intertwine the finite translation group, all generators.
Outcome criterion_heisenberg_intertwining() {
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k) {
    auto rng = case_rng(kSeed, "acc/heisenberg-" + std::to_string(k));
    const Mat tau = cayley(random_siegel(rng, 1));
    const Mat tau_p = cayley(random_siegel(rng, 1));
    PairingParams params;
    params.route = PairingRoute::wb_quadrature;
    for (int which = 0; which < 2; ++which) {
      HeisenbergElement h;
      h.lambda = 1.0;
      h.a = IVec::Constant(1, which == 0 ? 1 : 0);
      h.b = IVec::Constant(1, which == 0 ? 0 : 1);
      worst = std::max(worst, intertwining_heisenberg_check(tau, tau_p, h, k, params));
    }
  }
  return {worst < 1e-8, fmt("max commutator residual %.2e", worst)};
}

// 8. Pairings at regularized boundary points settle on the constant.
Outcome criterion_boundary_stability() {
  double worst = 0.0;
  for (int k : {1, 2})
    worst = std::max(worst, intersection_pairing_check(Mat::Identity(1, 1), -Mat::Identity(1, 1),
                                                       k, {1e-2, 1e-3, 1e-4}));
  // Cross-check one regularized pairing against quadrature.
  const double eps = 1e-3;
  const Mat omega = Mat::Constant(1, 1, iu * eps);
  const Mat omega_p = Mat::Constant(1, 1, iu / eps);
  const cd closed = prequantum_pairing(2, IVec::Zero(1), IVec::Zero(1), omega, omega_p);
  const Mat arg = 2.0 * iu * (omega_p.conjugate() - omega);
  const cd quad = gaussian_integral_quadrature(arg, 4.0 / std::sqrt(arg.real()(0, 0)), 2000);
  const double cross = rel_diff(closed, quad);
  const bool pass = worst < 1e-6 && cross < 1e-8;
  return {pass, fmt("max |value - c| = %.2e, quadrature cross-check %.2e", worst, cross)};
}

// 9. Limit matrix of the boundary frames is the normalized character table.
Outcome criterion_smatrix() {
  double worst = 0.0;
  for (int k = 1; k <= 4; ++k) {
    const Mat s = smatrix_limit(k);
    worst = std::max(worst, max_abs(Mat(s.adjoint() * s - Mat::Identity(k, k))));
    const double modulus = 1.0 / std::sqrt(static_cast<double>(k));
    for (int n = 0; n < k; ++n)
      for (int l = 0; l < k; ++l)
        worst = std::max(worst, std::abs(std::abs(s(n, l)) - modulus));
  }
  return {worst < 1e-4, fmt("max deviation %.2e", worst)};
}

// 10. Zero loci along the degenerating ray approach the tie locus.
Outcome criterion_tropical() {
  const auto start = std::chrono::steady_clock::now();
  GeodesicRay ray{RMat::Identity(1, 1), RMat::Zero(1, 1), RVec::Ones(1)};
  double worst = 0.0;
  bool decreasing = true;
  for (int k : {1, 2}) {
    const auto divisor = tropical_divisor_g1(k);
    double prev = 0.0;
    for (int si = 0; si < 2; ++si) {
      LatticeData data{1, k, omega_at(ray, 3.0 + si)};
      const auto zeros = theta_zero_locus(data, Vec::Ones(k));
      const double dist = hausdorff_circle(project_to_y(zeros), divisor);
      if (si == 0) {
        worst = std::max(worst, dist);
        prev = dist;
      } else {
        decreasing = decreasing && dist <= prev + 1e-6;
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = worst < 0.02 && decreasing && secs < 30.0;
  return {pass, fmt("distance at s=3: %.2e, %.1fs", worst, secs) +
                    (decreasing ? "" : ", not decreasing")};
}

// 11. The aggregated property suites pass end to end.
Outcome criterion_verify_all() {
  const std::string cmd = std::string(THETAQUANT_CLI_PATH) + " verify all 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {false, "could not spawn the verifier"};
  std::string out;
  std::array<char, 4096> buf;
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  const int status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  const bool pass = status == 0 && out.find("\"overall_pass\": true") != std::string::npos;
  return {pass, "exit status " + std::to_string(status)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"frame pairing constancy across polarization pairs", criterion_gram_constancy},
      {"component pairing closed form vs line quadrature", criterion_prequantum_quadrature},
      {"grid transform round trip and pairing identity", criterion_wb_identities},
      {"generator action vs integral kernel quadrature", criterion_kernel_quadrature},
      {"frame transport along symplectic matrices", criterion_frame_invariance},
      {"transitivity and unitarity of polarization maps", criterion_map_transitivity},
      {"finite translation group intertwining", criterion_heisenberg_intertwining},
      {"regularized boundary pairing stability", criterion_boundary_stability},
      {"boundary frame limit matrix", criterion_smatrix},
      {"zero loci approach the tie locus along the ray", criterion_tropical},
      {"aggregated verification suites", criterion_verify_all},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("criterion %02zu %s %s (%s)\n", i + 1, outcome.pass ? "PASS" : "FAIL",
                criteria[i].first, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("acceptance: %s (%zu/%zu)\n", failures == 0 ? "PASS" : "FAIL",
              criteria.size() - failures, criteria.size());
  return failures;
}
