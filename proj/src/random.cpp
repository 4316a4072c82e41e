#include "thetaquant/random.hpp"

#include <Eigen/Dense>

namespace thetaquant {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::mt19937_64 case_rng(std::uint64_t seed, std::string_view case_id) {
  return std::mt19937_64(seed ^ fnv1a(case_id));
}

double uniform_unit(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

double uniform_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(rng);
}

RMat random_symmetric(std::mt19937_64& rng, int g, double scale) {
  RMat m(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) m(i, j) = uniform_range(rng, -scale, scale);
  return 0.5 * (m + m.transpose());
}

RMat random_invertible(std::mt19937_64& rng, int g) {
  while (true) {
    RMat m(g, g);
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) m(i, j) = uniform_range(rng, -1.0, 1.0);
    if (std::abs(m.determinant()) > 0.3) return m;
  }
}

Mat random_siegel(std::mt19937_64& rng, int g) {
  const RMat o1 = random_symmetric(rng, g);
  RMat r(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) r(i, j) = uniform_range(rng, -1.0, 1.0);
  const RMat o2 = r.transpose() * r + 0.3 * RMat::Identity(g, g);
  return o1.cast<cd>() + iu * o2.cast<cd>();
}

MetaplecticGenerator random_generator(std::mt19937_64& rng, int g) {
  const RMat p = random_symmetric(rng, g);
  const RMat q = random_symmetric(rng, g);
  const RMat l = random_invertible(rng, g);
  return make_generator(p, l, q);
}

RMat random_symplectic(std::mt19937_64& rng, int g) {
  return generator_to_symplectic(random_generator(rng, g)) *
         generator_to_symplectic(random_generator(rng, g));
}

}  // namespace thetaquant
