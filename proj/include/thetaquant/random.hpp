// Deterministic per-case randomness: every test case derives its own
// generator from (seed, case id), so cases can run in any order or in
// parallel and still reproduce bit-identically.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "thetaquant/metaplectic.hpp"
#include "thetaquant/types.hpp"

namespace thetaquant {

std::uint64_t fnv1a(std::string_view text);

std::mt19937_64 case_rng(std::uint64_t seed, std::string_view case_id);

// Uniform in [0, 1) from the top 53 bits; avoids the library-dependent
// std::uniform_real_distribution so streams match across toolchains.
double uniform_unit(std::mt19937_64& rng);

double uniform_range(std::mt19937_64& rng, double lo, double hi);

RMat random_symmetric(std::mt19937_64& rng, int g, double scale = 1.0);

// Entries in [-1, 1], redrawn until |det| > 0.3 so downstream solves stay
// well-conditioned.
RMat random_invertible(std::mt19937_64& rng, int g);

Mat random_siegel(std::mt19937_64& rng, int g);

MetaplecticGenerator random_generator(std::mt19937_64& rng, int g);

RMat random_symplectic(std::mt19937_64& rng, int g);

}  // namespace thetaquant
