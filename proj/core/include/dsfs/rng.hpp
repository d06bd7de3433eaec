#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace dsfs {

// Derives an independent stream seed from a root seed, a subsystem tag and a
// salt. Every random consumer in the toolkit owns a (tag, salt) pair, so
// adding or removing one consumer never shifts the draws of another. The same
// inputs always map to the same seed on every platform.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                          std::uint64_t salt = 0);

// Deterministic uniform generator. Draws are produced by hand from raw 64-bit
// outputs instead of std distributions, whose sequences may differ between
// standard library implementations.
class SeedStream {
 public:
  explicit SeedStream(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1).
  double uniform();

  // Uniform double in [lo, hi). Requires lo <= hi; returns lo when lo == hi.
  double uniform(double lo, double hi);

  // Uniform integer in [0, n). Requires n > 0. Unbiased via rejection.
  std::uint64_t uniform_int(std::uint64_t n);

  // k distinct indices from [0, n) in draw order. Requires k <= n.
  std::vector<std::size_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k);

 private:
  std::mt19937_64 gen_;
};

}  // namespace dsfs
