#include "dsfs/rng.hpp"

#include <limits>

#include "dsfs/errors.hpp"

namespace dsfs {

namespace {

// splitmix64 finalizer; decorrelates the FNV hash below.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view tag,
                          std::uint64_t salt) {
  // FNV-1a over the tag bytes, folded with root and salt.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  h = mix(h ^ mix(root));
  h = mix(h ^ mix(salt));
  return h;
}

double SeedStream::uniform() {
  // 53 random mantissa bits; exact on every IEEE-754 double platform.
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double SeedStream::uniform(double lo, double hi) {
  if (!(lo <= hi)) throw InvalidConfig("uniform: lo > hi");
  return lo + uniform() * (hi - lo);
}

std::uint64_t SeedStream::uniform_int(std::uint64_t n) {
  if (n == 0) throw InvalidConfig("uniform_int: n must be positive");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x = gen_();
  while (x >= limit) x = gen_();
  return x % n;
}

std::vector<std::size_t> SeedStream::sample_without_replacement(
    std::size_t n, std::size_t k) {
  if (k > n) throw InvalidConfig("sample_without_replacement: k > n");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  // Partial Fisher-Yates: the first k slots are the sample, in draw order.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_int(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace dsfs
