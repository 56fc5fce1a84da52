// SPDX-License-Identifier: Apache-2.0
#ifndef NUVA_UTIL_HPP
#define NUVA_UTIL_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace nuva {

// FNV-1a over raw bytes. Used to key cached artifacts by content.
uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ull);
uint64_t fnv1a64(const std::string& s, uint64_t seed = 0xcbf29ce484222325ull);
std::string hex16(uint64_t h);

// Uniform double in [0, 1) from the top 53 bits of the engine output.
// std::uniform_real_distribution is implementation defined; this is not.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection, portable across standard libraries.
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Seeded Fisher-Yates shuffle of 0..n-1, deterministic for a given seed.
std::vector<size_t> shuffled_indices(size_t n, uint64_t seed);

// Runs fn(i) for i in [0, n) on up to n_threads threads. fn must be safe to
// call concurrently for distinct i. n_threads <= 1 runs inline.
void parallel_for(size_t n, int n_threads, const std::function<void(size_t)>& fn);

std::string format_double(double v, int precision = 9);

} // namespace nuva

#endif
