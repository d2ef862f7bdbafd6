#include "limase/random.hpp"

#include <cmath>
#include <numbers>

#include "limase/error.hpp"

namespace limase {

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t RandomStream::uniform_index(std::size_t n) {
  if (n == 0) throw InvalidArgument("uniform_index: n must be positive");
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<std::size_t>(v % bound);
}

RandomStream RandomStream::child(std::uint64_t index) const {
  return RandomStream(derive_seed(seed_, index));
}

std::uint64_t derive_seed(std::uint64_t parent_seed, std::uint64_t index) {
  std::uint64_t z = parent_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> draw_gaussian(RandomStream& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = rng.gaussian();
  return out;
}

}  // namespace limase
