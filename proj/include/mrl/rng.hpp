#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace mrl {

// xoshiro256++ seeded through SplitMix64. Distributions are implemented by
// hand instead of with <random> so that a seed produces the same stream on
// every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Stream for a named component of a larger computation. The result depends
  // only on (root, label, index), never on how many other streams exist or in
  // what order they are created, so adding a consumer never shifts the draws
  // seen by the others.
  static Rng substream(std::uint64_t root, std::string_view label,
                       std::uint64_t index = 0);

  std::uint64_t next();

  double uniform();      // [0, 1)
  double uniform_pos();  // (0, 1]
  double uniform(double lo, double hi);
  double normal();

  // Unbiased draw from [0, n). n must be positive.
  std::size_t index(std::size_t n);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

std::uint64_t fnv1a64(std::string_view s);

// Seed for a named child of root; Rng::substream(root, label, index) is
// exactly Rng(derive_seed(root, label, index)).
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t index = 0);

}  // namespace mrl
