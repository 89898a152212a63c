#pragma once

#include <cstdint>
#include <string_view>

namespace cdbn {

// Counter-based generator: output k is a SplitMix64 mix of key + k·φ, so a
// stream is fully determined by its key and any substream can be derived
// without advancing a parent. Uniform and normal transforms are done here
// (not via <random> distributions) so streams are platform-stable.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  // Key for the named substream `index` of a top-level seed.
  static std::uint64_t derive(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);
  static CounterRng substream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
    return CounterRng(derive(seed, name, index));
  }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Standard normal (Box–Muller, second variate cached).
  double normal();
  bool coin() { return (next_u64() >> 63) != 0; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace cdbn
