#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace vecor {

// Counter-based deterministic random source. Each (seed, stream-name) pair
// owns an independent substream; replaying the same call sequence reproduces
// the same values bit-for-bit.
class SeededRng {
 public:
  SeededRng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of mantissa.
  double uniform01();
  double uniform(double a, double b);
  // Standard normal via Box-Muller (second value cached).
  double normal();
  // Beta(alpha, alpha); Beta(1,1) is exactly uniform01.
  double beta(double alpha);
  // Inclusive integer range.
  std::int64_t int_range(std::int64_t lo, std::int64_t hi);

  std::vector<double> normal_vec(std::size_t n);
  std::vector<double> uniform_vec(std::size_t n, double a, double b);

  std::uint64_t seed() const { return seed_; }

 private:
  double gamma(double shape);

  std::uint64_t seed_;
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vecor
