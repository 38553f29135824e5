#include "vecor/rng.hpp"

#include <cmath>
#include <numbers>

#include "vecor/error.hpp"

namespace vecor {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::string_view stream)
    : seed_(seed), state_(mix64(seed) ^ mix64(fnv1a(stream) + kGolden)) {}

std::uint64_t SeededRng::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double SeededRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double a, double b) {
  if (!(a < b)) throw ConfigError("uniform: require a < b");
  return a + (b - a) * uniform01();
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  while (u1 <= 0.0) u1 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double SeededRng::gamma(double shape) {
  // Marsaglia-Tsang; shape < 1 boosted via Gamma(shape+1) * U^(1/shape).
  if (shape < 1.0) {
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
      return d * v;
  }
}

double SeededRng::beta(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("beta: require alpha > 0");
  if (alpha == 1.0) return uniform01();
  double g1 = gamma(alpha);
  double g2 = gamma(alpha);
  return g1 / (g1 + g2);
}

std::int64_t SeededRng::int_range(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw ConfigError("int_range: require lo <= hi");
  auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next_u64() % span);
}

std::vector<double> SeededRng::normal_vec(std::size_t n) {
  std::vector<double> out(n);
  for (auto& v : out) v = normal();
  return out;
}

std::vector<double> SeededRng::uniform_vec(std::size_t n, double a, double b) {
  std::vector<double> out(n);
  for (auto& v : out) v = uniform(a, b);
  return out;
}

}  // namespace vecor
