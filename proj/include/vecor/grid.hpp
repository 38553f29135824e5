#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace vecor {

enum class Space : std::uint8_t { Image = 0, Latent = 1, Velocity = 2, Noise = 3 };

const char* space_name(Space s);
Space space_from_name(const std::string& name);

struct Shape {
  std::uint32_t b = 0, c = 0, h = 0, w = 0;
  std::size_t count() const {
    return std::size_t(b) * c * h * w;
  }
  std::size_t sample_size() const { return std::size_t(c) * h * w; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Batched rank-4 array [B,C,H,W] of doubles with a space tag. Values are
// treated as immutable once a public operation has produced them; mutable
// access exists for construction inside operators.
class BatchGrid {
 public:
  BatchGrid() = default;
  BatchGrid(Shape shape, Space space, double fill = 0.0);
  BatchGrid(Shape shape, Space space, std::vector<double> data);

  const Shape& shape() const { return shape_; }
  Space space() const { return space_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t b, std::size_t c, std::size_t h, std::size_t w);
  double at(std::size_t b, std::size_t c, std::size_t h, std::size_t w) const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> sample(std::size_t b);
  std::span<const double> sample(std::size_t b) const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  BatchGrid retag(Space space) const;
  // Throws NumericError naming `context` if any entry is NaN/Inf.
  void check_finite(const std::string& context) const;
  bool equals_bitwise(const BatchGrid& other) const;

 private:
  Shape shape_;
  Space space_ = Space::Latent;
  std::vector<double> data_;
};

enum class ElemOp { Add, Sub, Mul };

// out[i] = op(a[i], scale * b[i]); space tag taken from a.
BatchGrid grid_elementwise(const BatchGrid& a, const BatchGrid& b, ElemOp op,
                           double scale = 1.0);

// Population standard deviation over all C*H*W entries of each sample.
std::vector<double> per_sample_std(const BatchGrid& x);

// Binary dump: little-endian B,C,H,W as u32, space tag as one byte, then
// B*C*H*W doubles row-major.
void write_grid(const std::string& path, const BatchGrid& g);
BatchGrid read_grid(const std::string& path);

}  // namespace vecor
