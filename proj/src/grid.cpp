#include "vecor/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "vecor/error.hpp"

namespace vecor {

const char* space_name(Space s) {
  switch (s) {
    case Space::Image: return "image";
    case Space::Latent: return "latent";
    case Space::Velocity: return "velocity";
    case Space::Noise: return "noise";
  }
  return "?";
}

Space space_from_name(const std::string& name) {
  if (name == "image") return Space::Image;
  if (name == "latent") return Space::Latent;
  if (name == "velocity") return Space::Velocity;
  if (name == "noise") return Space::Noise;
  throw ConfigError("unknown space name: " + name);
}

std::string Shape::str() const {
  return "(" + std::to_string(b) + "," + std::to_string(c) + "," +
         std::to_string(h) + "," + std::to_string(w) + ")";
}

BatchGrid::BatchGrid(Shape shape, Space space, double fill)
    : shape_(shape), space_(space), data_(shape.count(), fill) {}

BatchGrid::BatchGrid(Shape shape, Space space, std::vector<double> data)
    : shape_(shape), space_(space), data_(std::move(data)) {
  if (data_.size() != shape_.count())
    throw ConfigError("BatchGrid: data length " + std::to_string(data_.size()) +
                      " does not match shape " + shape_.str());
}

double& BatchGrid::at(std::size_t b, std::size_t c, std::size_t h, std::size_t w) {
  return data_[((b * shape_.c + c) * shape_.h + h) * shape_.w + w];
}

double BatchGrid::at(std::size_t b, std::size_t c, std::size_t h, std::size_t w) const {
  return data_[((b * shape_.c + c) * shape_.h + h) * shape_.w + w];
}

std::span<double> BatchGrid::sample(std::size_t b) {
  return std::span<double>(data_).subspan(b * shape_.sample_size(),
                                          shape_.sample_size());
}

std::span<const double> BatchGrid::sample(std::size_t b) const {
  return std::span<const double>(data_).subspan(b * shape_.sample_size(),
                                                shape_.sample_size());
}

BatchGrid BatchGrid::retag(Space space) const {
  BatchGrid out = *this;
  out.space_ = space;
  return out;
}

void BatchGrid::check_finite(const std::string& context) const {
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i]))
      throw NumericError(context + ": non-finite value at flat index " +
                         std::to_string(i));
  }
}

bool BatchGrid::equals_bitwise(const BatchGrid& other) const {
  if (!(shape_ == other.shape_) || space_ != other.space_) return false;
  return std::memcmp(data_.data(), other.data_.data(),
                     data_.size() * sizeof(double)) == 0;
}

BatchGrid grid_elementwise(const BatchGrid& a, const BatchGrid& b, ElemOp op,
                           double scale) {
  if (!(a.shape() == b.shape()))
    throw ConfigError("grid_elementwise: shape mismatch " + a.shape().str() +
                      " vs " + b.shape().str());
  BatchGrid out(a.shape(), a.space());
  auto pa = a.data();
  auto pb = b.data();
  auto po = out.data();
  switch (op) {
    case ElemOp::Add:
      for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] + scale * pb[i];
      break;
    case ElemOp::Sub:
      for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] - scale * pb[i];
      break;
    case ElemOp::Mul:
      for (std::size_t i = 0; i < po.size(); ++i) po[i] = pa[i] * (scale * pb[i]);
      break;
  }
  out.check_finite("grid_elementwise");
  return out;
}

std::vector<double> per_sample_std(const BatchGrid& x) {
  const std::size_t n = x.shape().sample_size();
  if (n < 2)
    throw ConfigError("per_sample_std: sample has " + std::to_string(n) +
                      " entries, need >= 2");
  std::vector<double> out(x.shape().b);
  for (std::size_t b = 0; b < x.shape().b; ++b) {
    auto s = x.sample(b);
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= double(n);
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    out[b] = std::sqrt(var / double(n));  // population convention
  }
  return out;
}

void write_grid(const std::string& path, const BatchGrid& g) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  const Shape& s = g.shape();
  std::uint32_t dims[4] = {s.b, s.c, s.h, s.w};
  f.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  auto tag = static_cast<std::uint8_t>(g.space());
  f.write(reinterpret_cast<const char*>(&tag), 1);
  f.write(reinterpret_cast<const char*>(g.data().data()),
          static_cast<std::streamsize>(g.size() * sizeof(double)));
  if (!f) throw IoError("write failed: " + path);
}

BatchGrid read_grid(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for read: " + path);
  std::uint32_t dims[4];
  f.read(reinterpret_cast<char*>(dims), sizeof(dims));
  std::uint8_t tag = 0;
  f.read(reinterpret_cast<char*>(&tag), 1);
  if (!f) throw IoError("truncated grid header: " + path);
  if (tag > 3) throw IoError("bad space tag in " + path);
  Shape shape{dims[0], dims[1], dims[2], dims[3]};
  std::vector<double> data(shape.count());
  f.read(reinterpret_cast<char*>(data.data()),
         static_cast<std::streamsize>(data.size() * sizeof(double)));
  if (!f) throw IoError("truncated grid payload: " + path);
  return BatchGrid(shape, static_cast<Space>(tag), std::move(data));
}

}  // namespace vecor
