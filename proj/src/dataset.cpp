#include "vecor/dataset.hpp"

#include <cmath>
#include <numbers>

#include "vecor/error.hpp"

namespace vecor {

const char* dataset_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::Gauss2: return "gauss2";
    case DatasetKind::Rings: return "rings";
    case DatasetKind::Checker: return "checker";
    case DatasetKind::Grid8: return "grid8";
  }
  return "?";
}

DatasetKind dataset_from_name(const std::string& name) {
  for (DatasetKind k : {DatasetKind::Gauss2, DatasetKind::Rings,
                        DatasetKind::Checker, DatasetKind::Grid8})
    if (name == dataset_name(k)) return k;
  throw ConfigError("unknown dataset: " + name);
}

Shape dataset_sample_shape(DatasetKind kind) {
  if (kind == DatasetKind::Grid8) return Shape{0, 3, 8, 8};
  return Shape{0, 2, 1, 1};
}

namespace {

void fill_gauss2(BatchGrid& g, SeededRng& rng) {
  for (std::size_t i = 0; i < g.shape().b; ++i) {
    double mx = rng.uniform01() < 0.5 ? -2.0 : 2.0;
    g.at(i, 0, 0, 0) = mx + 0.5 * rng.normal();
    g.at(i, 1, 0, 0) = 0.5 * rng.normal();
  }
}

void fill_rings(BatchGrid& g, SeededRng& rng) {
  for (std::size_t i = 0; i < g.shape().b; ++i) {
    double r = (rng.uniform01() < 0.5 ? 1.0 : 2.0) + 0.05 * rng.normal();
    double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    g.at(i, 0, 0, 0) = r * std::cos(theta);
    g.at(i, 1, 0, 0) = r * std::sin(theta);
  }
}

void fill_checker(BatchGrid& g, SeededRng& rng) {
  // 4x4 checkerboard over [-2, 2]^2: cells with even (ix + iy) are occupied.
  for (std::size_t i = 0; i < g.shape().b; ++i) {
    auto idx = rng.int_range(0, 7);
    auto ix = idx % 4;
    auto iy = (idx / 4) * 2 + (ix % 2);  // keeps ix + iy even
    g.at(i, 0, 0, 0) = -2.0 + double(ix) + rng.uniform01();
    g.at(i, 1, 0, 0) = -2.0 + double(iy) + rng.uniform01();
  }
}

void fill_grid8(BatchGrid& g, SeededRng& rng) {
  // Per-sample sinusoidal texture; bounded in [0, 1] by construction.
  for (std::size_t i = 0; i < g.shape().b; ++i) {
    double fx = double(rng.int_range(1, 3));
    double fy = double(rng.int_range(1, 3));
    for (std::size_t c = 0; c < 3; ++c) {
      double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      for (std::size_t y = 0; y < 8; ++y)
        for (std::size_t x = 0; x < 8; ++x)
          g.at(i, c, y, x) =
              0.5 + 0.5 * std::sin(2.0 * std::numbers::pi *
                                       (fx * double(x) + fy * double(y)) / 8.0 +
                                   phase);
    }
  }
}

}  // namespace

BatchGrid sample_dataset(DatasetKind kind, std::size_t n, SeededRng& rng) {
  if (n == 0) throw ConfigError("sample_dataset: n must be positive");
  Shape s = dataset_sample_shape(kind);
  s.b = std::uint32_t(n);
  BatchGrid g(s, Space::Latent);
  switch (kind) {
    case DatasetKind::Gauss2: fill_gauss2(g, rng); break;
    case DatasetKind::Rings: fill_rings(g, rng); break;
    case DatasetKind::Checker: fill_checker(g, rng); break;
    case DatasetKind::Grid8: fill_grid8(g, rng); break;
  }
  return g;
}

}  // namespace vecor
