#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vecor/error.hpp"
#include "vecor/grid.hpp"
#include "vecor/rng.hpp"

using namespace vecor;

TEST_CASE("elementwise add with zero grid is identity") {
  SeededRng rng(1, "t");
  BatchGrid x(Shape{2, 3, 2, 2}, Space::Latent);
  for (auto& v : x.data()) v = rng.normal();
  BatchGrid zero(x.shape(), Space::Latent);
  BatchGrid out = grid_elementwise(zero, x, ElemOp::Add);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(out[i] == x[i]);
}

TEST_CASE("elementwise sub self-cancels") {
  SeededRng rng(2, "t");
  BatchGrid x(Shape{1, 2, 2, 2}, Space::Velocity);
  for (auto& v : x.data()) v = rng.normal();
  BatchGrid out = grid_elementwise(x, x, ElemOp::Sub);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(out[i] == 0.0);
  CHECK(out.space() == Space::Velocity);
}

TEST_CASE("elementwise scale arithmetic") {
  BatchGrid a(Shape{1, 1, 1, 1}, Space::Latent, 2.0);
  BatchGrid b(Shape{1, 1, 1, 1}, Space::Latent, 2.0);
  BatchGrid out = grid_elementwise(a, b, ElemOp::Add, 0.5);
  CHECK(out[0] == 3.0);
}

TEST_CASE("elementwise shape mismatch names both shapes") {
  BatchGrid a(Shape{1, 2, 1, 1}, Space::Latent);
  BatchGrid b(Shape{1, 3, 1, 1}, Space::Latent);
  try {
    grid_elementwise(a, b, ElemOp::Add);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("(1,2,1,1)") != std::string::npos);
    CHECK(msg.find("(1,3,1,1)") != std::string::npos);
  }
}

TEST_CASE("per_sample_std basics") {
  BatchGrid c(Shape{1, 1, 1, 4}, Space::Latent, 7.5);
  CHECK(per_sample_std(c)[0] == 0.0);

  BatchGrid two(Shape{1, 1, 1, 2}, Space::Latent, std::vector<double>{0.0, 2.0});
  CHECK(per_sample_std(two)[0] == doctest::Approx(1.0).epsilon(1e-15));

  BatchGrid single(Shape{1, 1, 1, 1}, Space::Latent);
  CHECK_THROWS_AS(per_sample_std(single), ConfigError);
}

TEST_CASE("per_sample_std matches an independent two-pass computation") {
  SeededRng rng(7, "std");
  BatchGrid x(Shape{1, 1, 4, 4}, Space::Latent);
  for (auto& v : x.data()) v = rng.normal();
  double got = per_sample_std(x)[0];
  // reference: accumulate in long double via E[x^2] - mean^2
  long double s = 0.0L, s2 = 0.0L;
  for (double v : x.data()) { s += v; s2 += (long double)v * v; }
  long double mean = s / 16.0L;
  double ref = double(std::sqrt(s2 / 16.0L - mean * mean));
  CHECK(got == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("per_sample_std is permutation invariant") {
  SeededRng rng(8, "std");
  std::vector<double> vals = rng.normal_vec(8);
  BatchGrid a(Shape{1, 1, 1, 8}, Space::Latent, vals);
  std::reverse(vals.begin(), vals.end());
  std::swap(vals[2], vals[5]);
  BatchGrid b(Shape{1, 1, 1, 8}, Space::Latent, vals);
  CHECK(per_sample_std(a)[0] == per_sample_std(b)[0]);
}

TEST_CASE("rng replay is bit exact and streams are distinct") {
  SeededRng a(42, "noise"), b(42, "noise"), c(42, "time");
  bool any_diff = false;
  for (int i = 0; i < 64; ++i) {
    auto u = a.next_u64();
    CHECK(u == b.next_u64());
    if (u != c.next_u64()) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("beta(1,1) mean and int_range singleton") {
  SeededRng rng(3, "beta");
  double acc = 0.0;
  for (int i = 0; i < 100000; ++i) acc += rng.beta(1.0);
  CHECK(acc / 100000 == doctest::Approx(0.5).epsilon(0.02));

  SeededRng r2(3, "int");
  for (int i = 0; i < 100; ++i) CHECK(r2.int_range(1, 1) == 1);
}

TEST_CASE("normal variance near 1") {
  SeededRng rng(4, "n");
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double v = rng.normal();
    s += v;
    s2 += v * v;
  }
  double mean = s / n;
  CHECK(s2 / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("rng parameter guards") {
  SeededRng rng(5, "g");
  CHECK_THROWS_AS(rng.uniform(1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(rng.beta(0.0), ConfigError);
  CHECK_THROWS_AS(rng.int_range(2, 1), ConfigError);
}

TEST_CASE("grid binary dump round-trips bit exactly") {
  SeededRng rng(6, "io");
  BatchGrid g(Shape{3, 2, 4, 5}, Space::Noise);
  for (auto& v : g.data()) v = rng.normal();
  std::string path =
      (std::filesystem::temp_directory_path() / "core_io_test.grid").string();
  write_grid(path, g);
  BatchGrid back = read_grid(path);
  CHECK(back.equals_bitwise(g));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_grid(path), IoError);
}

TEST_CASE("check_finite names the offending index") {
  BatchGrid g(Shape{1, 1, 1, 3}, Space::Latent);
  g[2] = std::nan("");
  try {
    g.check_finite("unit");
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("index 2") != std::string::npos);
  }
}

TEST_CASE("indexing layout is row major [B,C,H,W]") {
  BatchGrid g(Shape{2, 2, 2, 2}, Space::Latent);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = double(i);
  CHECK(g.at(1, 0, 0, 0) == 8.0);
  CHECK(g.at(0, 1, 1, 0) == 6.0);
  CHECK(g.sample(1)[0] == 8.0);
}
