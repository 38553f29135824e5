#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vecor/error.hpp"
#include "vecor/perturb.hpp"
#include "vecor/schedule.hpp"

using namespace vecor;

namespace {

BatchGrid labelled_channels(std::uint32_t b, std::uint32_t c, std::uint32_t h,
                            std::uint32_t w) {
  BatchGrid g(Shape{b, c, h, w}, Space::Velocity);
  for (std::size_t bi = 0; bi < b; ++bi)
    for (std::size_t ci = 0; ci < c; ++ci)
      for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x)
          g.at(bi, ci, y, x) = double(100 * bi + 10 * ci) + 0.01 * double(y * w + x);
  return g;
}

}  // namespace

TEST_CASE("channel shuffle with C=2 is the swap") {
  SeededRng rng(1, "cs");
  BatchGrid z = labelled_channels(2, 2, 2, 2);
  BatchGrid out = channel_shuffle(z, rng);
  for (std::size_t b = 0; b < 2; ++b)
    for (std::size_t y = 0; y < 2; ++y)
      for (std::size_t x = 0; x < 2; ++x) {
        CHECK(out.at(b, 0, y, x) == z.at(b, 1, y, x));
        CHECK(out.at(b, 1, y, x) == z.at(b, 0, y, x));
      }
  CHECK(out.space() == Space::Velocity);
}

TEST_CASE("channel shuffle with C=3 is one of the two cyclic shifts") {
  SeededRng rng(2, "cs");
  BatchGrid z = labelled_channels(1, 3, 1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    BatchGrid out = channel_shuffle(z, rng);
    bool k1 = out.at(0, 0, 0, 0) == z.at(0, 1, 0, 0) &&
              out.at(0, 1, 0, 0) == z.at(0, 2, 0, 0) &&
              out.at(0, 2, 0, 0) == z.at(0, 0, 0, 0);
    bool k2 = out.at(0, 0, 0, 0) == z.at(0, 2, 0, 0) &&
              out.at(0, 1, 0, 0) == z.at(0, 0, 0, 0) &&
              out.at(0, 2, 0, 0) == z.at(0, 1, 0, 0);
    CHECK((k1 || k2));
  }
}

TEST_CASE("channel shuffle rejects C=1") {
  SeededRng rng(3, "cs");
  BatchGrid z(Shape{1, 1, 2, 2}, Space::Velocity, 1.0);
  CHECK_THROWS_AS(channel_shuffle(z, rng), ConfigError);
}

TEST_CASE("shuffle and cutmix pairings are derangements, exhaustively") {
  for (std::uint32_t n = 2; n <= 8; ++n) {
    SeededRng rng(n, "derangement-scan");
    for (int trial = 0; trial < 1000; ++trial) {
      auto pi = derangement(n, rng);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(pi[i] != i);
    }
    SeededRng rng2(n, "shuffle-scan");
    BatchGrid z = labelled_channels(1, n, 1, 1);
    for (int trial = 0; trial < 1000; ++trial) {
      BatchGrid out = channel_shuffle(z, rng2);
      for (std::size_t c = 0; c < n; ++c)
        REQUIRE(out.at(0, c, 0, 0) != z.at(0, c, 0, 0));
    }
  }
}

TEST_CASE("crop/resize fixes constants and rejects 1x1") {
  SeededRng rng(4, "crop");
  BatchGrid cst(Shape{3, 2, 8, 8}, Space::Latent, -0.75);
  BatchGrid out = crop_resize(cst, CropResizeParams{}, rng);
  for (double v : out.data()) CHECK(v == doctest::Approx(-0.75).epsilon(1e-14));

  BatchGrid tiny(Shape{1, 1, 1, 1}, Space::Latent, 1.0);
  CHECK_THROWS_AS(crop_resize(tiny, CropResizeParams{}, rng), ConfigError);
}

TEST_CASE("forced full crop is the identity") {
  SeededRng rng(5, "crop");
  BatchGrid z(Shape{2, 2, 6, 6}, Space::Latent);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::sin(double(i));
  BatchGrid out = crop_resize_forced(z, 0, 0, 6, 6);
  CHECK(out.equals_bitwise(z));
}

TEST_CASE("forced crop of a horizontal ramp matches the bilinear oracle") {
  // z(y, x) = x on 8x8; crop columns [2, 6), full height, resized back to 8
  BatchGrid z(Shape{1, 1, 8, 8}, Space::Latent);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 8; ++x) z.at(0, 0, y, x) = double(x);
  BatchGrid out = crop_resize_forced(z, 0, 2, 8, 4);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t j = 0; j < 8; ++j) {
      // center-aligned source coordinate into the 4-wide crop
      double sx = (double(j) + 0.5) * 4.0 / 8.0 - 0.5;
      sx = std::clamp(sx, 0.0, 3.0);
      double expected = 2.0 + sx;  // the ramp is linear, bilinear is exact
      CHECK(out.at(0, 0, y, j) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("cutmix pairs with the only other sample when B=2") {
  SeededRng rng(6, "cm");
  BatchGrid z(Shape{2, 1, 8, 8}, Space::Latent);
  for (std::size_t i = 0; i < 64; ++i) z.sample(0)[i] = 0.0;
  for (std::size_t i = 0; i < 64; ++i) z.sample(1)[i] = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    BatchGrid out = cutmix(z, 1.0, rng);
    for (double v : out.sample(0)) CHECK((v == 0.0 || v == 1.0));
    for (double v : out.sample(1)) CHECK((v == 0.0 || v == 1.0));
  }
  BatchGrid one(Shape{1, 1, 4, 4}, Space::Latent, 1.0);
  CHECK_THROWS_AS(cutmix(one, 1.0, rng), ConfigError);
}

TEST_CASE("cutmix replaced-area statistics with alpha=1") {
  SeededRng rng(7, "cm");
  BatchGrid z(Shape{2, 1, 8, 8}, Space::Latent);
  for (std::size_t i = 0; i < 64; ++i) z.sample(0)[i] = 0.0;
  for (std::size_t i = 0; i < 64; ++i) z.sample(1)[i] = 1.0;
  double replaced = 0.0;
  const int trials = 10000;
  for (int trial = 0; trial < trials; ++trial) {
    BatchGrid out = cutmix(z, 1.0, rng);
    double f = 0.0;
    for (double v : out.sample(0)) f += v;  // 1s came from the partner
    replaced += f / 64.0;
  }
  // clipping reduces the unclipped expectation E[1-lambda] = 0.5; require at
  // least a quarter of it
  CHECK(replaced / trials >= 0.25 * 0.5);
}

TEST_CASE("blur fixes constants and validates parameters") {
  BatchGrid cst(Shape{1, 2, 9, 9}, Space::Latent, 2.5);
  BatchGrid out = gaussian_blur(cst, BlurParams{5, 1.0});
  for (double v : out.data()) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));

  CHECK_THROWS_AS(gaussian_blur(cst, BlurParams{4, 1.0}), ConfigError);
  CHECK_THROWS_AS(gaussian_blur(cst, BlurParams{11, 1.0}), ConfigError);
}

TEST_CASE("blur of an interior impulse is the kernel stamp") {
  BatchGrid z(Shape{1, 1, 9, 9}, Space::Latent);
  z.at(0, 0, 4, 4) = 1.0;
  BatchGrid out = gaussian_blur(z, BlurParams{5, 1.0});
  auto kern = gaussian_kernel(5, 1.0);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      double expected = 0.0;
      // correlation with a symmetric kernel = convolution
      if (std::abs(y - 4) <= 2 && std::abs(x - 4) <= 2)
        expected = kern[std::size_t(y - 2) * 5 + (x - 2)];
      CHECK(out.at(0, 0, y, x) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("blur matches a dense reflection-padded convolution oracle") {
  SeededRng rng(8, "blur");
  const int H = 16, W = 16, k = 5, r = 2;
  BatchGrid z(Shape{1, 1, H, W}, Space::Latent);
  for (auto& v : z.data()) v = rng.normal();
  BatchGrid out = gaussian_blur(z, BlurParams{k, 1.0});
  auto kern = gaussian_kernel(k, 1.0);
  auto reflect = [](int i, int n) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -1 - i;
      if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
  };
  double in_mean = 0.0, out_mean = 0.0;
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      double acc = 0.0;
      for (int u = -r; u <= r; ++u)
        for (int v = -r; v <= r; ++v)
          acc += kern[std::size_t(u + r) * k + (v + r)] *
                 z.at(0, 0, reflect(y + u, H), reflect(x + v, W));
      CHECK(out.at(0, 0, y, x) == doctest::Approx(acc).epsilon(1e-12));
      in_mean += z.at(0, 0, y, x);
      out_mean += out.at(0, 0, y, x);
    }
  // symmetric reflection redistributes but preserves total mass
  CHECK(std::abs(in_mean - out_mean) / (H * W) < 1e-9);
}

TEST_CASE("noise scale follows gamma = base * (1 - std/std_max)") {
  // sample 0 entries +-1 (std 1), sample 1 entries +-2 (std 2)
  const std::size_t n = 10000;
  BatchGrid z(Shape{2, 1, 100, 100}, Space::Latent);
  for (std::size_t i = 0; i < n; ++i) z.sample(0)[i] = (i % 2) ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) z.sample(1)[i] = (i % 2) ? 2.0 : -2.0;
  SeededRng rng(9, "noise");
  BatchGrid out = gaussian_noise(z, NoiseParams{1.0}, rng);
  // max-std sample untouched
  for (std::size_t i = 0; i < n; ++i) CHECK(out.sample(1)[i] == z.sample(1)[i]);
  // the other sample's added noise has std 0.5
  double s = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = out.sample(0)[i] - z.sample(0)[i];
    s += d;
    s2 += d * d;
  }
  double mean = s / double(n);
  double sd = std::sqrt(s2 / double(n) - mean * mean);
  CHECK(sd == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("noise rejects an all-constant batch") {
  SeededRng rng(10, "noise");
  BatchGrid z(Shape{2, 1, 2, 2}, Space::Latent, 3.0);
  CHECK_THROWS_AS(gaussian_noise(z, NoiseParams{1.0}, rng), ConfigError);
}

TEST_CASE("jitter substitution examples") {
  // unit factors: identity in every order
  SeededRng rng(11, "jit");
  BatchGrid z(Shape{1, 3, 2, 2}, Space::Latent);
  for (auto& v : z.data()) v = rng.normal();
  for (int order = 0; order < 6; ++order) {
    BatchGrid out = color_jitter_forced(z, 1.0, 1.0, 1.0, order, Space::Latent);
    for (std::size_t i = 0; i < z.size(); ++i)
      CHECK(out[i] == doctest::Approx(z[i]).epsilon(1e-14));
  }

  // brightness 1.2 on 0.5 -> 0.6
  BatchGrid b(Shape{1, 1, 1, 2}, Space::Latent, 0.5);
  BatchGrid bo = color_jitter_forced(b, 1.2, 1.0, 1.0, 0, Space::Latent);
  CHECK(bo[0] == doctest::Approx(0.6).epsilon(1e-14));

  // contrast 0.5 about mean 0.5: 0.7 -> 0.6
  BatchGrid c(Shape{1, 1, 1, 2}, Space::Latent, std::vector<double>{0.3, 0.7});
  BatchGrid co = color_jitter_forced(c, 1.0, 0.5, 1.0, 0, Space::Latent);
  CHECK(co[1] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(co[0] == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("image-space jitter stays within the original value range") {
  SeededRng rng(12, "jit");
  BatchGrid z(Shape{4, 3, 4, 4}, Space::Image);
  for (auto& v : z.data()) v = 5.0 * rng.normal();
  BatchGrid out = color_jitter(z, JitterParams{0.2}, rng, Space::Image);
  for (std::size_t b = 0; b < 4; ++b) {
    auto zi = z.sample(b);
    double lo = *std::min_element(zi.begin(), zi.end());
    double hi = *std::max_element(zi.begin(), zi.end());
    for (double v : out.sample(b)) {
      CHECK(v >= lo - 1e-12);
      CHECK(v <= hi + 1e-12);
    }
  }
}

TEST_CASE("operators preserve shape and are deterministic under replay") {
  BatchGrid z = labelled_channels(4, 3, 8, 8);
  PerturbSpec spec;
  for (PerturbOp op : {PerturbOp::ChannelShuffle, PerturbOp::CropResize,
                       PerturbOp::CutMix, PerturbOp::GaussianBlur,
                       PerturbOp::GaussianNoise, PerturbOp::ColorJitter}) {
    spec.op = op;
    SeededRng a(13, "det"), b(13, "det");
    BatchGrid oa = apply_operator(z, spec, a);
    BatchGrid ob = apply_operator(z, spec, b);
    CHECK(oa.shape() == z.shape());
    CHECK(oa.equals_bitwise(ob));
  }
}

TEST_CASE("build_negatives with the identity hook reproduces the positive") {
  Schedule sched = linear_schedule();
  SeededRng rng(14, "bn");
  BatchGrid x(Shape{3, 2, 1, 1}, Space::Latent);
  BatchGrid eps(x.shape(), Space::Noise);
  for (auto& v : x.data()) v = rng.normal();
  for (auto& v : eps.data()) v = rng.normal();
  std::vector<double> t{0.2, 0.5, 0.8};
  BatchGrid v_pos = target_velocity_per_sample(sched, x, eps, t);
  PerturbSpec spec;
  spec.op = PerturbOp::Identity;
  spec.space = Space::Latent;
  auto set = build_negatives(x, eps, t, v_pos, spec, sched, rng);
  REQUIRE(set.negatives.size() == 1);
  CHECK(set.negatives[0].equals_bitwise(v_pos));
}

TEST_CASE("velocity-space shuffle negatives swap the positive's channels") {
  Schedule sched = linear_schedule();
  SeededRng rng(15, "bn");
  BatchGrid x(Shape{2, 2, 1, 1}, Space::Latent);
  BatchGrid eps(x.shape(), Space::Noise);
  for (auto& v : x.data()) v = rng.normal();
  for (auto& v : eps.data()) v = rng.normal();
  std::vector<double> t{0.3, 0.6};
  BatchGrid v_pos = target_velocity_per_sample(sched, x, eps, t);
  PerturbSpec spec;  // defaults: channel shuffle, velocity space, K=1
  auto set = build_negatives(x, eps, t, v_pos, spec, sched, rng);
  for (std::size_t b = 0; b < 2; ++b) {
    CHECK(set.negatives[0].at(b, 0, 0, 0) == v_pos.at(b, 1, 0, 0));
    CHECK(set.negatives[0].at(b, 1, 0, 0) == v_pos.at(b, 0, 0, 0));
  }
}

TEST_CASE("latent-space negatives cancel the shared noise term") {
  // v_neg - v_pos == op(x) - x for the linear schedule, since eps is shared
  Schedule sched = linear_schedule();
  SeededRng rng(16, "bn");
  BatchGrid x(Shape{2, 3, 1, 1}, Space::Latent);
  BatchGrid eps(x.shape(), Space::Noise);
  for (auto& v : x.data()) v = rng.normal();
  for (auto& v : eps.data()) v = rng.normal();
  std::vector<double> t{0.25, 0.75};
  BatchGrid v_pos = target_velocity_per_sample(sched, x, eps, t);
  PerturbSpec spec;
  spec.space = Space::Latent;
  SeededRng rng_a(17, "op"), rng_b(17, "op");
  auto set = build_negatives(x, eps, t, v_pos, spec, sched, rng_a);
  BatchGrid shuffled = channel_shuffle(x, rng_b);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(set.negatives[0][i] - v_pos[i] ==
          doctest::Approx(shuffled[i] - x[i]).epsilon(1e-14));
}

TEST_CASE("image-space negatives run through the encoder") {
  Schedule sched = linear_schedule();
  SeededRng rng(18, "bn");
  BatchGrid x(Shape{2, 3, 4, 4}, Space::Latent);  // latent is the pooled image
  BatchGrid img(Shape{2, 3, 8, 8}, Space::Image);
  BatchGrid eps(x.shape(), Space::Noise);
  for (auto& v : x.data()) v = rng.normal();
  for (auto& v : img.data()) v = rng.normal();
  for (auto& v : eps.data()) v = rng.normal();
  std::vector<double> t{0.4, 0.6};
  BatchGrid v_pos = target_velocity_per_sample(sched, x, eps, t);
  PerturbSpec spec;
  spec.op = PerturbOp::GaussianBlur;
  spec.space = Space::Image;
  auto set = build_negatives(x, eps, t, v_pos, spec, sched, rng,
                             [](const BatchGrid& g) { return avgpool2(g); },
                             img);
  CHECK(set.negatives[0].shape() == v_pos.shape());

  // encoder output shape mismatch is rejected
  CHECK_THROWS_AS(build_negatives(x, eps, t, v_pos, spec, sched, rng,
                                  identity_encoder(), img),
                  ConfigError);
}

TEST_CASE("avgpool2 averages 2x2 blocks") {
  BatchGrid img(Shape{1, 1, 2, 2}, Space::Image,
                std::vector<double>{1.0, 2.0, 3.0, 6.0});
  BatchGrid out = avgpool2(img);
  CHECK(out.shape() == Shape{1, 1, 1, 1});
  CHECK(out[0] == 3.0);
  BatchGrid odd(Shape{1, 1, 3, 2}, Space::Image, 0.0);
  CHECK_THROWS_AS(avgpool2(odd), ConfigError);
}

TEST_CASE("perturb spec validation") {
  PerturbSpec spec;
  CHECK_NOTHROW(validate_perturb_spec(spec));
  spec.k_negatives = 0;
  CHECK_THROWS_AS(validate_perturb_spec(spec), ConfigError);
  spec.k_negatives = 1;
  spec.blur.k = 4;
  CHECK_THROWS_AS(validate_perturb_spec(spec), ConfigError);
  spec.blur.k = 5;
  spec.jitter.delta = 1.5;
  CHECK_THROWS_AS(validate_perturb_spec(spec), ConfigError);
}
