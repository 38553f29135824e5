#include "vecor/perturb.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "vecor/error.hpp"

namespace vecor {

const char* perturb_op_name(PerturbOp op) {
  switch (op) {
    case PerturbOp::ChannelShuffle: return "channel_shuffle";
    case PerturbOp::CropResize: return "crop_resize";
    case PerturbOp::CutMix: return "cutmix";
    case PerturbOp::GaussianBlur: return "gaussian_blur";
    case PerturbOp::GaussianNoise: return "gaussian_noise";
    case PerturbOp::ColorJitter: return "color_jitter";
    case PerturbOp::Identity: return "identity";
  }
  return "?";
}

PerturbOp perturb_op_from_name(const std::string& name) {
  for (PerturbOp op :
       {PerturbOp::ChannelShuffle, PerturbOp::CropResize, PerturbOp::CutMix,
        PerturbOp::GaussianBlur, PerturbOp::GaussianNoise,
        PerturbOp::ColorJitter, PerturbOp::Identity}) {
    if (name == perturb_op_name(op)) return op;
  }
  throw ConfigError("unknown perturbation operator: " + name);
}

void validate_perturb_spec(const PerturbSpec& spec) {
  if (spec.k_negatives < 1) throw ConfigError("perturb: K must be >= 1");
  if (!(spec.crop.scale_min > 0 && spec.crop.scale_min <= spec.crop.scale_max &&
        spec.crop.scale_max <= 1.0))
    throw ConfigError("perturb: require 0 < scale_min <= scale_max <= 1");
  if (!(spec.crop.ar_min > 0 && spec.crop.ar_min <= spec.crop.ar_max))
    throw ConfigError("perturb: require 0 < ar_min <= ar_max");
  if (spec.blur.k % 2 == 0) throw ConfigError("perturb: blur kernel size must be odd");
  if (!(spec.blur.sigma >= 1.0)) throw ConfigError("perturb: blur sigma must be >= 1");
  if (!(spec.noise.base_scale > 0)) throw ConfigError("perturb: base_scale must be > 0");
  if (!(spec.jitter.delta > 0 && spec.jitter.delta < 1))
    throw ConfigError("perturb: require 0 < jitter delta < 1");
  if (!(spec.cutmix_alpha > 0)) throw ConfigError("perturb: cutmix alpha must be > 0");
}

BatchGrid channel_shuffle(const BatchGrid& z, SeededRng& rng) {
  const Shape& s = z.shape();
  if (s.c < 2)
    throw ConfigError("channel_shuffle: inapplicable with C=1");
  BatchGrid out(s, z.space());
  const std::size_t plane = std::size_t(s.h) * s.w;
  for (std::size_t b = 0; b < s.b; ++b) {
    auto k = static_cast<std::size_t>(rng.int_range(1, s.c - 1));
    for (std::size_t c = 0; c < s.c; ++c) {
      std::size_t src = (c + k) % s.c;
      auto zi = z.sample(b).subspan(src * plane, plane);
      auto oi = out.sample(b).subspan(c * plane, plane);
      std::copy(zi.begin(), zi.end(), oi.begin());
    }
  }
  return out;
}

namespace {

// Bilinear resize of the crop window [y0, y0+ch) x [x0, x0+cw) of one channel
// plane back to (H, W).
void resize_crop_plane(std::span<const double> in, int H, int W, int y0, int x0,
                       int ch, int cw, std::span<double> out) {
  for (int i = 0; i < H; ++i) {
    double sy = (i + 0.5) * double(ch) / double(H) - 0.5;
    sy = std::clamp(sy, 0.0, double(ch - 1));
    int i0 = static_cast<int>(std::floor(sy));
    int i1 = std::min(i0 + 1, ch - 1);
    double fy = sy - i0;
    for (int j = 0; j < W; ++j) {
      double sx = (j + 0.5) * double(cw) / double(W) - 0.5;
      sx = std::clamp(sx, 0.0, double(cw - 1));
      int j0 = static_cast<int>(std::floor(sx));
      int j1 = std::min(j0 + 1, cw - 1);
      double fx = sx - j0;
      double v00 = in[std::size_t(y0 + i0) * W + (x0 + j0)];
      double v01 = in[std::size_t(y0 + i0) * W + (x0 + j1)];
      double v10 = in[std::size_t(y0 + i1) * W + (x0 + j0)];
      double v11 = in[std::size_t(y0 + i1) * W + (x0 + j1)];
      out[std::size_t(i) * W + j] = (1 - fy) * ((1 - fx) * v00 + fx * v01) +
                                    fy * ((1 - fx) * v10 + fx * v11);
    }
  }
}

constexpr int kMinCropDim = 2;  // below this the fallback crop triggers

}  // namespace

BatchGrid crop_resize(const BatchGrid& z, const CropResizeParams& p,
                      SeededRng& rng) {
  const Shape& s = z.shape();
  const int H = int(s.h), W = int(s.w);
  if (H * W <= 1)
    throw ConfigError("crop_resize: inapplicable at spatial size 1x1");
  BatchGrid out(s, z.space());
  const std::size_t plane = std::size_t(H) * W;
  for (std::size_t b = 0; b < s.b; ++b) {
    double area = rng.uniform(p.scale_min, std::nextafter(p.scale_max, 2.0)) *
                  double(H) * double(W);
    double ar = rng.uniform(p.ar_min, std::nextafter(p.ar_max, 2.0));
    int ch = static_cast<int>(std::lround(std::sqrt(area / ar)));
    int cw = static_cast<int>(std::lround(std::sqrt(area * ar)));
    ch = std::clamp(ch, 1, H);
    cw = std::clamp(cw, 1, W);
    if (ch < kMinCropDim || cw < kMinCropDim) {
      ch = std::max(1, static_cast<int>(std::lround(0.9 * H)));
      cw = std::max(1, static_cast<int>(std::lround(0.9 * W)));
    }
    int y0 = static_cast<int>(rng.int_range(0, H - ch));
    int x0 = static_cast<int>(rng.int_range(0, W - cw));
    for (std::size_t c = 0; c < s.c; ++c) {
      resize_crop_plane(z.sample(b).subspan(c * plane, plane), H, W, y0, x0, ch,
                        cw, out.sample(b).subspan(c * plane, plane));
    }
  }
  return out;
}

BatchGrid crop_resize_forced(const BatchGrid& z, int y0, int x0, int ch, int cw) {
  const Shape& s = z.shape();
  const int H = int(s.h), W = int(s.w);
  if (y0 < 0 || x0 < 0 || ch < 1 || cw < 1 || y0 + ch > H || x0 + cw > W)
    throw ConfigError("crop_resize_forced: crop rectangle out of bounds");
  BatchGrid out(s, z.space());
  const std::size_t plane = std::size_t(H) * W;
  for (std::size_t b = 0; b < s.b; ++b)
    for (std::size_t c = 0; c < s.c; ++c)
      resize_crop_plane(z.sample(b).subspan(c * plane, plane), H, W, y0, x0, ch,
                        cw, out.sample(b).subspan(c * plane, plane));
  return out;
}

std::vector<std::size_t> derangement(std::size_t n, SeededRng& rng) {
  if (n < 2) throw ConfigError("derangement: need n >= 2");
  std::vector<std::size_t> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = i;
  // Sattolo's shuffle yields a uniform cyclic permutation: no fixed points.
  for (std::size_t i = n - 1; i > 0; --i) {
    auto j = static_cast<std::size_t>(rng.int_range(0, std::int64_t(i) - 1));
    std::swap(pi[i], pi[j]);
  }
  return pi;
}

BatchGrid cutmix(const BatchGrid& z, double alpha, SeededRng& rng) {
  const Shape& s = z.shape();
  if (s.b < 2)
    throw ConfigError("cutmix: inapplicable with B=1 (no derangement exists)");
  auto pi = derangement(s.b, rng);
  BatchGrid out = z;
  const int H = int(s.h), W = int(s.w);
  for (std::size_t b = 0; b < s.b; ++b) {
    double lam = rng.beta(alpha);
    double r = std::sqrt(1.0 - lam);
    double bw = r * W, bh = r * H;
    double cx = rng.uniform01() * W;
    double cy = rng.uniform01() * H;
    int x1 = static_cast<int>(std::lround(std::clamp(cx - bw / 2, 0.0, double(W))));
    int x2 = static_cast<int>(std::lround(std::clamp(cx + bw / 2, 0.0, double(W))));
    int y1 = static_cast<int>(std::lround(std::clamp(cy - bh / 2, 0.0, double(H))));
    int y2 = static_cast<int>(std::lround(std::clamp(cy + bh / 2, 0.0, double(H))));
    for (std::size_t c = 0; c < s.c; ++c)
      for (int y = y1; y < y2; ++y)
        for (int x = x1; x < x2; ++x)
          out.at(b, c, y, x) = z.at(pi[b], c, y, x);
  }
  return out;
}

std::vector<double> gaussian_kernel(int k, double sigma) {
  if (k % 2 == 0) throw ConfigError("gaussian_kernel: k must be odd");
  if (!(sigma > 0)) throw ConfigError("gaussian_kernel: sigma must be > 0");
  std::vector<double> kern(std::size_t(k) * k);
  const int r = k / 2;
  double sum = 0.0;
  for (int u = -r; u <= r; ++u)
    for (int v = -r; v <= r; ++v) {
      double g = std::exp(-(u * u + v * v) / (2.0 * sigma * sigma));
      kern[std::size_t(u + r) * k + (v + r)] = g;
      sum += g;
    }
  for (auto& g : kern) g /= sum;
  return kern;
}

namespace {

// Symmetric (edge-including) reflection; exact for pad <= n.
inline int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

}  // namespace

BatchGrid gaussian_blur(const BatchGrid& z, const BlurParams& p) {
  const Shape& s = z.shape();
  const int H = int(s.h), W = int(s.w);
  if (p.k % 2 == 0) throw ConfigError("gaussian_blur: kernel size must be odd");
  if (p.k > std::min(H, W))
    throw ConfigError("gaussian_blur: kernel size " + std::to_string(p.k) +
                      " exceeds min(H, W)");
  auto kern = gaussian_kernel(p.k, p.sigma);
  const int r = p.k / 2;
  BatchGrid out(s, z.space());
  const std::size_t plane = std::size_t(H) * W;
  for (std::size_t b = 0; b < s.b; ++b)
    for (std::size_t c = 0; c < s.c; ++c) {
      auto in = z.sample(b).subspan(c * plane, plane);
      auto o = out.sample(b).subspan(c * plane, plane);
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          double acc = 0.0;
          for (int u = -r; u <= r; ++u)
            for (int v = -r; v <= r; ++v)
              acc += kern[std::size_t(u + r) * p.k + (v + r)] *
                     in[std::size_t(reflect(y + u, H)) * W + reflect(x + v, W)];
          o[std::size_t(y) * W + x] = acc;
        }
    }
  return out;
}

BatchGrid gaussian_noise(const BatchGrid& z, const NoiseParams& p,
                         SeededRng& rng) {
  auto stds = per_sample_std(z);
  double std_max = *std::max_element(stds.begin(), stds.end());
  if (!(std_max > 0))
    throw ConfigError("gaussian_noise: inapplicable, all samples have zero std");
  BatchGrid out = z;
  for (std::size_t b = 0; b < z.shape().b; ++b) {
    double gamma = p.base_scale * (1.0 - stds[b] / std_max);
    auto o = out.sample(b);
    for (double& v : o) v += gamma * rng.normal();
  }
  return out;
}

namespace {

void jitter_one(std::span<double> v, std::size_t C, std::size_t plane, int op,
                double factor) {
  switch (op) {
    case 0:  // brightness
      for (double& x : v) x *= factor;
      break;
    case 1: {  // contrast about the sample mean
      double mu = 0.0;
      for (double x : v) mu += x;
      mu /= double(v.size());
      for (double& x : v) x = (x - mu) * factor + mu;
      break;
    }
    case 2: {  // saturation about the per-pixel channel mean
      for (std::size_t i = 0; i < plane; ++i) {
        double g = 0.0;
        for (std::size_t c = 0; c < C; ++c) g += v[c * plane + i];
        g /= double(C);
        for (std::size_t c = 0; c < C; ++c)
          v[c * plane + i] = (v[c * plane + i] - g) * factor + g;
      }
      break;
    }
  }
}

constexpr std::array<std::array<int, 3>, 6> kOrders = {{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

void jitter_sample(std::span<double> v, std::size_t C, std::size_t plane,
                   const std::array<int, 3>& order, double fb, double fc,
                   double fs, Space space) {
  double lo = 0.0, hi = 1.0;
  if (space == Space::Image) {
    lo = *std::min_element(v.begin(), v.end());
    hi = *std::max_element(v.begin(), v.end());
    if (hi > lo)
      for (double& x : v) x = (x - lo) / (hi - lo);
    else
      for (double& x : v) x = 0.0;
  }
  const double factors[3] = {fb, fc, fs};
  for (int op : order) jitter_one(v, C, plane, op, factors[op]);
  if (space == Space::Image) {
    for (double& x : v) x = std::clamp(x, 0.0, 1.0);
    if (hi > lo)
      for (double& x : v) x = lo + x * (hi - lo);
    else
      for (double& x : v) x = lo;
  }
}

}  // namespace

BatchGrid color_jitter(const BatchGrid& z, const JitterParams& p,
                       SeededRng& rng, Space space) {
  const Shape& s = z.shape();
  BatchGrid out = z;
  const std::size_t plane = std::size_t(s.h) * s.w;
  for (std::size_t b = 0; b < s.b; ++b) {
    double fb = rng.uniform(1.0 - p.delta, 1.0 + p.delta);
    double fc = rng.uniform(1.0 - p.delta, 1.0 + p.delta);
    double fs = rng.uniform(1.0 - p.delta, 1.0 + p.delta);
    auto order = kOrders[static_cast<std::size_t>(rng.int_range(0, 5))];
    jitter_sample(out.sample(b), s.c, plane, order, fb, fc, fs, space);
  }
  return out;
}

BatchGrid color_jitter_forced(const BatchGrid& z, double brightness,
                              double contrast, double saturation,
                              int order_index, Space space) {
  if (order_index < 0 || order_index > 5)
    throw ConfigError("color_jitter_forced: order index must be in 0..5");
  const Shape& s = z.shape();
  BatchGrid out = z;
  const std::size_t plane = std::size_t(s.h) * s.w;
  for (std::size_t b = 0; b < s.b; ++b)
    jitter_sample(out.sample(b), s.c, plane,
                  kOrders[std::size_t(order_index)], brightness, contrast,
                  saturation, space);
  return out;
}

BatchGrid apply_operator(const BatchGrid& z, const PerturbSpec& spec,
                         SeededRng& rng) {
  switch (spec.op) {
    case PerturbOp::ChannelShuffle: return channel_shuffle(z, rng);
    case PerturbOp::CropResize: return crop_resize(z, spec.crop, rng);
    case PerturbOp::CutMix: return cutmix(z, spec.cutmix_alpha, rng);
    case PerturbOp::GaussianBlur: return gaussian_blur(z, spec.blur);
    case PerturbOp::GaussianNoise: return gaussian_noise(z, spec.noise, rng);
    case PerturbOp::ColorJitter:
      return color_jitter(z, spec.jitter, rng, spec.space);
    case PerturbOp::Identity: return z;
  }
  throw ConfigError("apply_operator: bad operator");
}

Encoder identity_encoder() {
  return [](const BatchGrid& g) { return g.retag(Space::Latent); };
}

BatchGrid avgpool2(const BatchGrid& img) {
  const Shape& s = img.shape();
  if (s.h % 2 != 0 || s.w % 2 != 0)
    throw ConfigError("avgpool2: H and W must be even");
  Shape os{s.b, s.c, s.h / 2, s.w / 2};
  BatchGrid out(os, Space::Latent);
  for (std::size_t b = 0; b < s.b; ++b)
    for (std::size_t c = 0; c < s.c; ++c)
      for (std::size_t y = 0; y < os.h; ++y)
        for (std::size_t x = 0; x < os.w; ++x)
          out.at(b, c, y, x) =
              0.25 * (img.at(b, c, 2 * y, 2 * x) + img.at(b, c, 2 * y, 2 * x + 1) +
                      img.at(b, c, 2 * y + 1, 2 * x) +
                      img.at(b, c, 2 * y + 1, 2 * x + 1));
  return out;
}

NegativeCandidateSet build_negatives(const BatchGrid& x_pos, const BatchGrid& eps,
                                     std::span<const double> t,
                                     const BatchGrid& v_pos,
                                     const PerturbSpec& spec,
                                     const Schedule& sched, SeededRng& rng,
                                     const Encoder& encoder,
                                     const std::optional<BatchGrid>& image) {
  validate_perturb_spec(spec);
  NegativeCandidateSet set;
  set.positive = v_pos;
  set.shared_eps = eps;
  set.shared_t.assign(t.begin(), t.end());
  set.negatives.reserve(std::size_t(spec.k_negatives));
  for (int j = 0; j < spec.k_negatives; ++j) {
    switch (spec.space) {
      case Space::Velocity: {
        set.negatives.push_back(apply_operator(v_pos, spec, rng).retag(Space::Velocity));
        break;
      }
      case Space::Latent: {
        BatchGrid x_neg = apply_operator(x_pos, spec, rng);
        set.negatives.push_back(target_velocity_per_sample(sched, x_neg, eps, t));
        break;
      }
      case Space::Image: {
        BatchGrid img = image ? image->retag(Space::Image) : x_pos.retag(Space::Image);
        BatchGrid x_neg = encoder(apply_operator(img, spec, rng));
        if (!(x_neg.shape() == x_pos.shape()))
          throw ConfigError("build_negatives: encoder output shape " +
                            x_neg.shape().str() + " does not match latent " +
                            x_pos.shape().str());
        set.negatives.push_back(target_velocity_per_sample(sched, x_neg, eps, t));
        break;
      }
      default:
        throw ConfigError("build_negatives: perturbation space must be image, "
                          "latent, or velocity");
    }
    set.negatives.back().check_finite("build_negatives");
  }
  return set;
}

}  // namespace vecor
