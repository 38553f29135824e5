#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vecor/grid.hpp"
#include "vecor/rng.hpp"
#include "vecor/schedule.hpp"

namespace vecor {

enum class PerturbOp {
  ChannelShuffle,
  CropResize,
  CutMix,
  GaussianBlur,
  GaussianNoise,
  ColorJitter,
  Identity,  // test hook: negatives degenerate to the positive
};

const char* perturb_op_name(PerturbOp op);
PerturbOp perturb_op_from_name(const std::string& name);

struct CropResizeParams {
  double scale_min = 0.9, scale_max = 0.95;  // area ratio
  double ar_min = 0.95, ar_max = 1.05;       // aspect ratio
};

struct BlurParams {
  int k = 5;
  double sigma = 1.0;
};

struct NoiseParams {
  double base_scale = 1.0;  // 255 in image space, 1 in latent/velocity
};

struct JitterParams {
  double delta = 0.2;
};

struct PerturbSpec {
  PerturbOp op = PerturbOp::ChannelShuffle;
  Space space = Space::Velocity;
  int k_negatives = 1;
  CropResizeParams crop;
  BlurParams blur;
  NoiseParams noise;
  JitterParams jitter;
  double cutmix_alpha = 1.0;
};

void validate_perturb_spec(const PerturbSpec& spec);

// --- operators -------------------------------------------------------------

// Per-sample cyclic channel shift by k in {1..C-1}; no channel keeps its
// position. Output channel c reads input channel (c + k) mod C.
BatchGrid channel_shuffle(const BatchGrid& z, SeededRng& rng);

// Per-sample random crop of area ratio in [scale_min, scale_max] and aspect
// ratio in [ar_min, ar_max], bilinearly resized back to (H, W). Crops whose
// rounded dimensions fall below 2 pixels fall back to a 0.9H x 0.9W crop.
BatchGrid crop_resize(const BatchGrid& z, const CropResizeParams& p,
                      SeededRng& rng);

// Test hook: apply one fixed crop rectangle (rows y0..y0+ch, cols x0..x0+cw)
// to every sample and resize back to (H, W).
BatchGrid crop_resize_forced(const BatchGrid& z, int y0, int x0, int ch, int cw);

// Batch-level CutMix under a derangement pairing; each sample's box area is
// controlled by lambda ~ Beta(alpha, alpha).
BatchGrid cutmix(const BatchGrid& z, double alpha, SeededRng& rng);

// Sattolo shuffle: uniform random cyclic permutation (always a derangement).
std::vector<std::size_t> derangement(std::size_t n, SeededRng& rng);

// Depthwise k x k Gaussian blur, reflection padding.
BatchGrid gaussian_blur(const BatchGrid& z, const BlurParams& p);
std::vector<double> gaussian_kernel(int k, double sigma);  // normalized, k*k

// z + gamma_i * N(0,1) with gamma_i = base_scale * (1 - std_i / std_max).
BatchGrid gaussian_noise(const BatchGrid& z, const NoiseParams& p,
                         SeededRng& rng);

// Brightness/contrast/saturation jitter with factors ~ U(1-delta, 1+delta)
// applied per sample in a random order. In image space the sample is min-max
// normalized to [0,1] first and the result clamped and rescaled.
BatchGrid color_jitter(const BatchGrid& z, const JitterParams& p,
                       SeededRng& rng, Space space);

// Test hook: fixed factors and one of the six operation orders (0..5).
BatchGrid color_jitter_forced(const BatchGrid& z, double brightness,
                              double contrast, double saturation,
                              int order_index, Space space);

// Dispatch on spec.op (space handling is build_negatives' job).
BatchGrid apply_operator(const BatchGrid& z, const PerturbSpec& spec,
                         SeededRng& rng);

// --- candidate set ---------------------------------------------------------

struct NegativeCandidateSet {
  BatchGrid positive;                 // v_plus
  std::vector<BatchGrid> negatives;   // K grids v_minus
  BatchGrid shared_eps;
  std::vector<double> shared_t;       // one t per sample
};

using Encoder = std::function<BatchGrid(const BatchGrid&)>;

Encoder identity_encoder();
// 2x2 average pooling; desk-scale stand-in for a learned encoder.
BatchGrid avgpool2(const BatchGrid& img);

// Synthesizes K negative velocities sharing (eps, t) with the positive.
//   Velocity space: v_minus = op(v_plus)
//   Latent space:   x_minus = op(x_plus);            v_minus from Eq-of-motion
//   Image space:    x_minus = encode(op(image));     v_minus from Eq-of-motion
// `image` defaults to x_plus (identity encoder case).
NegativeCandidateSet build_negatives(
    const BatchGrid& x_pos, const BatchGrid& eps, std::span<const double> t,
    const BatchGrid& v_pos, const PerturbSpec& spec, const Schedule& sched,
    SeededRng& rng, const Encoder& encoder = identity_encoder(),
    const std::optional<BatchGrid>& image = std::nullopt);

}  // namespace vecor
