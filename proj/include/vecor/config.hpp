#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vecor/dataset.hpp"
#include "vecor/objective.hpp"
#include "vecor/optimizer.hpp"
#include "vecor/perturb.hpp"

namespace vecor {

enum class SamplerKind { EulerODE, Heun2ODE, EulerMaruyamaSDE };
enum class DiffusionTag { SigmaT, Zero };  // Zero is a test hook

const char* sampler_kind_name(SamplerKind k);
SamplerKind sampler_kind_from_name(const std::string& name);

struct SamplerBlock {
  SamplerKind kind = SamplerKind::EulerMaruyamaSDE;
  int nfe = 50;
  DiffusionTag w = DiffusionTag::SigmaT;
  double delta_clip = 1e-3;
};

struct VecorBlock {
  bool enabled = false;
  double lambda = 0.05;
  int k = 1;
  PerturbSpec perturb;
};

struct OptimizerBlock {
  OptKind kind = OptKind::Adam;
  double lr = 3e-4;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

struct RunConfig {
  std::string dataset = "gauss2";
  std::size_t dataset_size = 8192;
  std::string schedule = "linear";
  std::vector<int> hidden = {64, 64};
  int fourier_bands = 8;
  OptimizerBlock optim;
  VecorBlock vecor;
  SamplerBlock sampler;
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  long steps = 2000;
  int batch_size = 128;
  long checkpoint_every = 0;  // 0: final checkpoint only
  std::string out_dir = "runs";

  VecorConfig vecor_cfg() const {
    return VecorConfig{vecor.lambda, vecor.k, /*allow_lambda_zero=*/true};
  }
};

// Full validation, including the lambda*K < 1 gate when VeCoR is enabled.
void validate_run_config(const RunConfig& cfg);

RunConfig load_run_config(const std::string& path);
std::string run_config_to_json(const RunConfig& cfg);  // canonical, indented
RunConfig run_config_from_json(const std::string& text);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const RunConfig& cfg);
// True iff the two configs differ at most inside the vecor block.
bool differ_only_in_vecor(const RunConfig& a, const RunConfig& b);

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::vector<std::string> artifacts;
  double wall_seconds = 0.0;
  std::string build_id;
  std::string status;
};

// Written atomically (tmp file + rename).
void write_manifest(const std::string& path, const RunManifest& m);

}  // namespace vecor
