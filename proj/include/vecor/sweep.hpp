#pragma once

#include <string>
#include <vector>

#include "vecor/metrics.hpp"
#include "vecor/model.hpp"
#include "vecor/train.hpp"

namespace vecor {

struct SweepPoint {
  double axis_value = 0.0;
  std::uint64_t seed = 0;
  MetricReport metrics;
  std::string sampler;
  int nfe = 0;
};

struct SweepResult {
  std::string axis;  // "nfe" or "step"
  std::vector<SweepPoint> points;
};

struct SweepOptions {
  std::size_t n_gen = 4096;
  int n_projections = 128;
};

// For each (sampler kind, nfe, seed): draw x0 ~ N(0,I), integrate, score the
// terminal samples against `ref`.
SweepResult nfe_sweep(const VelocityField& model, const Schedule& sched,
                      const std::vector<SamplerKind>& kinds,
                      const std::vector<int>& nfe_list, const BatchGrid& ref,
                      const std::vector<std::uint64_t>& seeds,
                      double delta_clip = 1e-3,
                      const SweepOptions& opts = {});

// Trains cfg_base and cfg_vecor per seed with shared noise/time/data
// substreams and scores proxy metrics at each checkpoint step. The configs
// must differ only inside the vecor block.
std::pair<SweepResult, SweepResult> ab_compare(
    const RunConfig& cfg_base, const RunConfig& cfg_vecor,
    const std::vector<std::uint64_t>& seeds,
    const std::vector<long>& checkpoints_at, const SweepOptions& opts = {});

// axis,axis_value,seed,sliced_w2,energy_distance,mean_gap_norm,n_gen,n_ref,sampler,nfe
void write_sweep_csv(const std::string& path, const SweepResult& result);
std::string sweep_csv_string(const SweepResult& result);

}  // namespace vecor
