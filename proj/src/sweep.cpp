#include "vecor/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "vecor/error.hpp"
#include "vecor/sample.hpp"

namespace vecor {

namespace {

BatchGrid noise_like(Shape sample_shape, std::size_t n, SeededRng& rng) {
  Shape s = sample_shape;
  s.b = std::uint32_t(n);
  BatchGrid x0(s, Space::Noise);
  for (auto& v : x0.data()) v = rng.normal();
  return x0;
}

MetricReport score_model(const VelocityField& model, const Schedule& sched,
                         const SamplerConfig& scfg, const BatchGrid& ref,
                         std::uint64_t seed, const SweepOptions& opts) {
  SeededRng rng_x0(seed, "eval-x0");
  SeededRng rng_path(seed, "eval-path");
  SeededRng rng_proj(seed, "eval-proj");
  Shape ss = ref.shape();
  BatchGrid x0 = noise_like(ss, opts.n_gen, rng_x0);
  Schedule sch = sched;
  BatchGrid gen = run_sampler(model, x0, scfg, sch, rng_path);
  return metric_report(gen, ref, opts.n_projections, rng_proj);
}

}  // namespace

SweepResult nfe_sweep(const VelocityField& model, const Schedule& sched,
                      const std::vector<SamplerKind>& kinds,
                      const std::vector<int>& nfe_list, const BatchGrid& ref,
                      const std::vector<std::uint64_t>& seeds,
                      double delta_clip, const SweepOptions& opts) {
  if (nfe_list.empty()) throw ConfigError("nfe_sweep: empty NFE list");
  if (!std::is_sorted(nfe_list.begin(), nfe_list.end()) ||
      std::adjacent_find(nfe_list.begin(), nfe_list.end()) != nfe_list.end())
    throw ConfigError("nfe_sweep: NFE values must be strictly increasing");
  SweepResult res;
  res.axis = "nfe";
  for (SamplerKind kind : kinds)
    for (int nfe : nfe_list)
      for (std::uint64_t seed : seeds) {
        SamplerConfig scfg{kind, nfe, DiffusionTag::SigmaT, delta_clip};
        SweepPoint pt;
        pt.axis_value = double(nfe);
        pt.seed = seed;
        pt.sampler = sampler_kind_name(kind);
        pt.nfe = nfe;
        pt.metrics = score_model(model, sched, scfg, ref, seed, opts);
        res.points.push_back(std::move(pt));
      }
  return res;
}

std::pair<SweepResult, SweepResult> ab_compare(
    const RunConfig& cfg_base, const RunConfig& cfg_vecor,
    const std::vector<std::uint64_t>& seeds,
    const std::vector<long>& checkpoints_at, const SweepOptions& opts) {
  if (!differ_only_in_vecor(cfg_base, cfg_vecor))
    throw ConfigError(
        "ab_compare: configs differ outside the vecor block; paired runs "
        "require identical hyperparameters");
  if (checkpoints_at.empty()) throw ConfigError("ab_compare: no checkpoints");
  SweepResult base, vec;
  base.axis = vec.axis = "step";
  for (const RunConfig* cfg : {&cfg_base, &cfg_vecor}) {
    SweepResult& out = (cfg == &cfg_base) ? base : vec;
    for (std::uint64_t seed : seeds) {
      SeededRng ref_rng(seed, "eval-ref");
      BatchGrid ref = sample_dataset(dataset_from_name(cfg->dataset),
                                     opts.n_gen, ref_rng);
      SamplerConfig scfg{cfg->sampler.kind, cfg->sampler.nfe, cfg->sampler.w,
                         cfg->sampler.delta_clip};
      auto hook = [&](TrainState& st) {
        if (std::find(checkpoints_at.begin(), checkpoints_at.end(), st.step) ==
            checkpoints_at.end())
          return;
        SweepPoint pt;
        pt.axis_value = double(st.step);
        pt.seed = seed;
        pt.sampler = sampler_kind_name(scfg.kind);
        pt.nfe = scfg.nfe;
        pt.metrics = score_model(*st.model, st.sched, scfg, ref,
                                 seed ^ std::uint64_t(st.step), opts);
        out.points.push_back(std::move(pt));
      };
      fit(*cfg, seed, /*write_artifacts=*/false, hook);
    }
  }
  return {base, vec};
}

std::string sweep_csv_string(const SweepResult& result) {
  std::string s =
      "axis,axis_value,seed,sliced_w2,energy_distance,mean_gap_norm,n_gen,"
      "n_ref,sampler,nfe\n";
  char line[512];
  for (const auto& p : result.points) {
    std::snprintf(line, sizeof(line),
                  "%s,%.12g,%llu,%.12g,%.12g,%.12g,%zu,%zu,%s,%d\n",
                  result.axis.c_str(), p.axis_value,
                  static_cast<unsigned long long>(p.seed), p.metrics.sliced_w2,
                  p.metrics.energy_distance, p.metrics.mean_gap_norm(),
                  p.metrics.n_gen, p.metrics.n_ref, p.sampler.c_str(), p.nfe);
    s += line;
  }
  return s;
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f << sweep_csv_string(result);
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace vecor
