// Command-line front end: train / sample / eval / sweep / verify.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vecor/config.hpp"
#include "vecor/dataset.hpp"
#include "vecor/error.hpp"
#include "vecor/metrics.hpp"
#include "vecor/sample.hpp"
#include "vecor/svg.hpp"
#include "vecor/sweep.hpp"
#include "vecor/train.hpp"
#include "vecor/verify.hpp"

namespace fs = std::filesystem;
using namespace vecor;

namespace {

// VECOR_OUT overrides the output root for every artifact-producing command.
std::string out_root(const std::string& configured) {
  if (const char* env = std::getenv("VECOR_OUT"); env && *env) return env;
  return configured;
}

struct TrainOverrides {
  long steps = -1;
  std::string dataset, sampler, out_dir;
  int nfe = -1;
  double lambda = -2.0;
  int k = -1;
  int vecor_on = -1;  // -1 untouched, 0 off, 1 on
  std::vector<std::uint64_t> seeds;
};

RunConfig effective_config(const std::string& path, const TrainOverrides& ov) {
  RunConfig cfg = load_run_config(path);
  if (ov.steps >= 0) cfg.steps = ov.steps;
  if (!ov.dataset.empty()) cfg.dataset = ov.dataset;
  if (!ov.sampler.empty()) cfg.sampler.kind = sampler_kind_from_name(ov.sampler);
  if (ov.nfe > 0) cfg.sampler.nfe = ov.nfe;
  if (ov.lambda > -1.0) cfg.vecor.lambda = ov.lambda;
  if (ov.k > 0) { cfg.vecor.k = ov.k; cfg.vecor.perturb.k_negatives = ov.k; }
  if (ov.vecor_on >= 0) cfg.vecor.enabled = ov.vecor_on != 0;
  if (!ov.seeds.empty()) cfg.seeds = ov.seeds;
  if (!ov.out_dir.empty()) cfg.out_dir = ov.out_dir;
  cfg.out_dir = out_root(cfg.out_dir);
  validate_run_config(cfg);
  return cfg;
}

int cmd_train(const std::string& config_path, const TrainOverrides& ov) {
  RunConfig cfg = effective_config(config_path, ov);
  for (std::uint64_t seed : cfg.seeds) {
    TrainState st = fit(cfg, seed, /*write_artifacts=*/true);
    std::printf("trained %s: %ld steps, final loss %.6g\n",
                run_id(cfg, seed).c_str(), st.step,
                st.log.empty() ? 0.0 : st.log.back().total);
  }
  return 0;
}

std::shared_ptr<TrainableModel> load_model(const std::string& ckpt_path,
                                           std::string config_path,
                                           RunConfig& cfg_out) {
  if (config_path.empty())
    config_path = (fs::path(ckpt_path).parent_path() / "config.json").string();
  cfg_out = load_run_config(config_path);
  auto [hash, params] = read_checkpoint(ckpt_path);
  if (hash != config_hash(cfg_out))
    throw ConfigError("checkpoint " + ckpt_path +
                      " was not produced by config " + config_path);
  auto model = make_model(cfg_out);
  auto ps = model->params();
  if (ps.size() != params.size())
    throw ConfigError("checkpoint parameter count mismatch: " +
                      std::to_string(params.size()) + " vs model " +
                      std::to_string(ps.size()));
  std::copy(params.begin(), params.end(), ps.begin());
  return model;
}

int cmd_sample(const std::string& ckpt, const std::string& config_path,
               const std::string& sampler, int nfe, std::uint64_t seed,
               std::size_t n, std::string out_path) {
  RunConfig cfg;
  auto model = load_model(ckpt, config_path, cfg);
  if (!sampler.empty()) cfg.sampler.kind = sampler_kind_from_name(sampler);
  if (nfe > 0) cfg.sampler.nfe = nfe;
  if (cfg.sampler.kind == SamplerKind::Heun2ODE && cfg.sampler.nfe % 2 != 0)
    throw ConfigError("heun2 needs an even NFE budget (got " +
                      std::to_string(cfg.sampler.nfe) + ")");
  if (cfg.sampler.nfe < 1) throw ConfigError("nfe must be >= 1");

  Shape ss = dataset_sample_shape(dataset_from_name(cfg.dataset));
  ss.b = std::uint32_t(n);
  SeededRng rng_x0(seed, "sample-x0");
  BatchGrid x0(ss, Space::Noise);
  for (auto& v : x0.data()) v = rng_x0.normal();
  SeededRng rng_path(seed, "sample-path");
  Schedule sched = linear_schedule();
  SamplerConfig scfg{cfg.sampler.kind, cfg.sampler.nfe, cfg.sampler.w,
                     cfg.sampler.delta_clip};
  BatchGrid samples = run_sampler(*model, x0, scfg, sched, rng_path);

  if (out_path.empty()) out_path = "samples.grid";
  fs::path out = fs::path(out_root(".")) / out_path;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_grid(out.string(), samples);
  RunManifest m;
  m.config_hash = config_hash(cfg);
  m.artifacts = {out.string()};
  m.build_id = "vecor-lab";
  m.status = "ok";
  write_manifest(out.string() + ".manifest.json", m);
  std::printf("wrote %zu samples (%s, nfe=%d) to %s\n", std::size_t(ss.b),
              sampler_kind_name(scfg.kind), scfg.nfe, out.string().c_str());
  return 0;
}

int cmd_eval(const std::string& gen_path, const std::string& ref_path,
             const std::string& ref_dataset, std::size_t ref_n,
             std::uint64_t seed, int projections, const std::string& out_path) {
  BatchGrid gen = read_grid(gen_path);
  BatchGrid ref;
  if (!ref_path.empty()) {
    ref = read_grid(ref_path);
  } else if (!ref_dataset.empty()) {
    SeededRng rng(seed, "eval-ref");
    ref = sample_dataset(dataset_from_name(ref_dataset), ref_n, rng);
  } else {
    throw ConfigError("eval: need --ref or --dataset");
  }
  SeededRng rng_proj(seed, "eval-proj");
  MetricReport r = metric_report(gen, ref, projections, rng_proj);
  char line[256];
  std::string csv = "sliced_w2,energy_distance,mean_gap_norm,n_gen,n_ref\n";
  std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%zu,%zu\n", r.sliced_w2,
                r.energy_distance, r.mean_gap_norm(), r.n_gen, r.n_ref);
  csv += line;
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw IoError("cannot open for write: " + out_path);
    f << csv;
  }
  return 0;
}

std::vector<SvgSeries> sweep_series(const SweepResult& res,
                                    const std::string& label,
                                    const std::string& color) {
  // mean over seeds per axis value
  std::vector<double> xs;
  for (const auto& p : res.points)
    if (std::find(xs.begin(), xs.end(), p.axis_value) == xs.end())
      xs.push_back(p.axis_value);
  std::sort(xs.begin(), xs.end());
  SvgSeries s{label, color, {}};
  for (double x : xs) {
    double acc = 0.0;
    int n = 0;
    for (const auto& p : res.points)
      if (p.axis_value == x) { acc += p.metrics.sliced_w2; ++n; }
    s.points.push_back({x, acc / n});
  }
  return {s};
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values,
              const std::vector<std::uint64_t>& seed_flags,
              const std::string& ckpt, std::string out_path,
              const std::string& svg_path, const TrainOverrides& ov) {
  if (values.empty()) throw ConfigError("sweep: empty --values");
  RunConfig cfg = effective_config(config_path, ov);
  std::vector<std::uint64_t> seeds = seed_flags.empty() ? cfg.seeds : seed_flags;
  if (out_path.empty()) out_path = "sweep.csv";
  fs::path out = fs::path(out_root(".")) / out_path;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());

  if (axis == "nfe") {
    std::vector<int> nfe_list;
    for (double v : values) nfe_list.push_back(int(v));
    std::shared_ptr<TrainableModel> model;
    if (!ckpt.empty()) {
      RunConfig ckpt_cfg;
      model = load_model(ckpt, config_path, ckpt_cfg);
    } else {
      model = fit(cfg, seeds.front()).model;
    }
    Schedule sched = linear_schedule();
    SeededRng ref_rng(seeds.front(), "eval-ref");
    SweepOptions opts;
    BatchGrid ref = sample_dataset(dataset_from_name(cfg.dataset), opts.n_gen,
                                   ref_rng);
    SweepResult res = nfe_sweep(*model, sched, {cfg.sampler.kind}, nfe_list,
                                ref, seeds, cfg.sampler.delta_clip, opts);
    write_sweep_csv(out.string(), res);
    if (!svg_path.empty())
      write_svg(svg_path, svg_line_chart(sweep_series(res, "sliced W2",
                                                      "#1f77b4"),
                                         "nfe", "sliced W2"));
    std::printf("wrote %zu rows to %s\n", res.points.size(),
                out.string().c_str());
    return 0;
  }
  if (axis == "step") {
    if (!cfg.vecor.enabled)
      throw ConfigError("sweep --axis step: config must enable vecor; the "
                        "baseline is derived by disabling it");
    RunConfig base = cfg;
    base.vecor = VecorBlock{};
    std::vector<long> at;
    for (double v : values) at.push_back(long(v));
    auto [res_base, res_vec] = ab_compare(base, cfg, seeds, at);
    fs::path base_out = out;
    base_out.replace_filename(out.stem().string() + "-baseline" +
                              out.extension().string());
    write_sweep_csv(out.string(), res_vec);
    write_sweep_csv(base_out.string(), res_base);
    if (!svg_path.empty()) {
      auto sv = sweep_series(res_vec, "vecor", "#d62728");
      auto sb = sweep_series(res_base, "baseline", "#1f77b4");
      sv.insert(sv.end(), sb.begin(), sb.end());
      write_svg(svg_path, svg_line_chart(sv, "step", "sliced W2"));
    }
    std::printf("wrote %zu rows to %s and %zu rows to %s\n",
                res_vec.points.size(), out.string().c_str(),
                res_base.points.size(), base_out.string().c_str());
    return 0;
  }
  throw ConfigError("sweep: unknown --axis '" + axis + "' (want nfe or step)");
}

int cmd_verify(bool inject_gradient_fault) {
  VerifyOptions opts;
  opts.inject_gradient_fault = inject_gradient_fault;
  auto results = run_verification(opts);
  bool all = true;
  for (const auto& r : results) {
    std::printf("[%s] %-22s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.detail.c_str());
    all = all && r.pass;
  }
  if (!all) {
    std::printf("verification FAILED\n");
    return 3;
  }
  std::printf("all checks passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flow-matching lab with velocity-contrastive regularization"};
  app.require_subcommand(1);

  TrainOverrides ov;
  std::string config_path, ckpt, sampler, out_path, svg_path, axis;
  std::string gen_path, ref_path, ref_dataset;
  std::uint64_t seed = 1;
  int nfe = -1, projections = 128;
  std::size_t n = 4096, ref_n = 4096;
  std::vector<double> values;
  std::vector<std::uint64_t> seed_flags;
  bool inject_fault = false;

  auto add_overrides = [&](CLI::App* c) {
    c->add_option("--steps", ov.steps, "override training steps");
    c->add_option("--dataset", ov.dataset, "override dataset name");
    c->add_option("--sampler", ov.sampler, "override sampler (euler|heun2|em)");
    c->add_option("--nfe", ov.nfe, "override sampler NFE budget");
    c->add_option("--lambda", ov.lambda, "override vecor lambda");
    c->add_option("--k", ov.k, "override vecor negative count K");
    c->add_flag("--vecor,!--no-vecor",
                [&](std::int64_t v) { ov.vecor_on = v > 0 ? 1 : 0; },
                "force vecor on/off");
    c->add_option("--seed", ov.seeds, "override seed list");
  };

  CLI::App* train = app.add_subcommand("train", "train a velocity field");
  train->add_option("--config", config_path, "run config (JSON)")->required();
  train->add_option("--out", ov.out_dir, "override output directory");
  add_overrides(train);

  CLI::App* sample = app.add_subcommand("sample", "integrate a checkpoint");
  sample->add_option("--ckpt", ckpt, "checkpoint file")->required();
  sample->add_option("--config", config_path,
                     "config that produced the checkpoint (default: "
                     "config.json beside it)");
  sample->add_option("--sampler", sampler, "euler|heun2|em");
  sample->add_option("--nfe", nfe, "function-evaluation budget");
  sample->add_option("--seed", seed, "sampling seed");
  sample->add_option("--n", n, "number of samples");
  sample->add_option("--out", out_path, "output grid file");

  CLI::App* eval = app.add_subcommand("eval", "score samples against a reference");
  eval->add_option("--gen", gen_path, "generated grid file")->required();
  eval->add_option("--ref", ref_path, "reference grid file");
  eval->add_option("--dataset", ref_dataset, "reference dataset name");
  eval->add_option("--ref-n", ref_n, "reference sample count");
  eval->add_option("--seed", seed, "projection/reference seed");
  eval->add_option("--projections", projections, "sliced-W2 direction count");
  eval->add_option("--out", out_path, "metrics CSV (default stdout)");

  CLI::App* sweep = app.add_subcommand("sweep", "NFE or training-step sweep");
  sweep->add_option("--config", config_path, "run config (JSON)")->required();
  sweep->add_option("--axis", axis, "nfe or step")->required();
  sweep->add_option("--values", values, "axis values")->delimiter(',');
  sweep->add_option("--seeds", seed_flags, "seed list")->delimiter(',');
  sweep->add_option("--ckpt", ckpt, "reuse a checkpoint (nfe axis only)");
  sweep->add_option("--out", out_path, "output CSV path");
  sweep->add_option("--svg", svg_path, "also write an SVG chart");
  add_overrides(sweep);

  CLI::App* verify = app.add_subcommand("verify", "run the oracle suite");
  verify->add_flag("--inject-gradient-fault", inject_fault,
                   "corrupt the analytic gradient (harness sensitivity test)")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
    if (*train) return cmd_train(config_path, ov);
    if (*sample)
      return cmd_sample(ckpt, config_path, sampler, nfe, seed, n, out_path);
    if (*eval)
      return cmd_eval(gen_path, ref_path, ref_dataset, ref_n, seed, projections,
                      out_path);
    if (*sweep)
      return cmd_sweep(config_path, axis, values, seed_flags, ckpt, out_path,
                       svg_path, ov);
    if (*verify) return cmd_verify(inject_fault);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are config errors
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
