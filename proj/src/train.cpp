#include "vecor/train.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vecor/error.hpp"

namespace vecor {

namespace fs = std::filesystem;

std::shared_ptr<TrainableModel> make_model(const RunConfig& cfg) {
  Shape s = dataset_sample_shape(dataset_from_name(cfg.dataset));
  return std::make_shared<MlpVelocityField>(s.c, s.h, s.w, cfg.hidden,
                                            cfg.fourier_bands);
}

TrainState make_train_state(const RunConfig& cfg, std::uint64_t seed) {
  validate_run_config(cfg);
  TrainState st{cfg,
                seed,
                make_model(cfg),
                OptimState{cfg.optim.kind, cfg.optim.lr, cfg.optim.beta1,
                           cfg.optim.beta2, cfg.optim.eps},
                linear_schedule(),
                0,
                SeededRng(seed, "noise"),
                SeededRng(seed, "time"),
                SeededRng(seed, "perturb"),
                SeededRng(seed, "data"),
                BatchGrid{},
                {}};
  SeededRng init_rng(seed, "init");
  st.model->init_params(init_rng);
  SeededRng pool_rng(seed, "dataset");
  st.pool = sample_dataset(dataset_from_name(cfg.dataset), cfg.dataset_size,
                           pool_rng);
  return st;
}

BatchGrid draw_batch(TrainState& state) {
  const Shape& ps = state.pool.shape();
  Shape bs = ps;
  bs.b = std::uint32_t(state.cfg.batch_size);
  BatchGrid batch(bs, Space::Latent);
  for (std::size_t i = 0; i < bs.b; ++i) {
    auto idx = static_cast<std::size_t>(
        state.rng_data.int_range(0, std::int64_t(ps.b) - 1));
    auto src = state.pool.sample(idx);
    auto dst = batch.sample(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return batch;
}

void train_step(TrainState& state, const BatchGrid& batch) {
  auto t_start = std::chrono::steady_clock::now();
  const std::size_t B = batch.shape().b;
  std::vector<double> tvec(B);
  for (auto& t : tvec) t = state.rng_time.uniform01();
  BatchGrid eps(batch.shape(), Space::Noise);
  for (auto& e : eps.data()) e = state.rng_noise.normal();

  BatchGrid xt = interpolate_per_sample(state.sched, batch, eps, tvec);
  BatchGrid v_pos = target_velocity_per_sample(state.sched, batch, eps, tvec);
  BatchGrid pred = state.model->forward_train(xt, tvec);

  LossReport report;
  BatchGrid upstream;
  if (state.cfg.vecor.enabled) {
    VecorConfig vc = state.cfg.vecor_cfg();
    NegativeCandidateSet cands =
        build_negatives(batch, eps, tvec, v_pos, state.cfg.vecor.perturb,
                        state.sched, state.rng_perturb);
    report = vecor_loss(pred, cands, vc);
    upstream = vecor_grad(pred, cands, vc);
  } else {
    report = fm_loss(pred, v_pos);
    const double scale = 2.0 / double(B);
    upstream = BatchGrid(pred.shape(), Space::Velocity);
    auto pu = upstream.data();
    auto pp = pred.data();
    auto pt = v_pos.data();
    for (std::size_t i = 0; i < pu.size(); ++i)
      pu[i] = scale * (pp[i] - pt[i]);
  }
  if (!std::isfinite(report.total))
    throw NumericError("train_step: non-finite loss at step " +
                       std::to_string(state.step));

  std::vector<double> grad = state.model->backward(upstream);
  double gn = 0.0;
  for (double g : grad) gn += g * g;
  state.opt.update(state.model->params(), grad);
  ++state.step;

  auto t_end = std::chrono::steady_clock::now();
  TrainLogRecord rec;
  rec.step = state.step;
  rec.fm_term = report.positive_term;
  rec.neg_term = report.negative_term;
  rec.total = report.total;
  rec.grad_norm = std::sqrt(gn);
  rec.wall_ms =
      std::chrono::duration<double, std::milli>(t_end - t_start).count();
  state.log.push_back(rec);
}

std::string run_id(const RunConfig& cfg, std::uint64_t seed) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s-%016llx-seed%llu", cfg.dataset.c_str(),
                static_cast<unsigned long long>(config_hash(cfg)),
                static_cast<unsigned long long>(seed));
  return buf;
}

void write_train_log(const std::string& path,
                     const std::vector<TrainLogRecord>& log) {
  std::ofstream f(path, std::ios::binary);  // binary: LF line endings everywhere
  if (!f) throw IoError("cannot open for write: " + path);
  f << "step,fm_term,neg_term,total,grad_norm,wall_ms\n";
  char line[256];
  for (const auto& r : log) {
    std::snprintf(line, sizeof(line), "%ld,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  r.step, r.fm_term, r.neg_term, r.total, r.grad_norm,
                  r.wall_ms);
    f << line;
  }
  if (!f) throw IoError("write failed: " + path);
}

void write_checkpoint(const std::string& path, std::uint64_t cfg_hash,
                      std::span<const double> params) {
  // parameter payload reuses the grid dump format
  BatchGrid g(Shape{1, 1, 1, std::uint32_t(params.size())}, Space::Latent,
              std::vector<double>(params.begin(), params.end()));
  std::string body = path + ".body";
  write_grid(body, g);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path);
  out.write(reinterpret_cast<const char*>(&cfg_hash), sizeof(cfg_hash));
  {
    std::ifstream in(body, std::ios::binary);
    out << in.rdbuf();
  }
  fs::remove(body);
  if (!out) throw IoError("write failed: " + path);
}

std::pair<std::uint64_t, std::vector<double>> read_checkpoint(
    const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open checkpoint: " + path);
  std::uint64_t hash = 0;
  f.read(reinterpret_cast<char*>(&hash), sizeof(hash));
  if (!f) throw IoError("truncated checkpoint: " + path);
  std::string rest((std::istreambuf_iterator<char>(f)),
                   std::istreambuf_iterator<char>());
  std::string tmp = path + ".body";
  {
    std::ofstream o(tmp, std::ios::binary);
    o << rest;
  }
  BatchGrid g = read_grid(tmp);
  fs::remove(tmp);
  auto d = g.data();
  return {hash, std::vector<double>(d.begin(), d.end())};
}

TrainState fit(const RunConfig& cfg, std::uint64_t seed, bool write_artifacts,
               const StepHook& hook) {
  auto wall_start = std::chrono::steady_clock::now();
  TrainState st = make_train_state(cfg, seed);
  if (st.pool.shape().b == 0) throw ConfigError("fit: empty dataset");
  for (long s = 0; s < cfg.steps; ++s) {
    BatchGrid batch = draw_batch(st);
    train_step(st, batch);
    if (hook) hook(st);
    if (write_artifacts && cfg.checkpoint_every > 0 &&
        st.step % cfg.checkpoint_every == 0 && st.step < cfg.steps) {
      fs::path dir = fs::path(cfg.out_dir) / run_id(cfg, seed);
      fs::create_directories(dir);
      write_checkpoint((dir / (run_id(cfg, seed) + "-" +
                               std::to_string(st.step) + ".ckpt")).string(),
                       config_hash(cfg), st.model->params());
    }
  }
  if (write_artifacts) {
    fs::path dir = fs::path(cfg.out_dir) / run_id(cfg, seed);
    fs::create_directories(dir);
    RunManifest m;
    m.config_hash = config_hash(cfg);
    std::string log_path = (dir / "train_log.csv").string();
    std::string ckpt_path =
        (dir / (run_id(cfg, seed) + "-" + std::to_string(st.step) + ".ckpt"))
            .string();
    std::string cfg_path = (dir / "config.json").string();
    write_train_log(log_path, st.log);
    write_checkpoint(ckpt_path, m.config_hash, st.model->params());
    {
      std::ofstream f(cfg_path, std::ios::binary);
      if (!f) throw IoError("cannot open for write: " + cfg_path);
      f << run_config_to_json(cfg);
    }
    m.artifacts = {log_path, ckpt_path, cfg_path};
    m.wall_seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - wall_start)
                         .count();
    m.build_id = "vecor-lab";
    m.status = "ok";
    write_manifest((dir / "manifest.json").string(), m);
  }
  return st;
}

}  // namespace vecor
