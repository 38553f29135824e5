#pragma once

#include <functional>
#include <memory>

#include "vecor/config.hpp"
#include "vecor/model.hpp"
#include "vecor/objective.hpp"

namespace vecor {

struct TrainLogRecord {
  long step = 0;
  double fm_term = 0.0;
  double neg_term = 0.0;
  double total = 0.0;
  double grad_norm = 0.0;
  double wall_ms = 0.0;
};

// One trainer owns one model. Substreams "data", "noise", "time" and
// "perturb" are disjoint so that toggling VeCoR leaves the baseline's random
// sequences untouched.
struct TrainState {
  RunConfig cfg;
  std::uint64_t seed = 0;
  std::shared_ptr<TrainableModel> model;
  OptimState opt;
  Schedule sched;
  long step = 0;
  SeededRng rng_noise, rng_time, rng_perturb, rng_data;
  BatchGrid pool;  // training samples, drawn once per run
  std::vector<TrainLogRecord> log;
};

TrainState make_train_state(const RunConfig& cfg, std::uint64_t seed);

// Uniform-with-replacement minibatch from the pool via the "data" substream.
BatchGrid draw_batch(TrainState& state);

// One optimization step on `batch`: per-sample t ~ U(0,1), eps ~ N(0,I),
// interpolated state and target velocity, optional negative synthesis, exact
// gradient, optimizer update, one log record.
void train_step(TrainState& state, const BatchGrid& batch);

// Optional per-step hook (step index after the update); used by ab_compare.
using StepHook = std::function<void(TrainState&)>;

// Runs cfg.steps train steps. If write_artifacts is set, emits the log CSV,
// checkpoint(s), the exact config, and a manifest under
// <out_dir>/<run-id>/ and returns artifact paths through the state's log.
TrainState fit(const RunConfig& cfg, std::uint64_t seed,
               bool write_artifacts = false, const StepHook& hook = {});

// Training-log CSV: step,fm_term,neg_term,total,grad_norm,wall_ms.
void write_train_log(const std::string& path,
                     const std::vector<TrainLogRecord>& log);

// Checkpoint: u64 config hash then the parameter vector as a 1x1x1xN grid in
// the core binary format.
void write_checkpoint(const std::string& path, std::uint64_t cfg_hash,
                      std::span<const double> params);
std::pair<std::uint64_t, std::vector<double>> read_checkpoint(
    const std::string& path);

// Directory name <dataset>-<cfg-hash-hex>-seed<seed>.
std::string run_id(const RunConfig& cfg, std::uint64_t seed);

// Builds the model described by the config (shape from the dataset).
std::shared_ptr<TrainableModel> make_model(const RunConfig& cfg);

}  // namespace vecor
