#include "vecor/sample.hpp"

#include <algorithm>
#include <cmath>

#include "vecor/error.hpp"

namespace vecor {

namespace {

void check_state(const BatchGrid& x, int step, const char* sampler) {
  for (double v : x.data())
    if (!std::isfinite(v))
      throw NumericError(std::string(sampler) + ": non-finite state at step " +
                         std::to_string(step));
}

}  // namespace

BatchGrid euler_ode_grid(const VelocityField& model, const BatchGrid& x0,
                         std::span<const double> times) {
  if (times.size() < 2) throw ConfigError("euler_ode_grid: need >= 2 time points");
  BatchGrid x = x0.retag(Space::Latent);
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double h = times[k + 1] - times[k];
    BatchGrid v = model.eval(x, times[k]);
    auto px = x.data();
    auto pv = v.data();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = px[i] + h * pv[i];
    check_state(x, int(k), "euler_ode");
  }
  return x;
}

BatchGrid euler_ode(const VelocityField& model, const BatchGrid& x0,
                    const SamplerConfig& cfg) {
  if (cfg.nfe < 1) throw ConfigError("euler_ode: nfe must be >= 1");
  std::vector<double> times(std::size_t(cfg.nfe) + 1);
  const double h = 1.0 / double(cfg.nfe);
  for (int k = 0; k <= cfg.nfe; ++k) times[std::size_t(k)] = double(k) * h;
  times.back() = 1.0;
  return euler_ode_grid(model, x0, times);
}

BatchGrid heun2_ode(const VelocityField& model, const BatchGrid& x0,
                    const SamplerConfig& cfg) {
  if (cfg.nfe < 2 || cfg.nfe % 2 != 0)
    throw ConfigError("heun2_ode: nfe must be even (2 evaluations per step)");
  const int steps = cfg.nfe / 2;
  const double h = 1.0 / double(steps);
  BatchGrid x = x0.retag(Space::Latent);
  for (int k = 0; k < steps; ++k) {
    const double t = double(k) * h;
    BatchGrid k1 = model.eval(x, t);
    BatchGrid xt = x;
    {
      auto p = xt.data();
      auto p1 = k1.data();
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += h * p1[i];
    }
    BatchGrid k2 = model.eval(xt, t + h);
    auto px = x.data();
    auto p1 = k1.data();
    auto p2 = k2.data();
    for (std::size_t i = 0; i < px.size(); ++i)
      px[i] += 0.5 * h * (p1[i] + p2[i]);
    check_state(x, k, "heun2_ode");
  }
  return x;
}

std::vector<double> sde_time_grid(int nfe, double delta_clip) {
  if (nfe < 2) throw ConfigError("euler_maruyama: nfe must be >= 2");
  if (!(delta_clip > 0 && delta_clip < 0.5))
    throw ConfigError("euler_maruyama: require 0 < delta_clip < 0.5");
  const int stochastic = nfe - 1;
  const double h = (1.0 - delta_clip) / double(stochastic);
  std::vector<double> times(std::size_t(nfe) + 1);
  for (int k = 0; k <= stochastic; ++k) times[std::size_t(k)] = double(k) * h;
  times[std::size_t(stochastic)] = 1.0 - delta_clip;
  times.back() = 1.0;
  return times;
}

BatchGrid euler_maruyama_sde(const VelocityField& model, const BatchGrid& x0,
                             const SamplerConfig& cfg, const Schedule& sched,
                             SeededRng& rng) {
  auto times = sde_time_grid(cfg.nfe, cfg.delta_clip);
  const double delta = cfg.delta_clip;
  BatchGrid x = x0.retag(Space::Latent);
  const std::size_t n_steps = times.size() - 1;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = times[k];
    const double h = times[k + 1] - times[k];
    BatchGrid v = model.eval(x, t);
    if (k + 1 == n_steps) {
      // score is singular at t=1: final step is deterministic Euler on v
      auto px = x.data();
      auto pv = v.data();
      for (std::size_t i = 0; i < px.size(); ++i) px[i] = px[i] + h * pv[i];
    } else {
      const double tc = std::clamp(t, delta, 1.0 - delta);
      const double w = (cfg.w == DiffusionTag::SigmaT) ? sched.sigma(t) : 0.0;
      BatchGrid s = score_from_velocity(sched, v, x, tc, delta * 0.5);
      const double noise_scale = std::sqrt(w * h);
      auto px = x.data();
      auto pv = v.data();
      auto ps = s.data();
      for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = px[i] + h * (pv[i] + (w / 2.0) * ps[i]);
        px[i] = px[i] + noise_scale * rng.normal();
      }
    }
    check_state(x, int(k), "euler_maruyama");
  }
  return x;
}

BatchGrid run_sampler(const VelocityField& model, const BatchGrid& x0,
                      const SamplerConfig& cfg, const Schedule& sched,
                      SeededRng& rng) {
  switch (cfg.kind) {
    case SamplerKind::EulerODE: return euler_ode(model, x0, cfg);
    case SamplerKind::Heun2ODE: return heun2_ode(model, x0, cfg);
    case SamplerKind::EulerMaruyamaSDE:
      return euler_maruyama_sde(model, x0, cfg, sched, rng);
  }
  throw ConfigError("run_sampler: bad sampler kind");
}

}  // namespace vecor
