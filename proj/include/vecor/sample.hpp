#pragma once

#include "vecor/config.hpp"
#include "vecor/grid.hpp"
#include "vecor/model.hpp"
#include "vecor/rng.hpp"
#include "vecor/schedule.hpp"

namespace vecor {

struct SamplerConfig {
  SamplerKind kind = SamplerKind::EulerMaruyamaSDE;
  int nfe = 50;
  DiffusionTag w = DiffusionTag::SigmaT;
  double delta_clip = 1e-3;
};

// Forward Euler over an explicit time grid; steps use v(x, t_k) with
// h = t_{k+1} - t_k. Shared core for euler_ode and the SDE's w=0 reduction.
BatchGrid euler_ode_grid(const VelocityField& model, const BatchGrid& x0,
                         std::span<const double> times);

// nfe uniform Euler steps from t=0 to t=1.
BatchGrid euler_ode(const VelocityField& model, const BatchGrid& x0,
                    const SamplerConfig& cfg);

// nfe/2 Heun (explicit trapezoid) steps; nfe must be even.
BatchGrid heun2_ode(const VelocityField& model, const BatchGrid& x0,
                    const SamplerConfig& cfg);

// Time grid used by the SDE sampler: nfe-1 uniform stochastic steps on
// [0, 1 - delta_clip] plus one final deterministic step to t=1.
std::vector<double> sde_time_grid(int nfe, double delta_clip);

// Euler-Maruyama on dX = [v + (w_t/2) s] dt + sqrt(w_t) dW with w_t = sigma_t
// and s recovered from the velocity (t clamped inside (delta, 1 - delta) for
// the score conversion). The last step to t=1 is deterministic Euler on v.
BatchGrid euler_maruyama_sde(const VelocityField& model, const BatchGrid& x0,
                             const SamplerConfig& cfg, const Schedule& sched,
                             SeededRng& rng);

BatchGrid run_sampler(const VelocityField& model, const BatchGrid& x0,
                      const SamplerConfig& cfg, const Schedule& sched,
                      SeededRng& rng);

}  // namespace vecor
