#pragma once

#include <functional>
#include <span>

#include "vecor/grid.hpp"

namespace vecor {

// Interpolation schedule (alpha_t, sigma_t) with time derivatives.
// Boundary conditions: alpha(1) = sigma(0) = 1, alpha(0) = sigma(1) = 0.
struct Schedule {
  enum class Kind { Linear };
  std::function<double(double)> alpha, sigma, dalpha, dsigma;
  Kind kind = Kind::Linear;
};

// alpha_t = t, sigma_t = 1 - t.
Schedule linear_schedule();

// x_t = alpha_t * x + sigma_t * eps.
BatchGrid interpolate(const Schedule& sched, const BatchGrid& x,
                      const BatchGrid& eps, double t);

// v = dalpha_t * x + dsigma_t * eps; x - eps under the linear schedule.
BatchGrid target_velocity(const Schedule& sched, const BatchGrid& x,
                          const BatchGrid& eps, double t);

// Per-sample-time variants used by the trainer (one t per batch row).
BatchGrid interpolate_per_sample(const Schedule& sched, const BatchGrid& x,
                                 const BatchGrid& eps, std::span<const double> t);
BatchGrid target_velocity_per_sample(const Schedule& sched, const BatchGrid& x,
                                     const BatchGrid& eps,
                                     std::span<const double> t);

// Score for the linear schedule: s = (t*v - x_t) / (1 - t).
//
// Derivation (linear schedule only): from x_t = t*x + (1-t)*eps and the
// marginal velocity v = E[x - eps | x_t] we get E[eps | x_t] = x_t - t*v,
// and the score of the marginal is s = -E[eps | x_t] / sigma_t. The
// general-schedule form s = (alpha_t*v - dalpha_t*x_t) /
// (sigma_t*(dalpha_t*sigma_t - alpha_t*dsigma_t)) reduces to the above and is
// intentionally not exposed.
//
// Requires delta_min < t < 1 - delta_min; callers integrating across the
// full time range must clamp t before conversion.
BatchGrid score_from_velocity(const Schedule& sched, const BatchGrid& v,
                              const BatchGrid& xt, double t,
                              double delta_min = 1e-3);

}  // namespace vecor
