#include "vecor/schedule.hpp"

#include "vecor/error.hpp"

namespace vecor {

Schedule linear_schedule() {
  Schedule s;
  s.alpha = [](double t) { return t; };
  s.sigma = [](double t) { return 1.0 - t; };
  s.dalpha = [](double) { return 1.0; };
  s.dsigma = [](double) { return -1.0; };
  s.kind = Schedule::Kind::Linear;
  return s;
}

namespace {

void require_same_shape(const BatchGrid& x, const BatchGrid& eps,
                        const char* what) {
  if (!(x.shape() == eps.shape()))
    throw ConfigError(std::string(what) + ": shape mismatch " +
                      x.shape().str() + " vs " + eps.shape().str());
}

void require_time(double t, const char* what) {
  if (!(t >= 0.0 && t <= 1.0))
    throw ConfigError(std::string(what) + ": t outside [0,1]");
}

BatchGrid affine_combine(const BatchGrid& x, const BatchGrid& eps, double a,
                         double b, Space space) {
  BatchGrid out(x.shape(), space);
  auto px = x.data();
  auto pe = eps.data();
  auto po = out.data();
  for (std::size_t i = 0; i < po.size(); ++i) po[i] = a * px[i] + b * pe[i];
  return out;
}

}  // namespace

BatchGrid interpolate(const Schedule& sched, const BatchGrid& x,
                      const BatchGrid& eps, double t) {
  require_same_shape(x, eps, "interpolate");
  require_time(t, "interpolate");
  return affine_combine(x, eps, sched.alpha(t), sched.sigma(t), Space::Latent);
}

BatchGrid target_velocity(const Schedule& sched, const BatchGrid& x,
                          const BatchGrid& eps, double t) {
  require_same_shape(x, eps, "target_velocity");
  require_time(t, "target_velocity");
  return affine_combine(x, eps, sched.dalpha(t), sched.dsigma(t),
                        Space::Velocity);
}

BatchGrid interpolate_per_sample(const Schedule& sched, const BatchGrid& x,
                                 const BatchGrid& eps,
                                 std::span<const double> t) {
  require_same_shape(x, eps, "interpolate");
  if (t.size() != x.shape().b)
    throw ConfigError("interpolate: need one t per sample");
  BatchGrid out(x.shape(), Space::Latent);
  const std::size_t n = x.shape().sample_size();
  for (std::size_t b = 0; b < x.shape().b; ++b) {
    require_time(t[b], "interpolate");
    double a = sched.alpha(t[b]);
    double s = sched.sigma(t[b]);
    auto px = x.sample(b);
    auto pe = eps.sample(b);
    auto po = out.sample(b);
    for (std::size_t i = 0; i < n; ++i) po[i] = a * px[i] + s * pe[i];
  }
  return out;
}

BatchGrid target_velocity_per_sample(const Schedule& sched, const BatchGrid& x,
                                     const BatchGrid& eps,
                                     std::span<const double> t) {
  require_same_shape(x, eps, "target_velocity");
  if (t.size() != x.shape().b)
    throw ConfigError("target_velocity: need one t per sample");
  BatchGrid out(x.shape(), Space::Velocity);
  const std::size_t n = x.shape().sample_size();
  for (std::size_t b = 0; b < x.shape().b; ++b) {
    require_time(t[b], "target_velocity");
    double da = sched.dalpha(t[b]);
    double ds = sched.dsigma(t[b]);
    auto px = x.sample(b);
    auto pe = eps.sample(b);
    auto po = out.sample(b);
    for (std::size_t i = 0; i < n; ++i) po[i] = da * px[i] + ds * pe[i];
  }
  return out;
}

BatchGrid score_from_velocity(const Schedule& sched, const BatchGrid& v,
                              const BatchGrid& xt, double t, double delta_min) {
  if (sched.kind != Schedule::Kind::Linear)
    throw ConfigError("score_from_velocity: linear schedule only");
  require_same_shape(v, xt, "score_from_velocity");
  if (!(t > delta_min && t < 1.0 - delta_min))
    throw NumericError("score_from_velocity: t=" + std::to_string(t) +
                       " outside (" + std::to_string(delta_min) + ", " +
                       std::to_string(1.0 - delta_min) + "); clamp at caller");
  BatchGrid out(v.shape(), Space::Latent);
  auto pv = v.data();
  auto px = xt.data();
  auto po = out.data();
  const double inv = 1.0 / (1.0 - t);
  for (std::size_t i = 0; i < po.size(); ++i)
    po[i] = (t * pv[i] - px[i]) * inv;
  return out;
}

}  // namespace vecor
