#include "vecor/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vecor/error.hpp"
#include "vecor/objective.hpp"
#include "vecor/optimizer.hpp"
#include "vecor/perturb.hpp"
#include "vecor/sample.hpp"
#include "vecor/schedule.hpp"
#include "vecor/train.hpp"

namespace vecor {

BatchGrid GaussianAnalyticField::eval(const BatchGrid& xt, double t) const {
  ++evals_;
  const double c = coeff(t);
  BatchGrid out(xt.shape(), Space::Velocity);
  auto px = xt.data();
  auto po = out.data();
  for (std::size_t i = 0; i < po.size(); ++i) po[i] = c * px[i];
  return out;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

NegativeCandidateSet random_candidates(Shape shape, int k, SeededRng& rng) {
  NegativeCandidateSet set;
  set.positive = BatchGrid(shape, Space::Velocity);
  for (auto& v : set.positive.data()) v = rng.normal();
  for (int j = 0; j < k; ++j) {
    BatchGrid n(shape, Space::Velocity);
    for (auto& v : n.data()) v = rng.normal();
    set.negatives.push_back(std::move(n));
  }
  set.shared_eps = BatchGrid(shape, Space::Noise);
  set.shared_t.assign(shape.b, 0.5);
  return set;
}

}  // namespace

CheckResult check_fixed_point_oracle() {
  SeededRng rng(2024, "fixed-point");
  const Shape shape{4, 2, 1, 1};
  double worst = 0.0;
  for (double lambda : {0.01, 0.05, 0.2})
    for (int k : {1, 2, 4}) {
      VecorConfig cfg{lambda, k, false};
      auto cands = random_candidates(shape, k, rng);
      BatchGrid target = closed_form_optimum(cands, cfg);
      TabularVelocityField tab(shape);
      tab.init_params(rng);
      OptimState opt{OptKind::SGD, 0.1};
      double resid = 0.0;
      for (int it = 0; it < 10000; ++it) {
        BatchGrid pred = tab.forward_train(cands.positive, cands.shared_t);
        BatchGrid g = vecor_grad(pred, cands, cfg);
        auto grad = tab.backward(g);
        opt.update(tab.params(), grad);
        resid = 0.0;
        for (std::size_t i = 0; i < target.size(); ++i)
          resid = std::max(resid, std::abs(tab.value()[i] - target[i]));
        if (resid < 1e-8) break;
      }
      worst = std::max(worst, resid);
    }
  return {"fixed_point_oracle", worst < 1e-6, worst,
          "max residual vs closed form over 9 (lambda, K) cells: " +
              fmt("%.3g", worst)};
}

CheckResult check_well_posedness_gate() {
  // 20-pair grid straddling the lambda*K = 1 boundary.
  struct Pair { double lambda; int k; };
  std::vector<Pair> pairs;
  for (double lambda : {0.05, 0.2, 0.25, 0.5, 0.9})
    for (int k : {1, 2, 4, 20}) pairs.push_back({lambda, k});
  int wrong = 0;
  for (const auto& p : pairs) {
    bool should_pass = p.lambda > 0 && p.lambda < 1 && p.lambda * p.k < 1.0;
    bool passed = true;
    try {
      validate_config(VecorConfig{p.lambda, p.k, false});
    } catch (const ConfigError&) {
      passed = false;
    }
    if (passed != should_pass) ++wrong;
  }
  return {"well_posedness_gate", wrong == 0, double(wrong),
          "misclassified configs out of " + std::to_string(pairs.size()) +
              ": " + std::to_string(wrong)};
}

CheckResult check_reduction_identity() {
  RunConfig base;
  base.dataset = "gauss2";
  base.dataset_size = 512;
  base.hidden = {16, 16};
  base.steps = 50;
  base.batch_size = 32;
  base.vecor.enabled = false;
  RunConfig zero = base;
  zero.vecor.enabled = true;
  zero.vecor.lambda = 0.0;
  zero.vecor.k = 1;
  zero.vecor.perturb.op = PerturbOp::ChannelShuffle;
  zero.vecor.perturb.space = Space::Velocity;

  TrainState a = fit(base, 7);
  TrainState b = fit(zero, 7);
  auto pa = a.model->params();
  auto pb = b.model->params();
  bool same = pa.size() == pb.size() &&
              std::equal(pa.begin(), pa.end(), pb.begin());
  double max_log_diff = 0.0;
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    max_log_diff = std::max(max_log_diff,
                            std::abs(a.log[i].total - b.log[i].total));
    max_log_diff = std::max(
        max_log_diff, std::abs(a.log[i].grad_norm - b.log[i].grad_norm));
    same = same && a.log[i].total == b.log[i].total &&
           a.log[i].grad_norm == b.log[i].grad_norm;
  }
  return {"reduction_identity", same, max_log_diff,
          "lambda=0 run vs baseline: params and loss/grad trajectories " +
              std::string(same ? "bit-identical" : "DIFFER")};
}

CheckResult check_gradient_fd(bool inject_fault) {
  SeededRng rng(99, "grad-fd");
  const Schedule sched = linear_schedule();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t C = 2;
    const int width = 4 + int(rng.int_range(0, 28));  // <= 32
    MlpVelocityField model(C, 1, 1, {width}, 2);
    model.init_params(rng);
    // randomize the final layer too so gradients are nondegenerate
    auto ps = model.params();
    for (std::size_t i = ps.size() - (std::size_t(width) * C + C); i < ps.size(); ++i)
      ps[i] = 0.3 * rng.normal();

    const Shape shape{2, C, 1, 1};
    BatchGrid x(shape, Space::Latent);
    BatchGrid eps(shape, Space::Noise);
    for (auto& v : x.data()) v = rng.normal();
    for (auto& v : eps.data()) v = rng.normal();
    std::vector<double> tvec{rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    BatchGrid xt = interpolate_per_sample(sched, x, eps, tvec);
    BatchGrid v_pos = target_velocity_per_sample(sched, x, eps, tvec);
    VecorConfig cfg{0.05, 1, false};
    PerturbSpec spec;  // velocity-space channel shuffle
    auto cands = build_negatives(x, eps, tvec, v_pos, spec, sched, rng);

    BatchGrid pred = model.forward_train(xt, tvec);
    auto analytic = model.backward(vecor_grad(pred, cands, cfg));
    if (inject_fault && !analytic.empty()) analytic[analytic.size() / 2] += 0.5;

    auto loss_at = [&]() {
      BatchGrid p = model.forward_train(xt, tvec);
      return vecor_loss(p, cands, cfg).total;
    };
    const double h = 1e-5;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      double saved = ps[i];
      ps[i] = saved + h;
      double lp = loss_at();
      ps[i] = saved - h;
      double lm = loss_at();
      ps[i] = saved;
      double fd = (lp - lm) / (2.0 * h);
      double rel = std::abs(analytic[i] - fd) /
                   std::max({std::abs(analytic[i]), std::abs(fd), 1e-3});
      worst = std::max(worst, rel);
    }
  }
  return {"gradient_fd", worst < 1e-4, worst,
          "max relative error vs central differences over 100 instances: " +
              fmt("%.3g", worst)};
}

CheckResult check_operator_invariants() {
  std::string detail;
  bool ok = true;

  // derangements: channel shuffle and cutmix pairings, exhaustive scan
  for (std::uint32_t n = 2; n <= 8 && ok; ++n) {
    SeededRng rng(n, "derange");
    for (int trial = 0; trial < 1000; ++trial) {
      auto pi = derangement(n, rng);
      for (std::size_t i = 0; i < n; ++i)
        if (pi[i] == i) { ok = false; detail = "derangement fixed point"; }
      Shape s{2, n, 3, 3};
      BatchGrid z(s, Space::Velocity);
      for (std::size_t i = 0; i < z.size(); ++i) z[i] = double(i);
      BatchGrid out = channel_shuffle(z, rng);
      for (std::size_t b = 0; b < s.b; ++b)
        for (std::size_t c = 0; c < s.c; ++c)
          if (out.at(b, c, 0, 0) == z.at(b, c, 0, 0)) {
            ok = false;
            detail = "channel shuffle kept a channel in place";
          }
      if (trial >= 100) continue;  // cutmix scan is heavier
      Shape sb{n, 2, 4, 4};
      BatchGrid zb(sb, Space::Velocity);
      for (std::size_t i = 0; i < zb.size(); ++i) zb[i] = double(i);
      (void)cutmix(zb, 1.0, rng);
    }
  }

  // blur: kernel normalization and constant fixation
  auto kern = gaussian_kernel(5, 1.0);
  double sum = 0.0;
  for (double k : kern) sum += k;
  if (std::abs(sum - 1.0) > 1e-15) { ok = false; detail = "blur kernel sum"; }
  {
    BatchGrid cst(Shape{1, 2, 9, 9}, Space::Latent, 3.25);
    BatchGrid out = gaussian_blur(cst, BlurParams{5, 1.0});
    for (double v : out.data())
      if (std::abs(v - 3.25) > 1e-12) { ok = false; detail = "blur constant"; }
  }

  // noise: the max-std sample is left unchanged (gamma = 0)
  {
    SeededRng rng(3, "noise");
    BatchGrid z(Shape{3, 1, 2, 2}, Space::Latent);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = double(i % 4) * (i < 4 ? 0.1 : 1.0);
    auto stds = per_sample_std(z);
    std::size_t argmax =
        std::size_t(std::max_element(stds.begin(), stds.end()) - stds.begin());
    BatchGrid out = gaussian_noise(z, NoiseParams{1.0}, rng);
    auto a = z.sample(argmax);
    auto b = out.sample(argmax);
    if (!std::equal(a.begin(), a.end(), b.begin())) {
      ok = false;
      detail = "gaussian noise touched the max-std sample";
    }
  }

  // jitter: unit factors are the identity in all six orders
  {
    SeededRng rng(4, "jit");
    BatchGrid z(Shape{2, 3, 4, 4}, Space::Latent);
    for (auto& v : z.data()) v = rng.normal();
    for (int order = 0; order < 6; ++order) {
      BatchGrid out = color_jitter_forced(z, 1.0, 1.0, 1.0, order, Space::Latent);
      for (std::size_t i = 0; i < z.size(); ++i)
        if (std::abs(out[i] - z[i]) > 1e-12) { ok = false; detail = "jitter identity"; }
    }
  }

  // crop/resize: constants stay constant
  {
    SeededRng rng(5, "crop");
    BatchGrid cst(Shape{2, 2, 8, 8}, Space::Latent, -1.5);
    BatchGrid out = crop_resize(cst, CropResizeParams{}, rng);
    for (double v : out.data())
      if (std::abs(v + 1.5) > 1e-12) { ok = false; detail = "crop constant"; }
  }

  if (ok) detail = "derangement, blur, noise, jitter, crop invariants hold";
  return {"operator_invariants", ok, ok ? 0.0 : 1.0, detail};
}

CheckResult check_score_oracle() {
  SeededRng rng(11, "score");
  const Schedule sched = linear_schedule();
  GaussianAnalyticField field;
  BatchGrid xt(Shape{8, 2, 1, 1}, Space::Latent);
  for (auto& v : xt.data()) v = rng.normal();
  double worst = 0.0;
  for (double t = 0.05; t <= 0.9501; t += 0.005) {
    BatchGrid v = field.eval(xt, t);
    BatchGrid s = score_from_velocity(sched, v, xt, t, 1e-3);
    const double denom = t * t + (1.0 - t) * (1.0 - t);
    for (std::size_t i = 0; i < s.size(); ++i)
      worst = std::max(worst, std::abs(s[i] - (-xt[i] / denom)));
  }
  return {"score_oracle", worst < 1e-10, worst,
          "max |score - analytic| over t in [0.05, 0.95]: " + fmt("%.3g", worst)};
}

CheckResult check_integrator_order() {
  // dx/dt = x from x0 = 1: exact solution e^t at t=1.
  struct LinearField final : VelocityField {
    BatchGrid eval(const BatchGrid& xt, double) const override {
      ++evals_;
      return xt.retag(Space::Velocity);
    }
  } field;
  BatchGrid x0(Shape{1, 1, 1, 1}, Space::Noise, 1.0);
  auto err = [&](SamplerKind kind, int nfe) {
    SamplerConfig cfg{kind, nfe, DiffusionTag::SigmaT, 1e-3};
    BatchGrid xT = (kind == SamplerKind::EulerODE) ? euler_ode(field, x0, cfg)
                                                   : heun2_ode(field, x0, cfg);
    return std::abs(xT[0] - std::exp(1.0));
  };
  double euler_ratio = err(SamplerKind::EulerODE, 50) / err(SamplerKind::EulerODE, 100);
  double heun_ratio = err(SamplerKind::Heun2ODE, 100) / err(SamplerKind::Heun2ODE, 200);

  // SDE with w = 0 must replay Euler on the SDE's own time grid
  SamplerConfig em_cfg{SamplerKind::EulerMaruyamaSDE, 20, DiffusionTag::Zero, 1e-3};
  SeededRng rng(1, "em");
  Schedule sched = linear_schedule();
  BatchGrid a = euler_maruyama_sde(field, x0, em_cfg, sched, rng);
  auto times = sde_time_grid(em_cfg.nfe, em_cfg.delta_clip);
  BatchGrid b = euler_ode_grid(field, x0, times);
  bool bit_equal = a.data()[0] == b.data()[0];

  bool ok = euler_ratio > 1.8 && euler_ratio < 2.2 && heun_ratio > 3.5 &&
            heun_ratio < 4.5 && bit_equal;
  return {"integrator_order", ok, heun_ratio,
          "euler halving ratio " + fmt("%.3f", euler_ratio) +
              ", heun2 ratio " + fmt("%.3f", heun_ratio) +
              (bit_equal ? ", SDE(w=0) == Euler" : ", SDE(w=0) DIFFERS")};
}

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  std::vector<CheckResult> results;
  results.push_back(check_fixed_point_oracle());
  results.push_back(check_well_posedness_gate());
  results.push_back(check_reduction_identity());
  results.push_back(check_gradient_fd(opts.inject_gradient_fault));
  results.push_back(check_operator_invariants());
  results.push_back(check_score_oracle());
  results.push_back(check_integrator_order());
  return results;
}

}  // namespace vecor
