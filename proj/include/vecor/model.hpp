#pragma once

#include <memory>
#include <span>
#include <vector>

#include "vecor/grid.hpp"
#include "vecor/rng.hpp"

namespace vecor {

// Parameterized velocity field v(x_t, t). eval() is what samplers call; the
// evaluation counter counts batch-level forward passes (one per NFE).
class VelocityField {
 public:
  virtual ~VelocityField() = default;
  virtual BatchGrid eval(const BatchGrid& xt, double t) const = 0;
  long eval_count() const { return evals_; }
  void reset_eval_count() { evals_ = 0; }

 protected:
  mutable long evals_ = 0;
};

// Trainer-facing surface: cached forward with per-sample times, exact
// reverse-mode parameter gradients of <output, upstream>.
class TrainableModel : public VelocityField {
 public:
  virtual std::span<double> params() = 0;
  virtual std::span<const double> params() const = 0;
  virtual void init_params(SeededRng& rng) = 0;
  virtual BatchGrid forward_train(const BatchGrid& xt,
                                  std::span<const double> t) = 0;
  // Uses the cache from the last forward_train; throws if none is available.
  virtual std::vector<double> backward(const BatchGrid& upstream) = 0;
};

// Feed-forward velocity field on flattened samples with sinusoidal time
// features: [sin(2*pi*2^m t), cos(2*pi*2^m t)], m = 0..F-1. Hidden layers use
// tanh; the output layer is linear and zero-initialized so the initial field
// is identically zero.
class MlpVelocityField final : public TrainableModel {
 public:
  MlpVelocityField(std::uint32_t c, std::uint32_t h, std::uint32_t w,
                   std::vector<int> hidden = {256, 256, 256},
                   int fourier_bands = 8);

  std::size_t param_count() const { return params_.size(); }
  std::span<double> params() override { return params_; }
  std::span<const double> params() const override { return params_; }
  const std::vector<int>& widths() const { return widths_; }

  // Hidden weights: U(-1/sqrt(fan_in), 1/sqrt(fan_in)); final layer zeros.
  void init_params(SeededRng& rng) override;

  BatchGrid eval(const BatchGrid& xt, double t) const override;
  BatchGrid forward_train(const BatchGrid& xt,
                          std::span<const double> t) override;
  std::vector<double> backward(const BatchGrid& upstream) override;

 private:
  struct Cache;
  BatchGrid forward_impl(const BatchGrid& xt, std::span<const double> t,
                         Cache* cache) const;
  void time_features(double t, std::span<double> out) const;

  std::uint32_t c_, h_, w_;
  std::size_t state_dim_;
  int fourier_bands_;
  std::vector<int> widths_;  // layer widths incl. input and output
  std::vector<std::size_t> w_offset_, b_offset_;
  std::vector<double> params_;
  std::shared_ptr<Cache> cache_;
};

// One free velocity grid; prediction ignores the state, so any loss gradient
// w.r.t. the prediction is the parameter gradient. Oracle model for the
// closed-form fixed-point checks.
class TabularVelocityField final : public TrainableModel {
 public:
  TabularVelocityField(Shape shape);

  std::span<double> params() override { return value_.data(); }
  std::span<const double> params() const override { return value_.data(); }
  void init_params(SeededRng& rng) override;
  BatchGrid eval(const BatchGrid& xt, double t) const override;
  BatchGrid forward_train(const BatchGrid& xt,
                          std::span<const double> t) override;
  std::vector<double> backward(const BatchGrid& upstream) override;
  const BatchGrid& value() const { return value_; }

 private:
  BatchGrid value_;
  bool forwarded_ = false;
};

}  // namespace vecor
