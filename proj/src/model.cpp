#include "vecor/model.hpp"

#include <cmath>
#include <numbers>

#include "vecor/error.hpp"

namespace vecor {

struct MlpVelocityField::Cache {
  // acts[l][s] holds layer-l activations of sample s (acts[0] is the input).
  std::vector<std::vector<std::vector<double>>> acts;
  Shape xt_shape;
  bool valid = false;
};

MlpVelocityField::MlpVelocityField(std::uint32_t c, std::uint32_t h,
                                   std::uint32_t w, std::vector<int> hidden,
                                   int fourier_bands)
    : c_(c), h_(h), w_(w),
      state_dim_(std::size_t(c) * h * w),
      fourier_bands_(fourier_bands),
      cache_(std::make_shared<Cache>()) {
  if (state_dim_ == 0) throw ConfigError("mlp: empty state");
  if (fourier_bands_ < 0) throw ConfigError("mlp: negative fourier band count");
  widths_.push_back(int(state_dim_) + 2 * fourier_bands_);
  for (int hdim : hidden) {
    if (hdim < 1) throw ConfigError("mlp: layer width must be >= 1");
    widths_.push_back(hdim);
  }
  widths_.push_back(int(state_dim_));
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    w_offset_.push_back(offset);
    offset += std::size_t(widths_[l]) * widths_[l + 1];
    b_offset_.push_back(offset);
    offset += std::size_t(widths_[l + 1]);
  }
  params_.assign(offset, 0.0);
}

void MlpVelocityField::init_params(SeededRng& rng) {
  const std::size_t layers = w_offset_.size();
  for (std::size_t l = 0; l + 1 < layers; ++l) {
    double s = 1.0 / std::sqrt(double(widths_[l]));
    for (std::size_t i = 0; i < std::size_t(widths_[l]) * widths_[l + 1]; ++i)
      params_[w_offset_[l] + i] = rng.uniform(-s, s);
    for (std::size_t i = 0; i < std::size_t(widths_[l + 1]); ++i)
      params_[b_offset_[l] + i] = 0.0;
  }
  // final layer stays zero: initial field is the zero field
  std::size_t last = layers - 1;
  for (std::size_t i = w_offset_[last]; i < params_.size(); ++i) params_[i] = 0.0;
  cache_->valid = false;
}

void MlpVelocityField::time_features(double t, std::span<double> out) const {
  for (int m = 0; m < fourier_bands_; ++m) {
    double arg = 2.0 * std::numbers::pi * std::ldexp(1.0, m) * t;
    out[2 * std::size_t(m)] = std::sin(arg);
    out[2 * std::size_t(m) + 1] = std::cos(arg);
  }
}

BatchGrid MlpVelocityField::forward_impl(const BatchGrid& xt,
                                         std::span<const double> t,
                                         Cache* cache) const {
  if (xt.shape().sample_size() != state_dim_)
    throw ConfigError("mlp: input sample width " +
                      std::to_string(xt.shape().sample_size()) +
                      " does not match model state width " +
                      std::to_string(state_dim_));
  if (t.size() != xt.shape().b)
    throw ConfigError("mlp: need one t per sample");
  ++evals_;
  const std::size_t B = xt.shape().b;
  const std::size_t L = w_offset_.size();
  BatchGrid out(xt.shape(), Space::Velocity);
  if (cache) {
    cache->acts.assign(L + 1, std::vector<std::vector<double>>(B));
    cache->xt_shape = xt.shape();
  }
  std::vector<double> cur, next;
  for (std::size_t s = 0; s < B; ++s) {
    cur.assign(std::size_t(widths_[0]), 0.0);
    auto in = xt.sample(s);
    std::copy(in.begin(), in.end(), cur.begin());
    time_features(t[s], std::span<double>(cur).subspan(state_dim_));
    if (cache) cache->acts[0][s] = cur;
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t nin = std::size_t(widths_[l]);
      const std::size_t nout = std::size_t(widths_[l + 1]);
      next.assign(nout, 0.0);
      const double* W = params_.data() + w_offset_[l];
      const double* bias = params_.data() + b_offset_[l];
      for (std::size_t o = 0; o < nout; ++o) {
        const double* row = W + o * nin;
        double acc = bias[o];
        for (std::size_t i = 0; i < nin; ++i) acc += row[i] * cur[i];
        next[o] = (l + 1 < L) ? std::tanh(acc) : acc;
      }
      cur.swap(next);
      if (cache) cache->acts[l + 1][s] = cur;
    }
    auto o = out.sample(s);
    std::copy(cur.begin(), cur.end(), o.begin());
  }
  if (cache) cache->valid = true;
  return out;
}

BatchGrid MlpVelocityField::eval(const BatchGrid& xt, double t) const {
  std::vector<double> ts(xt.shape().b, t);
  return forward_impl(xt, ts, nullptr);
}

BatchGrid MlpVelocityField::forward_train(const BatchGrid& xt,
                                          std::span<const double> t) {
  return forward_impl(xt, t, cache_.get());
}

std::vector<double> MlpVelocityField::backward(const BatchGrid& upstream) {
  if (!cache_->valid)
    throw ConfigError("mlp backward: no forward cache (stale or missing)");
  if (!(upstream.shape() == cache_->xt_shape))
    throw ConfigError("mlp backward: upstream shape mismatch");
  const std::size_t B = upstream.shape().b;
  const std::size_t L = w_offset_.size();
  std::vector<double> grad(params_.size(), 0.0);
  std::vector<double> delta, prev_delta;
  for (std::size_t s = 0; s < B; ++s) {
    auto up = upstream.sample(s);
    delta.assign(up.begin(), up.end());
    for (std::size_t l = L; l-- > 0;) {
      const std::size_t nin = std::size_t(widths_[l]);
      const std::size_t nout = std::size_t(widths_[l + 1]);
      const auto& in_act = cache_->acts[l][s];
      double* gW = grad.data() + w_offset_[l];
      double* gb = grad.data() + b_offset_[l];
      for (std::size_t o = 0; o < nout; ++o) {
        double* row = gW + o * nin;
        const double d = delta[o];
        for (std::size_t i = 0; i < nin; ++i) row[i] += d * in_act[i];
        gb[o] += d;
      }
      if (l == 0) break;
      const double* W = params_.data() + w_offset_[l];
      prev_delta.assign(nin, 0.0);
      for (std::size_t o = 0; o < nout; ++o) {
        const double* row = W + o * nin;
        const double d = delta[o];
        for (std::size_t i = 0; i < nin; ++i) prev_delta[i] += row[i] * d;
      }
      // input to layer l is the tanh output of layer l-1
      for (std::size_t i = 0; i < nin; ++i) {
        double a = in_act[i];
        prev_delta[i] *= (1.0 - a * a);
      }
      delta.swap(prev_delta);
    }
  }
  return grad;
}

TabularVelocityField::TabularVelocityField(Shape shape)
    : value_(shape, Space::Velocity) {}

void TabularVelocityField::init_params(SeededRng& rng) {
  for (auto& v : value_.data()) v = rng.normal();
}

BatchGrid TabularVelocityField::eval(const BatchGrid& xt, double) const {
  if (!(xt.shape() == value_.shape()))
    throw ConfigError("tabular: state shape " + xt.shape().str() +
                      " does not match value shape " + value_.shape().str());
  ++evals_;
  return value_;
}

BatchGrid TabularVelocityField::forward_train(const BatchGrid& xt,
                                              std::span<const double>) {
  forwarded_ = true;
  ++evals_;
  if (!(xt.shape() == value_.shape()))
    throw ConfigError("tabular: state shape mismatch");
  return value_;
}

std::vector<double> TabularVelocityField::backward(const BatchGrid& upstream) {
  if (!forwarded_)
    throw ConfigError("tabular backward: no forward cache (stale or missing)");
  if (!(upstream.shape() == value_.shape()))
    throw ConfigError("tabular backward: upstream shape mismatch");
  auto up = upstream.data();
  return std::vector<double>(up.begin(), up.end());
}

}  // namespace vecor
