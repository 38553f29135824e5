#include "vecor/optimizer.hpp"

#include <cmath>

#include "vecor/error.hpp"

namespace vecor {

const char* opt_kind_name(OptKind k) {
  return k == OptKind::SGD ? "sgd" : "adam";
}

OptKind opt_kind_from_name(const std::string& name) {
  if (name == "sgd") return OptKind::SGD;
  if (name == "adam") return OptKind::Adam;
  throw ConfigError("unknown optimizer: " + name);
}

void OptimState::update(std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size())
    throw ConfigError("optimizer: gradient length mismatch");
  ++step;
  if (kind == OptKind::SGD) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
    return;
  }
  if (m.size() != params.size()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
  }
  const double bc1 = 1.0 - std::pow(beta1, double(step));
  const double bc2 = 1.0 - std::pow(beta2, double(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    double mhat = m[i] / bc1;
    double vhat = v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace vecor
