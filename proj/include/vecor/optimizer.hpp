#pragma once

#include <span>
#include <string>
#include <vector>

namespace vecor {

enum class OptKind { SGD, Adam };

const char* opt_kind_name(OptKind k);
OptKind opt_kind_from_name(const std::string& name);

struct OptimState {
  OptKind kind = OptKind::Adam;
  double lr = 3e-4;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<double> m, v;  // Adam moments, lazily sized
  long step = 0;

  void update(std::span<double> params, std::span<const double> grad);
};

}  // namespace vecor
