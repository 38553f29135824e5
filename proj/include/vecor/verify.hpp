#pragma once

#include <string>
#include <vector>

#include "vecor/grid.hpp"
#include "vecor/model.hpp"

namespace vecor {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;  // residual / worst-case quantity for the report
  std::string detail;
};

struct VerifyOptions {
  // Test hook: corrupt the analytic gradient so the finite-difference check
  // must trip.
  bool inject_gradient_fault = false;
};

// Velocity field of the standard-normal-data linear-schedule marginal:
// v(x, t) = (2t - 1) x / (t^2 + (1-t)^2). Closed-form oracle for the score
// conversion and sampler moment checks.
class GaussianAnalyticField final : public VelocityField {
 public:
  BatchGrid eval(const BatchGrid& xt, double t) const override;
  static double coeff(double t) {
    return (2.0 * t - 1.0) / (t * t + (1.0 - t) * (1.0 - t));
  }
};

CheckResult check_fixed_point_oracle();
CheckResult check_well_posedness_gate();
CheckResult check_reduction_identity();
CheckResult check_gradient_fd(bool inject_fault = false);
CheckResult check_operator_invariants();
CheckResult check_score_oracle();
CheckResult check_integrator_order();

std::vector<CheckResult> run_verification(const VerifyOptions& opts = {});

}  // namespace vecor
