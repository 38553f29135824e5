#pragma once

#include "vecor/grid.hpp"
#include "vecor/perturb.hpp"

namespace vecor {

struct VecorConfig {
  double lambda = 0.05;
  int k = 1;
  // validate_config rejects lambda = 0 (open interval); tests flip this flag
  // to assert the exact reduction to the plain flow-matching loss.
  bool allow_lambda_zero = false;
};

// Accepts iff 0 < lambda < 1 and lambda*K < 1; diagnostic names the violated
// inequality.
void validate_config(const VecorConfig& cfg);

struct LossReport {
  double total = 0.0;
  double positive_term = 0.0;
  double negative_term = 0.0;  // pre-weighting sum of negative distances
};

// (1/B) sum_i ||pred_i - target_i||^2.
LossReport fm_loss(const BatchGrid& v_pred, const BatchGrid& v_target);

// (1/B) sum_i [ ||pred_i - pos_i||^2 - lambda * sum_j ||pred_i - neg_ij||^2 ].
LossReport vecor_loss(const BatchGrid& v_pred, const NegativeCandidateSet& cands,
                      const VecorConfig& cfg);

// d total / d pred = (2/B) [ (1 - lambda*K) pred - (pos - lambda * sum_j neg_j) ].
BatchGrid vecor_grad(const BatchGrid& v_pred, const NegativeCandidateSet& cands,
                     const VecorConfig& cfg);

// Per-sample minimizer v* = (pos - lambda * sum_j neg_j) / (1 - lambda*K).
BatchGrid closed_form_optimum(const NegativeCandidateSet& cands,
                              const VecorConfig& cfg);

}  // namespace vecor
