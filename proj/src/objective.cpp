#include "vecor/objective.hpp"

#include <cmath>

#include "vecor/error.hpp"

namespace vecor {

void validate_config(const VecorConfig& cfg) {
  bool lambda_ok = cfg.allow_lambda_zero ? (cfg.lambda >= 0.0 && cfg.lambda < 1.0)
                                         : (cfg.lambda > 0.0 && cfg.lambda < 1.0);
  if (!lambda_ok)
    throw ConfigError("vecor config: violated 0 < \xce\xbb < 1 (lambda=" +
                      std::to_string(cfg.lambda) + ")");
  if (cfg.k < 1)
    throw ConfigError("vecor config: K must be >= 1");
  if (!(cfg.lambda * cfg.k < 1.0))
    throw ConfigError("vecor config: violated \xce\xbbK < 1 (lambda*K=" +
                      std::to_string(cfg.lambda * cfg.k) +
                      "), loss would be ill-conditioned");
}

namespace {

void require_same_shape(const BatchGrid& a, const BatchGrid& b, const char* what) {
  if (!(a.shape() == b.shape()))
    throw ConfigError(std::string(what) + ": shape mismatch " + a.shape().str() +
                      " vs " + b.shape().str());
}

void require_k(const NegativeCandidateSet& cands, const VecorConfig& cfg,
               const char* what) {
  if (cands.negatives.size() != std::size_t(cfg.k))
    throw ConfigError(std::string(what) + ": candidate set has " +
                      std::to_string(cands.negatives.size()) +
                      " negatives but config K=" + std::to_string(cfg.k));
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

LossReport fm_loss(const BatchGrid& v_pred, const BatchGrid& v_target) {
  require_same_shape(v_pred, v_target, "fm_loss");
  const std::size_t B = v_pred.shape().b;
  double acc = 0.0;
  for (std::size_t b = 0; b < B; ++b)
    acc += sq_dist(v_pred.sample(b), v_target.sample(b));
  LossReport r;
  r.positive_term = acc / double(B);
  r.total = r.positive_term;
  return r;
}

LossReport vecor_loss(const BatchGrid& v_pred, const NegativeCandidateSet& cands,
                      const VecorConfig& cfg) {
  validate_config(cfg);
  require_k(cands, cfg, "vecor_loss");
  require_same_shape(v_pred, cands.positive, "vecor_loss");
  for (const auto& neg : cands.negatives)
    require_same_shape(v_pred, neg, "vecor_loss");
  const std::size_t B = v_pred.shape().b;
  double pos = 0.0, neg = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    pos += sq_dist(v_pred.sample(b), cands.positive.sample(b));
    for (const auto& n : cands.negatives)
      neg += sq_dist(v_pred.sample(b), n.sample(b));
  }
  LossReport r;
  r.positive_term = pos / double(B);
  r.negative_term = neg / double(B);
  r.total = r.positive_term - cfg.lambda * r.negative_term;
  if (!std::isfinite(r.total)) throw NumericError("vecor_loss: non-finite total");
  return r;
}

BatchGrid vecor_grad(const BatchGrid& v_pred, const NegativeCandidateSet& cands,
                     const VecorConfig& cfg) {
  validate_config(cfg);
  require_k(cands, cfg, "vecor_grad");
  require_same_shape(v_pred, cands.positive, "vecor_grad");
  const std::size_t B = v_pred.shape().b;
  const double coeff = 1.0 - cfg.lambda * cfg.k;
  const double scale = 2.0 / double(B);
  BatchGrid grad(v_pred.shape(), Space::Velocity);
  auto pp = v_pred.data();
  auto pos = cands.positive.data();
  auto pg = grad.data();
  for (std::size_t i = 0; i < pg.size(); ++i) {
    double sum_neg = 0.0;
    for (const auto& n : cands.negatives) sum_neg += n.data()[i];
    pg[i] = scale * (coeff * pp[i] - (pos[i] - cfg.lambda * sum_neg));
  }
  return grad;
}

BatchGrid closed_form_optimum(const NegativeCandidateSet& cands,
                              const VecorConfig& cfg) {
  validate_config(cfg);
  require_k(cands, cfg, "closed_form_optimum");
  const double coeff = 1.0 - cfg.lambda * cfg.k;
  BatchGrid out(cands.positive.shape(), Space::Velocity);
  auto pos = cands.positive.data();
  auto po = out.data();
  for (std::size_t i = 0; i < po.size(); ++i) {
    double sum_neg = 0.0;
    for (const auto& n : cands.negatives) sum_neg += n.data()[i];
    po[i] = (pos[i] - cfg.lambda * sum_neg) / coeff;
  }
  out.check_finite("closed_form_optimum");
  return out;
}

}  // namespace vecor
