#include "vecor/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "vecor/error.hpp"

namespace vecor {

double MetricReport::mean_gap_norm() const {
  double acc = 0.0;
  for (double g : mean_gap) acc += g * g;
  return std::sqrt(acc);
}

namespace {

void require_compatible(const BatchGrid& gen, const BatchGrid& ref,
                        const char* what) {
  if (gen.shape().b == 0 || ref.shape().b == 0)
    throw ConfigError(std::string(what) + ": empty sample set");
  if (gen.shape().sample_size() != ref.shape().sample_size())
    throw ConfigError(std::string(what) + ": feature dimension mismatch " +
                      std::to_string(gen.shape().sample_size()) + " vs " +
                      std::to_string(ref.shape().sample_size()));
}

}  // namespace

double w2sq_1d_sorted(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size(), m = b.size();
  std::size_t i = 0, j = 0;
  double q = 0.0, acc = 0.0;
  while (i < n && j < m) {
    double qa = double(i + 1) / double(n);
    double qb = double(j + 1) / double(m);
    double qn = std::min(qa, qb);
    double d = a[i] - b[j];
    acc += (qn - q) * d * d;
    q = qn;
    if (qa == qn) ++i;
    if (qb == qn) ++j;
  }
  return acc;
}

double sliced_w2(const BatchGrid& gen, const BatchGrid& ref, int n_projections,
                 SeededRng& rng) {
  require_compatible(gen, ref, "sliced_w2");
  if (n_projections < 1) throw ConfigError("sliced_w2: need >= 1 projection");
  const std::size_t d = gen.shape().sample_size();
  const std::size_t ng = gen.shape().b, nr = ref.shape().b;
  std::vector<double> dir(d), pg(ng), pr(nr);
  double acc = 0.0;
  for (int p = 0; p < n_projections; ++p) {
    double norm = 0.0;
    do {
      for (auto& u : dir) u = rng.normal();
      norm = 0.0;
      for (double u : dir) norm += u * u;
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& u : dir) u /= norm;
    for (std::size_t s = 0; s < ng; ++s) {
      auto row = gen.sample(s);
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += dir[k] * row[k];
      pg[s] = v;
    }
    for (std::size_t s = 0; s < nr; ++s) {
      auto row = ref.sample(s);
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += dir[k] * row[k];
      pr[s] = v;
    }
    std::sort(pg.begin(), pg.end());
    std::sort(pr.begin(), pr.end());
    acc += w2sq_1d_sorted(pg, pr);
  }
  return acc / double(n_projections);
}

namespace {

double mean_pairwise_norm(const BatchGrid& a, const BatchGrid& b) {
  const std::size_t na = a.shape().b, nb = b.shape().b;
  const std::size_t d = a.shape().sample_size();
  double acc = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    auto ra = a.sample(i);
    for (std::size_t j = 0; j < nb; ++j) {
      auto rb = b.sample(j);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double diff = ra[k] - rb[k];
        s += diff * diff;
      }
      acc += std::sqrt(s);
    }
  }
  return acc / (double(na) * double(nb));
}

}  // namespace

double energy_distance(const BatchGrid& gen, const BatchGrid& ref) {
  require_compatible(gen, ref, "energy_distance");
  return 2.0 * mean_pairwise_norm(gen, ref) - mean_pairwise_norm(gen, gen) -
         mean_pairwise_norm(ref, ref);
}

MetricReport metric_report(const BatchGrid& gen, const BatchGrid& ref,
                           int n_projections, SeededRng& rng) {
  require_compatible(gen, ref, "metric_report");
  MetricReport r;
  r.sliced_w2 = sliced_w2(gen, ref, n_projections, rng);
  r.energy_distance = energy_distance(gen, ref);
  const std::size_t d = gen.shape().sample_size();
  r.mean_gap.assign(d, 0.0);
  for (std::size_t s = 0; s < gen.shape().b; ++s) {
    auto row = gen.sample(s);
    for (std::size_t k = 0; k < d; ++k) r.mean_gap[k] += row[k];
  }
  for (auto& g : r.mean_gap) g /= double(gen.shape().b);
  std::vector<double> ref_mean(d, 0.0);
  for (std::size_t s = 0; s < ref.shape().b; ++s) {
    auto row = ref.sample(s);
    for (std::size_t k = 0; k < d; ++k) ref_mean[k] += row[k];
  }
  for (std::size_t k = 0; k < d; ++k)
    r.mean_gap[k] -= ref_mean[k] / double(ref.shape().b);
  r.n_gen = gen.shape().b;
  r.n_ref = ref.shape().b;
  r.n_projections = n_projections;
  return r;
}

}  // namespace vecor
