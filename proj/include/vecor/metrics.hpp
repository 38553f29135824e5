#pragma once

#include <vector>

#include "vecor/grid.hpp"
#include "vecor/rng.hpp"

namespace vecor {

struct MetricReport {
  double sliced_w2 = 0.0;
  double energy_distance = 0.0;
  std::vector<double> mean_gap;  // per-dimension mean(gen) - mean(ref)
  std::size_t n_gen = 0, n_ref = 0;
  int n_projections = 0;
  double mean_gap_norm() const;
};

// Average over random unit directions of the exact squared 1-D W2 distance
// between the projected empirical distributions. Samples are flattened to
// C*H*W-dim vectors. Deterministic given the rng state.
double sliced_w2(const BatchGrid& gen, const BatchGrid& ref, int n_projections,
                 SeededRng& rng);

// Exact 1-D squared W2 between two sorted empirical distributions (possibly
// of different sizes), by piecewise-constant quantile integration.
double w2sq_1d_sorted(std::span<const double> a, std::span<const double> b);

// 2 E||X-Y|| - E||X-X'|| - E||Y-Y'|| over all ordered pairs (V-statistic).
double energy_distance(const BatchGrid& gen, const BatchGrid& ref);

MetricReport metric_report(const BatchGrid& gen, const BatchGrid& ref,
                           int n_projections, SeededRng& rng);

}  // namespace vecor
