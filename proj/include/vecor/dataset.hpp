#pragma once

#include <string>

#include "vecor/grid.hpp"
#include "vecor/rng.hpp"

namespace vecor {

enum class DatasetKind { Gauss2, Rings, Checker, Grid8 };

const char* dataset_name(DatasetKind k);
DatasetKind dataset_from_name(const std::string& name);

// gauss2/rings/checker emit n x 2 x 1 x 1 point grids; grid8 emits
// n x 3 x 8 x 8 texture grids with values in [0, 1].
BatchGrid sample_dataset(DatasetKind kind, std::size_t n, SeededRng& rng);

// State dimensions of one sample of the dataset.
Shape dataset_sample_shape(DatasetKind kind);

}  // namespace vecor
