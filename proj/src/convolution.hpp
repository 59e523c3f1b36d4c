#pragma once

// Internal: dense zero-extension convolution with translation-invariant offset tables.

#include <cstdlib>
#include <vector>

#include "mlab/lattice.hpp"

namespace mlab::detail {

/// Weights indexed by |offset| per axis, for offsets 0..reach.
struct OffsetTable {
  int dim = 1;
  int reach = 0;
  std::vector<double> v;  // dim 1: reach+1 entries; dim 2: (reach+1)^2, row-major in (|di|, |dj|)

  OffsetTable(int dim_, int reach_) : dim(dim_), reach(reach_), v(dim_ == 1 ? reach_ + 1 : (reach_ + 1) * (reach_ + 1), 0.0) {}
  double& at(int di, int dj = 0) { return dim == 1 ? v[std::abs(di)] : v[std::abs(di) * (reach + 1) + std::abs(dj)]; }
  double at(int di, int dj = 0) const {
    return dim == 1 ? v[std::abs(di)] : v[std::abs(di) * (reach + 1) + std::abs(dj)];
  }
};

GridFunction convolve(const OffsetTable& k, const GridFunction& f);
/// Separable 2D convolution with the same 1D table along both axes (dim 1 falls back to convolve).
GridFunction convolve_separable(const std::vector<double>& k1, const GridFunction& f);

/// Upper bound on the number of cells per axis for dense 2D operators.
inline constexpr int kDense2DLimit = 256;
void require_dense_size(const Grid& g);

}  // namespace mlab::detail
