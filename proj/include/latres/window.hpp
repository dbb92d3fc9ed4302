// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "latres/types.hpp"

namespace latres {

/// Finite section of the lattice: sites n in {-N,...,N}, each carrying a
/// fiber of dimension d. Total dimension (2N+1)*d.
class LatticeWindow {
 public:
  LatticeWindow(int half_width, int fiber_dim = 1)
      : half_width_(half_width), fiber_dim_(fiber_dim) {
    if (half_width < 0) throw ValidationError("window half_width must be >= 0");
    if (fiber_dim < 1) throw ValidationError("fiber_dim must be >= 1");
  }

  int half_width() const { return half_width_; }
  int fiber_dim() const { return fiber_dim_; }
  int site_count() const { return 2 * half_width_ + 1; }
  int dim() const { return site_count() * fiber_dim_; }

  // Row index of (site n, fiber component j); lattice-major ordering.
  int index(int n, int j = 0) const {
    return (n + half_width_) * fiber_dim_ + j;
  }
  int site_of(int idx) const { return idx / fiber_dim_ - half_width_; }
  int component_of(int idx) const { return idx % fiber_dim_; }

  bool contains(int n) const { return n >= -half_width_ && n <= half_width_; }

 private:
  int half_width_;
  int fiber_dim_;
};

}  // namespace latres
