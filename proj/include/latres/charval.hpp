// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "latres/birman_schwinger.hpp"
#include "latres/perturbation.hpp"
#include "latres/resolvent.hpp"
#include "latres/types.hpp"

namespace latres {

using MatrixFunction = std::function<CMatrix(Complex)>;

/// Positively oriented circle used for index quadrature.
struct Contour {
  Complex center;
  double radius = 0.0;
  int nodes = defaults::kContourNodes;

  Contour(Complex c, double r, int n = defaults::kContourNodes)
      : center(c), radius(r), nodes(n) {
    if (r <= 0.0) throw ValidationError("Contour: radius must be > 0");
    if (n < 16) throw ValidationError("Contour: nodes must be >= 16");
  }
};

struct IndexResult {
  Complex raw;
  long count = 0;
  double residual = 0.0;
  bool accepted = false;  // residual <= 1e-6
};

/// Trace form of the logarithmic-derivative index, trapezoidal quadrature of
/// (1/2 pi i) Tr(F' F^{-1}) over the circle.
IndexResult index_trace(const MatrixFunction& F, const MatrixFunction& Fprime,
                        const Contour& c);

/// Winding number of det F around 0, accumulated continuous argument along
/// the nodes; integer by construction. Throws ResolutionError on argument
/// jumps above pi/2 (caller doubles the node count).
IndexResult index_winding(const MatrixFunction& F, const Contour& c);

struct CharValue {
  Complex lambda;
  long multiplicity = 0;
  bool cluster = false;
};

/// Punctured annular search region around a center (cells never contain the
/// puncture, where the scanned functions may be singular).
struct AnnulusRegion {
  Complex center{0.0, 0.0};
  double r_min = 0.0;
  double r_max = 0.0;
};

struct LocateOptions {
  int nodes = defaults::kContourNodes;      // per cell boundary
  int max_nodes = defaults::kMaxContourNodes;
  double min_sep = defaults::kMinSeparation;
  double residual_tol = defaults::kIndexResidual;
  int threads = 0;  // 0 -> engine_threads()
};

struct LocateResult {
  std::vector<CharValue> values;
  std::vector<long> top_cell_indices;  // indices of the initial cells
  long total_index = 0;
};

/// Recursive quadrisection of the annulus into sectors: zero-index cells are
/// discarded, cells at min_sep diameter are reported with the center refined
/// by the first-moment integral. Trace and winding forms are computed on the
/// same nodes and must agree on every cell.
LocateResult locate_characteristic_values(const MatrixFunction& F,
                                          const MatrixFunction& Fprime,
                                          const AnnulusRegion& region,
                                          const LocateOptions& opts = {});

struct ResonanceRecord {
  Complex lambda;
  Complex energy;
  Threshold threshold = Threshold::Zero;
  long multiplicity = 0;
  Sheet sheet = Sheet::Physical;
};

struct ScanOptions {
  int window = defaults::kWindow;
  int nodes = defaults::kContourNodes;
  double min_sep = defaults::kMinSeparation;
  double continuation_radius = defaults::kContinuationRadius;
  int threads = 0;
};

struct ScanResult {
  std::vector<ResonanceRecord> records;
  std::vector<long> top_cell_indices;
  long total_index = 0;
};

namespace detail {
/// F and F' for the scan, either on the full window or reduced to the kernel
/// support block (same determinant and logarithmic derivative); the full
/// route is kept for closed-form kernels and as a cross-check.
std::pair<MatrixFunction, MatrixFunction> scan_functions(
    const PerturbationSpec& spec, Threshold threshold, int window,
    bool force_full);
}  // namespace detail

/// Characteristic values of I + T on the annulus r_min <= |lambda| <= r_max,
/// mapped to energies at the requested band edge. Annulus must stay inside
/// the configured continuation radius (raise it explicitly to run the
/// enlarged-annulus validation mode, up to the formula reach |lambda| < 2).
ScanResult resonance_scan(const PerturbationSpec& spec, Threshold threshold,
                          double r_min, double r_max,
                          const ScanOptions& opts = {});

}  // namespace latres
