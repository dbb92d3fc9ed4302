// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "latres/perturbation.hpp"
#include "latres/types.hpp"
#include "latres/window.hpp"

namespace latres {

/// All eigenvalues of a dense complex matrix (LAPACK zgeev). The certified
/// variant recomputes residuals ||Av - lambda v|| / ||A|| on ten sampled
/// eigenpairs and throws if any exceeds 1e-10.
std::vector<Complex> eigenvalues(const CMatrix& a);
std::vector<Complex> eigenvalues_only(const CMatrix& a);

/// Distance from z to the essential band [0,4].
double band_distance(Complex z);

struct StablePoint {
  Complex value;
  double drift = 0.0;  // movement between the two largest windows
};

struct SpectrumReport {
  struct WindowEigs {
    int window = 0;
    std::vector<Complex> values;
  };
  std::vector<WindowEigs> windows;
  std::vector<StablePoint> stable_discrete;
  double band_threshold = defaults::kBandDistance;
  double drift_tolerance = 1e-6;
};

/// Eigenvalues of the truncated perturbed Hamiltonian per window; a point is
/// a stable discrete eigenvalue when it sits off the band and drifts below
/// tolerance between the two largest windows.
SpectrumReport discrete_spectrum(const PerturbationSpec& spec,
                                 const std::vector<int>& windows,
                                 double band_threshold = defaults::kBandDistance,
                                 double drift_tolerance = 1e-6);

struct RieszData {
  Complex point;
  CMatrix projection;
  int rank = 0;
  Complex trace;
  double idempotency_defect = 0.0;
};

/// Spectral projector onto the part of the spectrum inside the circle, by
/// trapezoidal contour quadrature of the resolvent. The circle must separate
/// the spectrum (no eigenvalue within 10% of the radius band). Orientation is
/// fixed so that the trace equals the enclosed algebraic multiplicity.
RieszData riesz_projection(const CMatrix& a, Complex point, double radius,
                           int nodes = defaults::kRieszNodes);

struct LapSample {
  double energy = 0.0;
  double eps = 0.0;
  int sign = +1;
  double value = 0.0;
  bool clean = true;  // window-converged (not a finite-size artifact)
};

struct LapTable {
  std::vector<LapSample> samples;
  std::vector<double> epsilons;
  std::vector<double> max_upper, max_lower;  // per epsilon, clean samples
  bool bounded = false;
  std::vector<double> candidate_energies;  // local blow-up locations
};

/// Weighted resolvent matrix elements |<delta_a, (z - H)^{-1} delta_b>| on a
/// grid approaching the band from both sides. Boundedness verdict: the max
/// over clean samples grows by < 5% per halving of eps at the smallest
/// scales. Samples that fail a two-window consistency check are flagged as
/// finite-size artifacts and excluded from the verdict.
LapTable lap_check(const PerturbationSpec& spec, double e_lo, double e_hi,
                   int phi_site, int psi_site,
                   const std::vector<double>& epsilons, int window,
                   int energy_samples = 11);

}  // namespace latres
