// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "latres/perturbation.hpp"
#include "latres/types.hpp"

namespace latres {

/// Mobius deformation of the symbol variable:
///   (lambda - tanh(2 theta)) / (1 - lambda tanh(2 theta)).
/// Requires |theta| < pi/8 so the denominator stays away from zero on [-1,1].
Complex mobius(Complex theta, Complex lambda);

/// Conjugated energy map with T(z) = 2(1-z): T o mobius o T^{-1}.
/// Fixed points 0 and 4.
Complex energy_map(Complex theta, Complex z);

/// Deformed essential-spectrum curve: energy_map over the band, sampled at
/// `samples` uniform symbol parameters. Endpoints exactly 0 and 4.
std::vector<Complex> spectral_arc(Complex theta, int samples);

struct ArcFitReport {
  bool degenerate = false;  // collinear samples (real deformation)
  Complex center;
  double radius = 0.0;
  double max_deviation = 0.0;
  bool pass = false;  // max_deviation <= 1e-10 (and not degenerate)
};

/// Fits the circle through {0, 4, midpoint} and reports the largest sample
/// deviation from it.
ArcFitReport fit_arc_circle(const std::vector<Complex>& points);

/// Angle flow on the circle, real deformation parameter; closed form
/// +-acos((-tanh(2 theta) + cos a) / (1 - tanh(2 theta) cos a)), sign of a.
double flow_angle(double theta, double alpha);

/// Analytic continuation of the flow to complex theta through
/// tan(phi/2) = exp(2 theta) tan(alpha/2), principal branches.
Complex flow_angle_analytic(Complex theta, double alpha);

/// d(phi)/d(alpha), closed form sqrt(1-t^2)/(1 - t cos a), t = tanh(2 theta);
/// finite at the fixed points alpha in {0, pi}.
double flow_jacobian(double theta, double alpha);
Complex flow_jacobian_analytic(Complex theta, double alpha);

/// Uniform angular grid with M = 2^k >= 64 nodes alpha_k = 2 pi k / M - pi.
struct FourierGrid {
  int size;

  explicit FourierGrid(int m) : size(m) {
    if (m < 64 || (m & (m - 1)) != 0)
      throw ValidationError("FourierGrid: size must be a power of two >= 64");
  }
  double node(int k) const {
    return 2.0 * std::numbers::pi * k / size - std::numbers::pi;
  }
};

/// Lattice coefficients of the dilated basis vector at site n: samples the
/// deformed plane wave against the flow and projects back by discrete
/// Fourier quadrature. Coefficient m lives at slot m + size/2.
struct DilatedVector {
  CVector coeffs;
  int grid_size = 0;

  Complex coeff(int m) const { return coeffs(m + grid_size / 2); }
  double norm() const { return coeffs.norm(); }
};

DilatedVector dilated_delta(int n, Complex theta, const FourierGrid& grid);

/// Deformed Hamiltonian on the angular grid: diagonal multiplication by
/// energy_map(theta, symbol) plus the finitely supported dilated rank-one
/// perturbation terms. Requires scalar lattice multipliers and a finite
/// kernel support.
CMatrix scaled_hamiltonian(const PerturbationSpec& spec, Complex theta,
                           const FourierGrid& grid);

struct ScaledSpectrum {
  std::vector<Complex> arc;       // eigenvalues near the analytic arc
  std::vector<Complex> discrete;  // eigenvalues away from the arc, sorted
  double arc_threshold = 0.0;
};

/// Eigenvalues of the deformed Hamiltonian partitioned by distance to the
/// analytic arc (threshold: 10x the grid resolution along the arc).
ScaledSpectrum scaled_spectrum(const PerturbationSpec& spec, Complex theta,
                               const FourierGrid& grid);

/// Largest deformation radius R <= cap with sup over |theta| <= R of
/// |Im flow_angle| below gamma/2; used to pick the dilation class radius
/// matched to a decay rate gamma.
double dilation_radius_for_decay(double gamma, double cap = 0.45);

}  // namespace latres
