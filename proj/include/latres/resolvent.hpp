// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "latres/types.hpp"
#include "latres/window.hpp"

namespace latres {

enum class Threshold { Zero, Four };
enum class Sheet { Physical, Nonphysical };

/// A point lambda on the uniformizing disk of the two-sheet energy surface
/// at one of the band edges. Im(lambda) > 0 is the physical sheet.
struct SurfacePoint {
  Complex lambda;
  Threshold threshold = Threshold::Zero;

  SurfacePoint(Complex l, Threshold t,
               double continuation_radius = defaults::kContinuationRadius)
      : lambda(l), threshold(t) {
    if (lambda == Complex(0.0, 0.0))
      throw ValidationError("SurfacePoint: lambda must be nonzero");
    if (continuation_radius <= 0.0 || continuation_radius >= 2.0)
      throw ValidationError("SurfacePoint: continuation radius must be in (0,2)");
    if (std::abs(lambda) >= continuation_radius)
      throw ValidationError("SurfacePoint: |lambda| exceeds continuation radius");
  }

  Complex energy() const {
    return threshold == Threshold::Zero ? lambda * lambda
                                        : 4.0 - lambda * lambda;
  }
  Sheet sheet() const {
    return lambda.imag() > 0.0 ? Sheet::Physical : Sheet::Nonphysical;
  }
};

/// Same lambda re-tagged at the lower band edge; callers combine with the
/// staggering conjugation and a sign flip to reduce the edge-4 analysis to
/// the edge-0 one. Identity on points already at the lower edge.
SurfacePoint map_to_zero(const SurfacePoint& p);

/// Free lattice Green kernel continued through the lower band edge:
///   i exp(i|n-m| 2 asin(lambda/2)) / (lambda sqrt(4-lambda^2)),
/// principal branches throughout; depends on (n,m) only through |n-m|.
Complex green_kernel(const SurfacePoint& p, int n, int m);

/// d/d(lambda) of green_kernel, same branches.
Complex green_kernel_derivative(const SurfacePoint& p, int n, int m);

/// Holomorphic coefficients of the kernel split
///   kernel = i/(2 lambda) + alpha(lambda) + beta_k(lambda),  k = |n-m|.
/// Evaluated in rationalized forms that stay accurate down to lambda -> 0.
Complex alpha_coefficient(Complex lambda);
Complex beta_coefficient(Complex lambda, int separation);

/// Weighted kernel matrix exp(-g/2|n|) K(n,m) exp(-g/2|m|) on the window
/// (scalar lattice part; callers tensor with the fiber).
CMatrix weighted_green(const SurfacePoint& p, double gamma,
                       const LatticeWindow& win);

/// Same matrix with the lambda-derivative of the kernel.
CMatrix weighted_green_derivative(const SurfacePoint& p, double gamma,
                                  const LatticeWindow& win);

/// Rank-one singular part plus bounded remainder of the weighted kernel:
///   weighted_green = coeff * xi xi^T + holomorphic_part,
/// coeff = i/(2 lambda), xi(n) = exp(-(gamma/2)|n|).
struct KernelSplit {
  Complex singular_coefficient;
  RVector xi;
  CMatrix holomorphic_part;

  CMatrix reassemble() const {
    const CMatrix outer =
        xi.cast<Complex>() * xi.cast<Complex>().transpose();
    return singular_coefficient * outer + holomorphic_part;
  }
};

KernelSplit green_split(const SurfacePoint& p, double gamma,
                        const LatticeWindow& win);

}  // namespace latres
