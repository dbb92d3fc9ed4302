// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "latres/perturbation.hpp"
#include "latres/resolvent.hpp"
#include "latres/types.hpp"
#include "latres/window.hpp"

namespace latres {

/// Which sandwiched operator family: AtZero uses the perturbation itself,
/// AtFour uses minus its staggering conjugate (lower edge reduced to the
/// upper one through the band swap).
enum class BSVariant { AtZero, AtFour };

/// Sandwiched operator at a surface point, optionally carrying its split
/// into (i/lambda) * singular + remainder.
struct BSOperator {
  CMatrix matrix;
  SurfacePoint point;
  BSVariant variant;

  struct Split {
    CMatrix singular;   // lambda-independent block of rank <= rank(L2 L1)
    CMatrix remainder;  // bounded as lambda -> 0
  };
  std::optional<Split> split;
};

/// Finite section of the unweighted sandwich kernel: blocks
/// exp((g/2)(|n|+|m|)) w(n,m), with the (-1)^{|n|+|m|} signs and the overall
/// minus for the AtFour variant.
CMatrix sandwich_weight(const PerturbationSpec& spec, BSVariant variant,
                        const LatticeWindow& win);

/// T(lambda) = sandwich_weight * (Gamma2 weighted_green Gamma1 (x) L2 L1).
BSOperator assemble_bs(const PerturbationSpec& spec, const SurfacePoint& p,
                       BSVariant variant, const LatticeWindow& win,
                       bool with_split = false);

/// Analytic d/d(lambda) of the assembled operator.
CMatrix assemble_bs_derivative(const PerturbationSpec& spec,
                               const SurfacePoint& p, BSVariant variant,
                               const LatticeWindow& win);

/// Kronecker product helper, lattice-major ordering (matches LatticeWindow).
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace latres
