// SPDX-License-Identifier: Apache-2.0
#include "latres/birman_schwinger.hpp"

#include <cmath>

namespace latres {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace {

// Diagonal lattice multiplier as a vector over sites.
CVector factor_diagonal(const PerturbationSpec& spec, int which,
                        const LatticeWindow& win) {
  const int N = win.half_width();
  CVector g(win.site_count());
  for (int n = -N; n <= N; ++n) {
    const Complex v = which == 1 ? spec.factors.factor1(n)
                                 : spec.factors.factor2(n);
    g(n + N) = v;
  }
  return g;
}

// Gamma2 * G * Gamma1 as row/column scalings of the scalar lattice matrix.
CMatrix sandwich_factors(const PerturbationSpec& spec, const CMatrix& g,
                         const LatticeWindow& scalar_win) {
  const CVector g1 = factor_diagonal(spec, 1, scalar_win);
  const CVector g2 = factor_diagonal(spec, 2, scalar_win);
  return g2.asDiagonal() * g * g1.asDiagonal();
}

}  // namespace

CMatrix sandwich_weight(const PerturbationSpec& spec, BSVariant variant,
                        const LatticeWindow& win) {
  const AssumptionReport rep = verify_assumption(spec);
  if (!rep.pass)
    throw ValidationError("sandwich_weight: perturbation fails its assumption check");
  if (spec.fiber_dim != win.fiber_dim())
    throw ValidationError("sandwich_weight: fiber dimension mismatch");
  const int d = spec.fiber_dim;
  CMatrix sw = CMatrix::Zero(win.dim(), win.dim());
  for (const auto& [n, m] : spec.kernel.support_on(win)) {
    double scale = std::exp(0.5 * spec.gamma * (std::abs(n) + std::abs(m)));
    if (variant == BSVariant::AtFour) {
      const double sign = ((std::abs(n) + std::abs(m)) % 2 == 0) ? 1.0 : -1.0;
      scale *= -sign;
    }
    sw.block(win.index(n, 0), win.index(m, 0), d, d) +=
        scale * spec.kernel.value(n, m, d);
  }
  ensure_finite(sw, "sandwich_weight");
  return sw;
}

BSOperator assemble_bs(const PerturbationSpec& spec, const SurfacePoint& p,
                       BSVariant variant, const LatticeWindow& win,
                       bool with_split) {
  const LatticeWindow scalar_win(win.half_width(), 1);
  const CMatrix sw = sandwich_weight(spec, variant, win);
  const CMatrix fiber = spec.fiber_product();

  BSOperator op{CMatrix(), p, variant, std::nullopt};
  if (with_split) {
    const KernelSplit ks = green_split(p, spec.gamma, scalar_win);
    const CMatrix outer =
        ks.xi.cast<Complex>() * ks.xi.cast<Complex>().transpose();
    // M*M = (1/2) xi xi^T carries the full lambda-free singular block.
    const CMatrix singular =
        sw * kron(sandwich_factors(spec, 0.5 * outer, scalar_win), fiber);
    const CMatrix remainder =
        sw * kron(sandwich_factors(spec, ks.holomorphic_part, scalar_win), fiber);
    op.split = BSOperator::Split{singular, remainder};
    op.matrix = (kImagUnit / p.lambda) * singular + remainder;
  } else {
    const CMatrix g = weighted_green(p, spec.gamma, scalar_win);
    op.matrix = sw * kron(sandwich_factors(spec, g, scalar_win), fiber);
  }
  ensure_finite(op.matrix, "assemble_bs");
  return op;
}

CMatrix assemble_bs_derivative(const PerturbationSpec& spec,
                               const SurfacePoint& p, BSVariant variant,
                               const LatticeWindow& win) {
  const LatticeWindow scalar_win(win.half_width(), 1);
  const CMatrix sw = sandwich_weight(spec, variant, win);
  const CMatrix gp = weighted_green_derivative(p, spec.gamma, scalar_win);
  CMatrix out =
      sw * kron(sandwich_factors(spec, gp, scalar_win), spec.fiber_product());
  ensure_finite(out, "assemble_bs_derivative");
  return out;
}

}  // namespace latres
