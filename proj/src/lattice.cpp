// SPDX-License-Identifier: Apache-2.0
#include "latres/lattice.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace latres {

CMatrix free_hamiltonian(const LatticeWindow& win) {
  const int d = win.fiber_dim();
  CMatrix h = CMatrix::Zero(win.dim(), win.dim());
  const int N = win.half_width();
  for (int n = -N; n <= N; ++n) {
    for (int j = 0; j < d; ++j) {
      h(win.index(n, j), win.index(n, j)) = 2.0;
      if (n + 1 <= N) {
        h(win.index(n, j), win.index(n + 1, j)) = -1.0;
        h(win.index(n + 1, j), win.index(n, j)) = -1.0;
      }
    }
  }
  return h;
}

CMatrix weight_matrix(const LatticeWindow& win, double gamma, WeightSign sign) {
  if (gamma <= 0.0) throw ValidationError("weight_matrix: gamma must be > 0");
  const double s = sign == WeightSign::Plus ? 0.5 : -0.5;
  CMatrix w = CMatrix::Zero(win.dim(), win.dim());
  const int N = win.half_width();
  for (int n = -N; n <= N; ++n) {
    const double v = std::exp(s * gamma * std::abs(n));
    for (int j = 0; j < win.fiber_dim(); ++j) w(win.index(n, j), win.index(n, j)) = v;
  }
  return w;
}

CMatrix staggering(const LatticeWindow& win) {
  CMatrix s = CMatrix::Zero(win.dim(), win.dim());
  const int N = win.half_width();
  for (int n = -N; n <= N; ++n) {
    const double v = (std::abs(n) % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < win.fiber_dim(); ++j) s(win.index(n, j), win.index(n, j)) = v;
  }
  return s;
}

int numerical_rank(const CMatrix& m, double rel_threshold) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<CMatrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rel_threshold * sv(0);
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++r;
  return r;
}

AssumptionReport verify_assumption(const PerturbationSpec& spec,
                                   int sample_half_width) {
  AssumptionReport rep;
  rep.bound = spec.bound;
  rep.gamma_positive = spec.gamma > 0.0;
  rep.rank_threshold = defaults::kRankRelThreshold;
  rep.fiber_rank = numerical_rank(spec.fiber_product());
  // Gamma factors are stored as diagonal data, so diagonality (and hence the
  // required commutation with the weights and the staggering) is structural.
  rep.factors_diagonal = true;

  const LatticeWindow sample(sample_half_width, spec.fiber_dim);
  const double slack = 1.0 + 1e-12;
  for (const auto& [n, m] : spec.kernel.support_on(sample)) {
    const CMatrix w = spec.kernel.value(n, m, spec.fiber_dim);
    const double ratio =
        w.operatorNorm() * std::exp(spec.gamma * (std::abs(n) + std::abs(m)));
    rep.sup_ratio = std::max(rep.sup_ratio, ratio);
    if (ratio > spec.bound * slack) {
      rep.decay_ok = false;
      rep.violations.push_back({n, m, ratio});
    }
  }

  const bool rank_ok = rep.fiber_rank <= spec.fiber_dim;
  rep.pass = rep.gamma_positive && rep.decay_ok && rep.factors_diagonal &&
             rank_ok && spec.bound > 0.0;
  return rep;
}

CMatrix perturbation_matrix(const PerturbationSpec& spec,
                            const LatticeWindow& win) {
  if (spec.fiber_dim != win.fiber_dim())
    throw ValidationError("perturbation_matrix: fiber dimension mismatch");
  const int d = spec.fiber_dim;
  CMatrix v = CMatrix::Zero(win.dim(), win.dim());
  const double slack = 1.0 + 1e-12;
  for (const auto& [n, m] : spec.kernel.support_on(win)) {
    const CMatrix w = spec.kernel.value(n, m, d);
    const double ratio =
        w.operatorNorm() * std::exp(spec.gamma * (std::abs(n) + std::abs(m)));
    if (ratio > spec.bound * slack)
      throw ValidationError("perturbation_matrix: decay bound violated at (n,m)=(" +
                            std::to_string(n) + "," + std::to_string(m) +
                            "), ratio " + std::to_string(ratio));
    const CMatrix block =
        spec.factors.factor1(n) * spec.factors.factor2(m) *
        (spec.lambda1 * w * spec.lambda2);
    v.block(win.index(n, 0), win.index(m, 0), d, d) += block;
  }
  ensure_finite(v, "perturbation_matrix");
  return v;
}

CMatrix conjugate_by_staggering(const CMatrix& v, const LatticeWindow& win) {
  if (v.rows() != win.dim() || v.cols() != win.dim())
    throw ValidationError("conjugate_by_staggering: dimension mismatch");
  const CMatrix s = staggering(win);
  return s * v * s;
}

double fourier_symbol(double alpha) {
  const double s = std::sin(alpha / 2.0);
  return 4.0 * s * s;
}

}  // namespace latres
