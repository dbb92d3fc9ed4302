// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "latres/types.hpp"
#include "latres/window.hpp"

namespace latres {

/// Diagonal lattice multipliers. Either a scalar pair (mu1, mu2) or a pair of
/// bounded sequences sampled around n = 0 (odd length, centered; values beyond
/// the listed range repeat the nearest edge entry).
struct GammaFactors {
  std::optional<std::pair<Complex, Complex>> scalars;
  std::vector<Complex> g1;
  std::vector<Complex> g2;

  static GammaFactors identity() {
    GammaFactors f;
    f.scalars = {Complex(1.0, 0.0), Complex(1.0, 0.0)};
    return f;
  }
  static GammaFactors scalar(Complex mu1, Complex mu2) {
    GammaFactors f;
    f.scalars = {mu1, mu2};
    return f;
  }

  bool is_scalar() const { return scalars.has_value(); }
  Complex factor1(int n) const { return eval(g1, 1, n); }
  Complex factor2(int n) const { return eval(g2, 2, n); }

 private:
  Complex eval(const std::vector<Complex>& g, int which, int n) const {
    if (scalars) return which == 1 ? scalars->first : scalars->second;
    if (g.empty() || g.size() % 2 == 0)
      throw ValidationError("gamma factor sequence must have odd length");
    const int half = static_cast<int>(g.size()) / 2;
    const int clamped = std::max(-half, std::min(half, n));
    return g[static_cast<size_t>(clamped + half)];
  }
};

/// One stored lattice kernel block w(n, m), a d x d complex matrix.
struct KernelEntry {
  int n = 0;
  int m = 0;
  CMatrix w;
};

/// Lattice kernel: either an explicit finite support list or the closed-form
/// decaying kernel w(n,m) = amplitude * exp(-rate*(|n|+|m|)) * I_d sampled on
/// whatever window it is requested on.
struct Kernel {
  enum class Form { List, ExpDecay };
  Form form = Form::List;
  std::vector<KernelEntry> entries;
  double amplitude = 0.0;
  double rate = 0.0;

  bool finite_support() const { return form == Form::List; }

  CMatrix value(int n, int m, int fiber_dim) const {
    if (form == Form::List) {
      for (const auto& e : entries)
        if (e.n == n && e.m == m) return e.w;
      return CMatrix::Zero(fiber_dim, fiber_dim);
    }
    return amplitude * std::exp(-rate * (std::abs(n) + std::abs(m))) *
           CMatrix::Identity(fiber_dim, fiber_dim);
  }

  // All (n, m) pairs with a nonzero block inside the window.
  std::vector<std::pair<int, int>> support_on(const LatticeWindow& win) const {
    std::vector<std::pair<int, int>> s;
    if (form == Form::List) {
      for (const auto& e : entries)
        if (win.contains(e.n) && win.contains(e.m)) s.emplace_back(e.n, e.m);
    } else {
      const int N = win.half_width();
      for (int n = -N; n <= N; ++n)
        for (int m = -N; m <= N; ++m) s.emplace_back(n, m);
    }
    return s;
  }
};

/// Full data of the structured perturbation: lattice kernel, decay rate and
/// bound, diagonal lattice multipliers, fiber factors.
struct PerturbationSpec {
  double gamma = 1.0;
  double bound = 1.0;  // the constant C in the decay bound
  int fiber_dim = 1;
  GammaFactors factors = GammaFactors::identity();
  CMatrix lambda1;  // d x d, bounded factor
  CMatrix lambda2;  // d x d, compact factor
  Kernel kernel;

  // Product Lambda2 * Lambda1 entering every sandwiched assembly.
  CMatrix fiber_product() const { return lambda2 * lambda1; }
};

struct AssumptionViolation {
  int n = 0;
  int m = 0;
  double ratio = 0.0;  // ||w(n,m)|| * exp(gamma*(|n|+|m|))
};

struct AssumptionReport {
  double sup_ratio = 0.0;
  double bound = 0.0;
  int fiber_rank = 0;
  double rank_threshold = 0.0;
  bool factors_diagonal = true;
  bool decay_ok = true;
  bool gamma_positive = true;
  std::vector<AssumptionViolation> violations;
  bool pass = false;
};

/// Checks the decay bound on the kernel support (or a sampled window for
/// closed-form kernels), the finite rank of Lambda2*Lambda1 and the shape of
/// the lattice multipliers. Never throws; failures are carried in the report.
AssumptionReport verify_assumption(const PerturbationSpec& spec,
                                   int sample_half_width = 64);

int numerical_rank(const CMatrix& m,
                   double rel_threshold = defaults::kRankRelThreshold);

}  // namespace latres
