// SPDX-License-Identifier: Apache-2.0
#include "latres/resolvent.hpp"

#include <cmath>

namespace latres {

namespace {

void require_lattice_scalar(const LatticeWindow& win, const char* what) {
  if (win.fiber_dim() != 1)
    throw ValidationError(std::string(what) +
                          ": expects the scalar lattice window (fiber_dim 1)");
}

// Half-angle of the kernel phase: w = |n-m| * 2 asin(lambda/2).
Complex phase(Complex lambda, int separation) {
  return 2.0 * static_cast<double>(separation) * std::asin(lambda / 2.0);
}

}  // namespace

SurfacePoint map_to_zero(const SurfacePoint& p) {
  SurfacePoint q = p;
  q.threshold = Threshold::Zero;
  return q;
}

Complex green_kernel(const SurfacePoint& p, int n, int m) {
  const Complex l = p.lambda;
  const int k = std::abs(n - m);
  const Complex s = std::sqrt(4.0 - l * l);
  return kImagUnit * std::exp(kImagUnit * phase(l, k)) / (l * s);
}

Complex green_kernel_derivative(const SurfacePoint& p, int n, int m) {
  const Complex l = p.lambda;
  const int k = std::abs(n - m);
  const Complex s = std::sqrt(4.0 - l * l);
  // Logarithmic derivative: i k q'(l) - 1/l - s'(l)/s with q' = 2/s, s' = -l/s.
  const Complex logd =
      2.0 * kImagUnit * static_cast<double>(k) / s - 1.0 / l + l / (s * s);
  return green_kernel(p, n, m) * logd;
}

Complex alpha_coefficient(Complex lambda) {
  // i (1/(l s) - 1/(2l)) rationalized through 2 - s = l^2/(2 + s):
  // alpha = i l / (2 s (2 + s)); no cancellation anywhere on the disk.
  const Complex s = std::sqrt(4.0 - lambda * lambda);
  return kImagUnit * lambda / (2.0 * s * (2.0 + s));
}

Complex beta_coefficient(Complex lambda, int separation) {
  // i (e^{iw} - 1)/(l s) with e^{iw} - 1 = 2i e^{iw/2} sin(w/2); exact
  // algebra, stable for small w.
  const Complex s = std::sqrt(4.0 - lambda * lambda);
  const Complex w = phase(lambda, separation);
  return -2.0 * std::exp(kImagUnit * w / 2.0) * std::sin(w / 2.0) /
         (lambda * s);
}

CMatrix weighted_green(const SurfacePoint& p, double gamma,
                       const LatticeWindow& win) {
  require_lattice_scalar(win, "weighted_green");
  const SurfacePoint q = map_to_zero(p);
  const int N = win.half_width();
  const int dim = win.dim();
  // Kernel depends only on |n-m|; precompute per separation.
  std::vector<Complex> by_sep(2 * N + 1);
  for (int k = 0; k <= 2 * N; ++k) by_sep[k] = green_kernel(q, k, 0);
  CMatrix g(dim, dim);
  for (int n = -N; n <= N; ++n) {
    const double wn = std::exp(-0.5 * gamma * std::abs(n));
    for (int m = -N; m <= N; ++m) {
      const double wm = std::exp(-0.5 * gamma * std::abs(m));
      g(win.index(n), win.index(m)) = wn * by_sep[std::abs(n - m)] * wm;
    }
  }
  ensure_finite(g, "weighted_green");
  return g;
}

CMatrix weighted_green_derivative(const SurfacePoint& p, double gamma,
                                  const LatticeWindow& win) {
  require_lattice_scalar(win, "weighted_green_derivative");
  const SurfacePoint q = map_to_zero(p);
  const int N = win.half_width();
  std::vector<Complex> by_sep(2 * N + 1);
  for (int k = 0; k <= 2 * N; ++k) by_sep[k] = green_kernel_derivative(q, k, 0);
  CMatrix g(win.dim(), win.dim());
  for (int n = -N; n <= N; ++n) {
    const double wn = std::exp(-0.5 * gamma * std::abs(n));
    for (int m = -N; m <= N; ++m) {
      const double wm = std::exp(-0.5 * gamma * std::abs(m));
      g(win.index(n), win.index(m)) = wn * by_sep[std::abs(n - m)] * wm;
    }
  }
  ensure_finite(g, "weighted_green_derivative");
  return g;
}

KernelSplit green_split(const SurfacePoint& p, double gamma,
                        const LatticeWindow& win) {
  require_lattice_scalar(win, "green_split");
  const SurfacePoint q = map_to_zero(p);
  const Complex l = q.lambda;
  const int N = win.half_width();

  KernelSplit split;
  split.singular_coefficient = kImagUnit / (2.0 * l);
  split.xi = RVector(win.dim());
  for (int n = -N; n <= N; ++n)
    split.xi(win.index(n)) = std::exp(-0.5 * gamma * std::abs(n));

  const Complex a = alpha_coefficient(l);
  std::vector<Complex> beta_by_sep(2 * N + 1);
  for (int k = 0; k <= 2 * N; ++k) beta_by_sep[k] = beta_coefficient(l, k);

  CMatrix h(win.dim(), win.dim());
  for (int n = -N; n <= N; ++n) {
    const double wn = split.xi(win.index(n));
    for (int m = -N; m <= N; ++m) {
      const double wm = split.xi(win.index(m));
      h(win.index(n), win.index(m)) = wn * (a + beta_by_sep[std::abs(n - m)]) * wm;
    }
  }
  ensure_finite(h, "green_split");
  split.holomorphic_part = std::move(h);
  return split;
}

}  // namespace latres
