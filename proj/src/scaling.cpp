// SPDX-License-Identifier: Apache-2.0
#include "latres/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "latres/eig.hpp"
#include "latres/lattice.hpp"

namespace latres {

namespace {

constexpr double kThetaDomain = std::numbers::pi / 8.0;

void check_theta(Complex theta) {
  if (!(std::abs(theta) < kThetaDomain))
    throw ValidationError("deformation parameter must satisfy |theta| < pi/8");
}

}  // namespace

Complex mobius(Complex theta, Complex lambda) {
  check_theta(theta);
  const Complex t = std::tanh(2.0 * theta);
  const Complex den = 1.0 - lambda * t;
  if (std::abs(den) < 1e-12)
    throw ValidationError("mobius: denominator vanishes");
  return (lambda - t) / den;
}

Complex energy_map(Complex theta, Complex z) {
  // T(z) = 2(1-z), T^{-1}(z) = 1 - z/2.
  return 2.0 * (1.0 - mobius(theta, 1.0 - z / 2.0));
}

std::vector<Complex> spectral_arc(Complex theta, int samples) {
  if (samples < 2) throw ValidationError("spectral_arc: need >= 2 samples");
  std::vector<Complex> pts(static_cast<size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double l = -1.0 + 2.0 * i / (samples - 1);
    pts[static_cast<size_t>(i)] = 2.0 * (1.0 - mobius(theta, l));
  }
  // The band endpoints are fixed points; pin them exactly.
  pts.front() = 4.0;
  pts.back() = 0.0;
  return pts;
}

ArcFitReport fit_arc_circle(const std::vector<Complex>& points) {
  if (points.size() < 4)
    throw ValidationError("fit_arc_circle: need >= 4 points");
  ArcFitReport rep;
  const Complex mid = points[points.size() / 2];
  // Collinear with {0,4} means the deformation was real.
  if (std::abs(mid.imag()) < 1e-13) {
    rep.degenerate = true;
    return rep;
  }
  // Circle through 0, 4 and mid: center on Re = 2.
  const double y =
      (std::norm(mid) - 4.0 * mid.real()) / (2.0 * mid.imag());
  rep.center = Complex(2.0, y);
  rep.radius = std::abs(rep.center);
  for (const auto& p : points)
    rep.max_deviation =
        std::max(rep.max_deviation, std::abs(std::abs(p - rep.center) - rep.radius));
  rep.pass = rep.max_deviation <= 1e-10;
  return rep;
}

double flow_angle(double theta, double alpha) {
  const double t = std::tanh(2.0 * theta);
  const double c = std::cos(alpha);
  const double u = (-t + c) / (1.0 - t * c);
  const double clamped = std::min(1.0, std::max(-1.0, u));
  return alpha >= 0.0 ? std::acos(clamped) : -std::acos(clamped);
}

Complex flow_angle_analytic(Complex theta, double alpha) {
  if (std::abs(theta) >= 0.5)
    throw ValidationError("flow continuation requires |theta| < 1/2");
  // tan(phi/2) = e^{2 theta} tan(alpha/2); the fixed points +-pi are pinned.
  if (std::abs(std::abs(alpha) - std::numbers::pi) < 1e-15)
    return alpha > 0 ? std::numbers::pi : -std::numbers::pi;
  const Complex k = std::exp(2.0 * theta);
  return 2.0 * std::atan(k * std::tan(alpha / 2.0));
}

double flow_jacobian(double theta, double alpha) {
  const double t = std::tanh(2.0 * theta);
  return std::sqrt(1.0 - t * t) / (1.0 - t * std::cos(alpha));
}

Complex flow_jacobian_analytic(Complex theta, double alpha) {
  const Complex t = std::tanh(2.0 * theta);
  return std::sqrt(1.0 - t * t) / (1.0 - t * std::cos(alpha));
}

DilatedVector dilated_delta(int n, Complex theta, const FourierGrid& grid) {
  if (std::abs(theta) >= 0.5)
    throw ValidationError("dilated_delta: need |theta| < 1/2");
  const int M = grid.size;
  if (std::abs(n) > M / 8)
    throw ValidationError("dilated_delta: site index too large for the grid");

  // Deformed plane wave times the flow volume factor, sampled on the grid.
  CVector samples(M);
  for (int k = 0; k < M; ++k) {
    const double a = grid.node(k);
    const Complex phi = flow_angle_analytic(theta, a);
    const Complex j = flow_jacobian_analytic(theta, a);
    samples(k) = std::exp(-kImagUnit * static_cast<double>(n) * phi) * std::sqrt(j);
  }

  DilatedVector v;
  v.grid_size = M;
  v.coeffs = CVector::Zero(M);
  for (int m = -M / 2; m < M / 2; ++m) {
    Complex acc{0.0, 0.0};
    for (int k = 0; k < M; ++k)
      acc += std::exp(kImagUnit * static_cast<double>(m) * grid.node(k)) * samples(k);
    v.coeffs(m + M / 2) = acc / static_cast<double>(M);
  }

  // Aliasing guard: the top eighth of coefficients must be negligible.
  const double total = v.coeffs.squaredNorm();
  double trailing = 0.0;
  for (int m = -M / 2; m < M / 2; ++m)
    if (std::abs(m) >= (7 * M) / 16) trailing += std::norm(v.coeff(m));
  if (total > 0.0 && trailing > 1e-8 * total)
    throw ResolutionError("dilated_delta: grid does not resolve the dilated vector");
  return v;
}

CMatrix scaled_hamiltonian(const PerturbationSpec& spec, Complex theta,
                           const FourierGrid& grid) {
  check_theta(theta);
  if (!spec.factors.is_scalar())
    throw ValidationError(
        "scaled_hamiltonian: only scalar lattice multipliers are supported");
  if (!spec.kernel.finite_support())
    throw ValidationError("scaled_hamiltonian: kernel must have finite support");

  const int M = grid.size;
  const int d = spec.fiber_dim;
  const Complex mu = spec.factors.factor1(0) * spec.factors.factor2(0);

  CMatrix h = CMatrix::Zero(M * d, M * d);
  for (int k = 0; k < M; ++k) {
    const Complex diag = energy_map(theta, fourier_symbol(grid.node(k)));
    for (int j = 0; j < d; ++j) h(k * d + j, k * d + j) = diag;
  }

  // Deformed plane waves at theta and conj(theta); for real angles the
  // conjugate-parameter bra reduces to samples of the theta flow itself.
  std::vector<Complex> phi(M), sj(M);
  for (int k = 0; k < M; ++k) {
    const double a = grid.node(k);
    phi[static_cast<size_t>(k)] = flow_angle_analytic(theta, a);
    sj[static_cast<size_t>(k)] = std::sqrt(flow_jacobian_analytic(theta, a));
  }

  for (const auto& e : spec.kernel.entries) {
    const CMatrix fiber_block = spec.lambda1 * e.w * spec.lambda2;
    CVector ket(M), bra(M);
    for (int k = 0; k < M; ++k) {
      const Complex f = phi[static_cast<size_t>(k)];
      ket(k) = std::exp(-kImagUnit * static_cast<double>(e.n) * f) * sj[static_cast<size_t>(k)];
      bra(k) = std::exp(kImagUnit * static_cast<double>(e.m) * f) * sj[static_cast<size_t>(k)];
    }
    const Complex scale = mu / static_cast<double>(M);
    for (int r = 0; r < M; ++r)
      for (int c = 0; c < M; ++c)
        h.block(r * d, c * d, d, d) += scale * ket(r) * bra(c) * fiber_block;
  }
  ensure_finite(h, "scaled_hamiltonian");
  return h;
}

ScaledSpectrum scaled_spectrum(const PerturbationSpec& spec, Complex theta,
                               const FourierGrid& grid) {
  const CMatrix h = scaled_hamiltonian(spec, theta, grid);
  const std::vector<Complex> ev = eigenvalues_only(h);

  const int fine = 4096;
  const std::vector<Complex> arc = spectral_arc(theta, fine);
  double arclen = 0.0;
  for (int i = 1; i < fine; ++i)
    arclen += std::abs(arc[static_cast<size_t>(i)] - arc[static_cast<size_t>(i - 1)]);

  ScaledSpectrum out;
  out.arc_threshold = 10.0 * arclen / grid.size;
  for (const auto& z : ev) {
    double dist = 1e300;
    for (const auto& a : arc) dist = std::min(dist, std::abs(z - a));
    (dist > out.arc_threshold ? out.discrete : out.arc).push_back(z);
  }
  auto canonical = [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  std::sort(out.discrete.begin(), out.discrete.end(), canonical);
  std::sort(out.arc.begin(), out.arc.end(), canonical);
  return out;
}

double dilation_radius_for_decay(double gamma, double cap) {
  if (gamma <= 0.0) throw ValidationError("dilation_radius_for_decay: gamma > 0");
  // sup over the closed disk boundary by the maximum principle; sampled.
  auto sup_im = [](double r) {
    double s = 0.0;
    for (int p = 0; p < 32; ++p) {
      const Complex th = std::polar(r, 2.0 * std::numbers::pi * p / 32.0);
      for (int k = 0; k < 129; ++k) {
        const double a = -std::numbers::pi + 2.0 * std::numbers::pi * k / 128.0;
        s = std::max(s, std::abs(flow_angle_analytic(th, a).imag()));
      }
    }
    return s;
  };
  double r = cap;
  for (int i = 0; i < 40 && r > 1e-6; ++i) {
    if (sup_im(r) * 1.02 <= 0.5 * gamma) return r;
    r *= 0.85;
  }
  return r;
}

}  // namespace latres
