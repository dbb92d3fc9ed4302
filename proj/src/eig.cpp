// SPDX-License-Identifier: Apache-2.0
#include "latres/eig.hpp"

#include <lapacke.h>

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "latres/lattice.hpp"

namespace latres {

namespace {

std::vector<Complex> zgeev(const CMatrix& a, bool with_vectors,
                           CMatrix* vectors) {
  if (a.rows() != a.cols()) throw ValidationError("eigenvalues: matrix not square");
  ensure_finite(a, "eigenvalues");
  const int n = static_cast<int>(a.rows());
  std::vector<Complex> work(static_cast<size_t>(n) * n);
  CMatrix::Map(work.data(), n, n) = a;
  std::vector<Complex> w(static_cast<size_t>(n));
  CMatrix vr;
  if (with_vectors) vr.resize(n, n);
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n,
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
      with_vectors ? reinterpret_cast<lapack_complex_double*>(vr.data())
                   : nullptr,
      with_vectors ? n : 1);
  if (info != 0)
    throw NumericalError("zgeev failed to converge (info=" +
                         std::to_string(info) + ", n=" + std::to_string(n) +
                         ", ||A||_F=" + std::to_string(a.norm()) + ")");
  if (vectors) *vectors = std::move(vr);
  return w;
}

}  // namespace

std::vector<Complex> eigenvalues_only(const CMatrix& a) {
  return zgeev(a, false, nullptr);
}

std::vector<Complex> eigenvalues(const CMatrix& a) {
  CMatrix vr;
  std::vector<Complex> w = zgeev(a, true, &vr);
  const int n = static_cast<int>(a.rows());
  const double norm = a.norm();
  const int samples = std::min(10, n);
  for (int s = 0; s < samples; ++s) {
    const int i = static_cast<int>((static_cast<long>(s) * n) / samples);
    const CVector v = vr.col(i);
    const double resid = (a * v - w[static_cast<size_t>(i)] * v).norm();
    if (norm > 0.0 && resid / norm > 1e-10)
      throw NumericalError("eigenpair residual above certificate threshold: " +
                           std::to_string(resid / norm));
  }
  return w;
}

double band_distance(Complex z) {
  const double x = std::clamp(z.real(), 0.0, 4.0);
  return std::abs(z - Complex(x, 0.0));
}

SpectrumReport discrete_spectrum(const PerturbationSpec& spec,
                                 const std::vector<int>& windows,
                                 double band_threshold,
                                 double drift_tolerance) {
  if (windows.size() < 2)
    throw ValidationError("discrete_spectrum: need at least two window sizes");
  std::vector<int> sizes = windows;
  std::sort(sizes.begin(), sizes.end());
  if (sizes.front() < 1)
    throw ValidationError("discrete_spectrum: window sizes must be positive");

  SpectrumReport rep;
  rep.band_threshold = band_threshold;
  rep.drift_tolerance = drift_tolerance;
  for (int n : sizes) {
    const LatticeWindow win(n, spec.fiber_dim);
    const CMatrix h = free_hamiltonian(win) + perturbation_matrix(spec, win);
    rep.windows.push_back({n, eigenvalues(h)});
  }

  const auto& big = rep.windows.back().values;
  const auto& prev = rep.windows[rep.windows.size() - 2].values;
  for (const auto& z : big) {
    if (band_distance(z) <= band_threshold) continue;
    double drift = 1e300;
    for (const auto& y : prev) drift = std::min(drift, std::abs(z - y));
    if (drift <= drift_tolerance) rep.stable_discrete.push_back({z, drift});
  }
  std::sort(rep.stable_discrete.begin(), rep.stable_discrete.end(),
            [](const StablePoint& a, const StablePoint& b) {
              if (a.value.real() != b.value.real())
                return a.value.real() < b.value.real();
              return a.value.imag() < b.value.imag();
            });
  return rep;
}

RieszData riesz_projection(const CMatrix& a, Complex point, double radius,
                           int nodes) {
  if (radius <= 0.0) throw ValidationError("riesz_projection: radius must be > 0");
  if (nodes < 16) throw ValidationError("riesz_projection: nodes must be >= 16");
  const std::vector<Complex> spec = eigenvalues_only(a);
  for (const auto& mu : spec)
    if (std::abs(std::abs(mu - point) - radius) < 0.1 * radius)
      throw ContourError("riesz_projection: circle does not separate the spectrum");

  const Eigen::Index n = a.rows();
  CMatrix p = CMatrix::Zero(n, n);
  for (int j = 0; j < nodes; ++j) {
    const double phi = 2.0 * std::numbers::pi * j / nodes;
    const Complex zeta = point + radius * std::polar(1.0, phi);
    Eigen::PartialPivLU<CMatrix> lu(zeta * CMatrix::Identity(n, n) - a);
    p += std::polar(1.0, phi) * lu.solve(CMatrix::Identity(n, n));
  }
  p *= radius / static_cast<double>(nodes);

  RieszData data;
  data.point = point;
  data.trace = p.trace();
  data.idempotency_defect = (p * p - p).operatorNorm();
  const long m = std::lround(data.trace.real());
  Eigen::BDCSVD<CMatrix> svd(p);
  const double top = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-8 * top) ++rank;
  data.rank = rank;
  data.projection = std::move(p);

  if (data.idempotency_defect > 1e-8)
    throw NumericalError("riesz_projection: projector not idempotent (defect " +
                         std::to_string(data.idempotency_defect) + ")");
  if (std::abs(data.trace - static_cast<double>(m)) > 1e-6)
    throw NumericalError("riesz_projection: non-integral trace");
  if (rank != m)
    throw NumericalError("riesz_projection: rank and trace disagree");
  return data;
}

// ---------------------------------------------------------------------------
// LAP table

namespace {

// Tridiagonal solve for (z - H0) x = r on the scalar lattice: constant
// diagonal z - 2 and unit off-diagonals. The forward-elimination pivots are
// Herglotz in z, hence bounded away from zero off the real axis.
void thomas_solve(Complex z, std::vector<Complex>& r) {
  const size_t n = r.size();
  const Complex b = z - 2.0;
  std::vector<Complex> d(n);
  d[0] = b;
  for (size_t i = 1; i < n; ++i) {
    const Complex m = 1.0 / d[i - 1];
    d[i] = b - m;
    r[i] -= m * r[i - 1];
  }
  r[n - 1] /= d[n - 1];
  for (size_t i = n - 1; i-- > 0;) r[i] = (r[i] - r[i + 1]) / d[i];
}

// <delta_a, (z - H0 - V)^{-1} delta_b> on window [-L, L] for a scalar-lattice
// spec with finite kernel support, via the low-rank update formula.
Complex weighted_element(const PerturbationSpec& spec, Complex z, int a, int b,
                         int L) {
  const int n = 2 * L + 1;
  auto idx = [L](int site) { return site + L; };

  std::set<int> site_set;
  for (const auto& e : spec.kernel.entries) {
    site_set.insert(e.n);
    site_set.insert(e.m);
  }
  std::vector<int> sites(site_set.begin(), site_set.end());
  const int s = static_cast<int>(sites.size());

  std::vector<Complex> x0(static_cast<size_t>(n), Complex(0, 0));
  x0[static_cast<size_t>(idx(b))] = 1.0;
  thomas_solve(z, x0);
  if (s == 0) return x0[static_cast<size_t>(idx(a))];

  CMatrix c = CMatrix::Zero(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      c(i, j) = spec.factors.factor1(sites[static_cast<size_t>(i)]) *
                spec.factors.factor2(sites[static_cast<size_t>(j)]) *
                (spec.lambda1 *
                 spec.kernel.value(sites[static_cast<size_t>(i)],
                                   sites[static_cast<size_t>(j)], 1) *
                 spec.lambda2)(0, 0);

  CMatrix y(n, s);
  for (int j = 0; j < s; ++j) {
    std::vector<Complex> col(static_cast<size_t>(n), Complex(0, 0));
    col[static_cast<size_t>(idx(sites[static_cast<size_t>(j)]))] = 1.0;
    thomas_solve(z, col);
    for (int i = 0; i < n; ++i) y(i, j) = col[static_cast<size_t>(i)];
  }
  CMatrix uy(s, s);  // rows of Y at the support sites
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      uy(i, j) = y(idx(sites[static_cast<size_t>(i)]), j);
  CVector ux0(s);
  for (int i = 0; i < s; ++i)
    ux0(i) = x0[static_cast<size_t>(idx(sites[static_cast<size_t>(i)]))];

  // (z - H0 - V)^{-1} = A^{-1} + A^{-1}U (I - C U^T A^{-1} U)^{-1} C U^T A^{-1}
  const CMatrix cap = CMatrix::Identity(s, s) - c * uy;
  const CVector corr = y * cap.partialPivLu().solve(c * ux0);
  return x0[static_cast<size_t>(idx(a))] + corr(idx(a));
}

}  // namespace

LapTable lap_check(const PerturbationSpec& spec, double e_lo, double e_hi,
                   int phi_site, int psi_site,
                   const std::vector<double>& epsilons, int window,
                   int energy_samples) {
  if (!(0.0 < e_lo && e_lo < e_hi && e_hi < 4.0))
    throw ValidationError("lap_check: interval must sit inside (0,4)");
  if (epsilons.empty()) throw ValidationError("lap_check: empty epsilon ladder");
  if (spec.fiber_dim != 1 || !spec.kernel.finite_support())
    throw ValidationError(
        "lap_check: fast path requires a scalar fiber and finite kernel support");

  std::vector<double> eps = epsilons;
  std::sort(eps.rbegin(), eps.rend());

  LapTable table;
  table.epsilons = eps;
  const int half = window / 2;

  for (int sign : {+1, -1}) {
    for (const double e : eps) {
      double mx = 0.0;
      for (int i = 0; i < energy_samples; ++i) {
        const double energy =
            e_lo + (e_hi - e_lo) * i / std::max(1, energy_samples - 1);
        const Complex z(energy, sign * e);
        const double full =
            std::abs(weighted_element(spec, z, phi_site, psi_site, window));
        const double halfw =
            std::abs(weighted_element(spec, z, phi_site, psi_site, half));
        const bool clean =
            std::abs(full - halfw) <= 0.02 * std::max(full, 1e-12);
        table.samples.push_back({energy, e, sign, full, clean});
        if (clean) mx = std::max(mx, full);
      }
      (sign > 0 ? table.max_upper : table.max_lower).push_back(mx);
    }
  }

  // Growth below 5% per halving of eps at the smallest scales (the last two
  // ladder transitions, normalized to halvings for arbitrary step ratios).
  auto tail_ok = [&eps](const std::vector<double>& mx) {
    const size_t n = mx.size();
    if (n < 2) return true;
    for (size_t k = (n >= 3 ? n - 2 : 1); k < n; ++k) {
      if (mx[k - 1] <= 0.0) continue;
      const double halvings = std::log2(eps[k - 1] / eps[k]);
      const double per_halving =
          std::pow(mx[k] / mx[k - 1], 1.0 / std::max(halvings, 1e-9));
      if (per_halving >= 1.05) return false;
    }
    return true;
  };
  table.bounded = tail_ok(table.max_upper) && tail_ok(table.max_lower);

  // Candidate embedded energies: local blow-up of clean samples at the
  // smallest scale.
  if (eps.size() >= 2) {
    const double e_small = eps.back(), e_prev = eps[eps.size() - 2];
    for (int i = 0; i < energy_samples; ++i) {
      const double energy =
          e_lo + (e_hi - e_lo) * i / std::max(1, energy_samples - 1);
      double v_small = 0.0, v_prev = 0.0;
      for (const auto& s : table.samples) {
        if (std::abs(s.energy - energy) > 1e-12 || s.sign != +1 || !s.clean)
          continue;
        if (s.eps == e_small) v_small = std::max(v_small, s.value);
        if (s.eps == e_prev) v_prev = std::max(v_prev, s.value);
      }
      if (v_prev > 0.0 && v_small / v_prev >= 1.5)
        table.candidate_energies.push_back(energy);
    }
  }
  return table;
}

}  // namespace latres
