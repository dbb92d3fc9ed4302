// SPDX-License-Identifier: Apache-2.0
#include "latres/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "latres/birman_schwinger.hpp"

namespace latres {

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError("expected a complex number as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

namespace {

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j, int d) {
  CMatrix m(d, d);
  if (j.is_array() && j.size() == static_cast<size_t>(d) && d > 0 &&
      j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = complex_from_json(j[r][c]);
    return m;
  }
  // Flat row-major list of d*d complex pairs.
  if (j.is_array() && j.size() == static_cast<size_t>(d) * d) {
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = complex_from_json(j[r * d + c]);
    return m;
  }
  throw ValidationError("matrix: expected d x d rows or a flat list of d*d pairs");
}

}  // namespace

Json spec_to_json(const PerturbationSpec& spec) {
  Json j;
  j["gamma"] = spec.gamma;
  j["C"] = spec.bound;
  j["fiber_dim"] = spec.fiber_dim;
  if (spec.factors.is_scalar()) {
    j["gamma_factors"] = {
        {"scalar", Json::array({complex_to_json(spec.factors.scalars->first),
                                complex_to_json(spec.factors.scalars->second)})}};
  } else {
    Json g1 = Json::array(), g2 = Json::array();
    for (const auto& v : spec.factors.g1) g1.push_back(complex_to_json(v));
    for (const auto& v : spec.factors.g2) g2.push_back(complex_to_json(v));
    j["gamma_factors"] = {{"g1", g1}, {"g2", g2}};
  }
  j["lambda1"] = matrix_to_json(spec.lambda1);
  j["lambda2"] = matrix_to_json(spec.lambda2);
  if (spec.kernel.form == Kernel::Form::List) {
    Json entries = Json::array();
    for (const auto& e : spec.kernel.entries)
      entries.push_back(
          {{"n", e.n}, {"m", e.m}, {"w", matrix_to_json(e.w)}});
    j["kernel"] = entries;
  } else {
    j["kernel"] = {{"form", "exp_decay"},
                   {"amplitude", spec.kernel.amplitude},
                   {"rate", spec.kernel.rate}};
  }
  return j;
}

PerturbationSpec spec_from_json(const Json& j) {
  PerturbationSpec spec;
  spec.gamma = j.at("gamma").get<double>();
  spec.bound = j.at("C").get<double>();
  spec.fiber_dim = j.at("fiber_dim").get<int>();
  if (spec.gamma <= 0.0) throw ValidationError("spec: gamma must be > 0");
  if (spec.fiber_dim < 1) throw ValidationError("spec: fiber_dim must be >= 1");

  const Json& gf = j.at("gamma_factors");
  if (gf.contains("scalar")) {
    spec.factors = GammaFactors::scalar(complex_from_json(gf["scalar"][0]),
                                        complex_from_json(gf["scalar"][1]));
  } else {
    spec.factors.scalars.reset();
    for (const auto& v : gf.at("g1")) spec.factors.g1.push_back(complex_from_json(v));
    for (const auto& v : gf.at("g2")) spec.factors.g2.push_back(complex_from_json(v));
    if (spec.factors.g1.size() % 2 == 0 || spec.factors.g2.size() % 2 == 0)
      throw ValidationError("spec: factor sequences must have odd length");
  }

  spec.lambda1 = matrix_from_json(j.at("lambda1"), spec.fiber_dim);
  spec.lambda2 = matrix_from_json(j.at("lambda2"), spec.fiber_dim);

  const Json& k = j.at("kernel");
  if (k.is_array()) {
    spec.kernel.form = Kernel::Form::List;
    for (const auto& e : k) {
      KernelEntry entry;
      entry.n = e.at("n").get<int>();
      entry.m = e.at("m").get<int>();
      entry.w = matrix_from_json(e.at("w"), spec.fiber_dim);
      spec.kernel.entries.push_back(std::move(entry));
    }
  } else if (k.is_object() && k.value("form", "") == "exp_decay") {
    spec.kernel.form = Kernel::Form::ExpDecay;
    spec.kernel.amplitude = k.at("amplitude").get<double>();
    spec.kernel.rate = k.at("rate").get<double>();
  } else {
    throw ValidationError("spec: kernel must be an entry list or exp_decay form");
  }
  return spec;
}

PerturbationSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open spec file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError("spec parse error in " + path + ": " + e.what());
  }
  return spec_from_json(j);
}

void save_spec(const PerturbationSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write spec file: " + path);
  out << spec_to_json(spec).dump(2) << "\n";
}

SpecProfile profile_from_string(const std::string& name) {
  if (name == "selfadjoint") return SpecProfile::Selfadjoint;
  if (name == "nonselfadjoint") return SpecProfile::Nonselfadjoint;
  if (name == "rank_one") return SpecProfile::RankOne;
  if (name == "fibered") return SpecProfile::Fibered;
  throw ValidationError("unknown spec profile: " + name);
}

std::string profile_to_string(SpecProfile p) {
  switch (p) {
    case SpecProfile::Selfadjoint: return "selfadjoint";
    case SpecProfile::Nonselfadjoint: return "nonselfadjoint";
    case SpecProfile::RankOne: return "rank_one";
    case SpecProfile::Fibered: return "fibered";
  }
  return "";
}

namespace {

// Operator norm of the lambda-free singular block; near-threshold
// characteristic values sit at |lambda| below it, so generated kernels are
// scaled to keep them an order of magnitude inside the default scan hole
// [0.02, ...].
double singular_block_radius(const PerturbationSpec& spec) {
  const LatticeWindow win(30, spec.fiber_dim);
  const SurfacePoint probe(Complex(0.0, 0.1), Threshold::Zero);
  const BSOperator op = assemble_bs(spec, probe, BSVariant::AtZero, win, true);
  return op.split->singular.operatorNorm();
}

void calibrate(PerturbationSpec& spec, double target) {
  spec.bound = verify_assumption(spec).sup_ratio * (1.0 + 1e-9);
  const double rho = singular_block_radius(spec);
  if (rho > 0.0) {
    const double scale = target / rho;
    for (auto& e : spec.kernel.entries) e.w *= scale;
    spec.bound *= scale;
  }
}

}  // namespace

PerturbationSpec generate_spec(std::uint64_t seed, SpecProfile profile,
                               double gamma, int fiber_dim) {
  if (gamma <= 0.0) throw ValidationError("generate_spec: gamma must be > 0");
  if (fiber_dim < 1) throw ValidationError("generate_spec: fiber_dim must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  PerturbationSpec spec;
  spec.gamma = gamma;
  spec.fiber_dim = fiber_dim;
  spec.factors = GammaFactors::identity();
  spec.lambda1 = CMatrix::Identity(fiber_dim, fiber_dim);
  spec.lambda2 = CMatrix::Identity(fiber_dim, fiber_dim);
  spec.kernel.form = Kernel::Form::List;

  if (profile == SpecProfile::RankOne) {
    const double a = 0.005 + 0.005 * (unit(rng) + 1.0);
    KernelEntry e{0, 0, CMatrix::Identity(fiber_dim, fiber_dim)};
    e.w *= a;
    spec.kernel.entries.push_back(std::move(e));
    spec.bound = a * (1.0 + 1e-9);
    return spec;
  }

  const int box = 3;
  if (profile == SpecProfile::Fibered) {
    // Japanese-bracket fiber envelope with a compact second factor.
    for (int j = 0; j < fiber_dim; ++j)
      spec.lambda2(j, j) = 1.0 / (1.0 + j);
    for (int n = -box; n <= box; ++n) {
      for (int m = -box; m <= box; ++m) {
        CMatrix w(fiber_dim, fiber_dim);
        const double envelope = std::exp(-gamma * (std::abs(n) + std::abs(m)));
        for (int j = 0; j < fiber_dim; ++j)
          for (int k = 0; k < fiber_dim; ++k) {
            const double bracket =
                std::pow(1.0 + j * j + k * k, -1.5);  // beta = 3
            w(j, k) = envelope * bracket * Complex(unit(rng), unit(rng));
          }
        spec.kernel.entries.push_back({n, m, std::move(w)});
      }
    }
    calibrate(spec, 0.004);
    return spec;
  }

  const bool hermitian = profile == SpecProfile::Selfadjoint;
  for (int n = -box; n <= box; ++n) {
    for (int m = -box; m <= box; ++m) {
      if (hermitian && m > n) continue;
      CMatrix w(fiber_dim, fiber_dim);
      const double envelope = std::exp(-gamma * (std::abs(n) + std::abs(m)));
      for (int j = 0; j < fiber_dim; ++j)
        for (int k = 0; k < fiber_dim; ++k)
          w(j, k) = envelope * Complex(unit(rng), unit(rng));
      if (hermitian && n == m) w = 0.5 * (w + w.adjoint()).eval();
      spec.kernel.entries.push_back({n, m, w});
      if (hermitian && m < n)
        spec.kernel.entries.push_back({m, n, w.adjoint()});
    }
  }
  calibrate(spec, 0.004);
  return spec;
}

}  // namespace latres
