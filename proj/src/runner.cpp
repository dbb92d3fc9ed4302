// SPDX-License-Identifier: Apache-2.0
#include "latres/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "latres/charval.hpp"
#include "latres/eig.hpp"
#include "latres/lattice.hpp"
#include "latres/scaling.hpp"

namespace latres {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
  static const std::vector<std::string> known = {
      "spectrum", "resonances", "scaling",  "lap",    "kernel",
      "verify",   "xcheck",     "generate", "bs-dump"};
  if (std::find(known.begin(), known.end(), command) == known.end())
    throw ValidationError("unknown command: " + command);
  if (command != "generate" && spec_path.empty())
    throw ValidationError("missing --spec path");
  if (window < 1) throw ValidationError("window must be >= 1");
  if (threshold != 0 && threshold != 4)
    throw ValidationError("threshold must be 0 or 4");
  if (command == "resonances" && !(0.0 < r_min && r_min < r_max))
    throw ValidationError("need 0 < rmin < rmax");
  if (command == "lap") {
    if (!(0.0 < e_lo && e_lo < e_hi && e_hi < 4.0))
      throw ValidationError("lap interval must sit inside (0,4)");
    for (double e : eps_ladder)
      if (e <= 0.0) throw ValidationError("epsilon ladder must be positive");
  }
}

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["command"] = c.command;
  j["spec_path"] = c.spec_path;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["window"] = c.window;
  j["grid"] = c.grid;
  j["nodes"] = c.nodes;
  j["threshold"] = c.threshold;
  j["r_min"] = c.r_min;
  j["r_max"] = c.r_max;
  j["min_sep"] = c.min_sep;
  j["continuation_radius"] = c.continuation_radius;
  j["theta_re"] = c.theta_re;
  j["theta_im"] = c.theta_im;
  j["e_lo"] = c.e_lo;
  j["e_hi"] = c.e_hi;
  j["phi_site"] = c.phi_site;
  j["psi_site"] = c.psi_site;
  j["eps_ladder"] = c.eps_ladder;
  j["lambda_re"] = c.lambda_re;
  j["lambda_im"] = c.lambda_im;
  j["gamma"] = c.gamma;
  j["profile"] = c.profile;
  j["fiber_dim"] = c.fiber_dim;
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  c.command = j.at("command").get<std::string>();
  c.spec_path = j.value("spec_path", std::string());
  c.output_dir = j.value("output_dir", std::string("."));
  c.seed = j.value("seed", std::uint64_t{1});
  c.window = j.value("window", defaults::kWindow);
  c.grid = j.value("grid", defaults::kGrid);
  c.nodes = j.value("nodes", defaults::kContourNodes);
  c.threshold = j.value("threshold", 0);
  c.r_min = j.value("r_min", 0.02);
  c.r_max = j.value("r_max", 0.2);
  c.min_sep = j.value("min_sep", defaults::kMinSeparation);
  c.continuation_radius =
      j.value("continuation_radius", defaults::kContinuationRadius);
  c.theta_re = j.value("theta_re", 0.0);
  c.theta_im = j.value("theta_im", 0.05);
  c.e_lo = j.value("e_lo", 1.0);
  c.e_hi = j.value("e_hi", 3.0);
  c.phi_site = j.value("phi_site", 0);
  c.psi_site = j.value("psi_site", 0);
  if (j.contains("eps_ladder"))
    c.eps_ladder = j.at("eps_ladder").get<std::vector<double>>();
  c.lambda_re = j.value("lambda_re", 0.1);
  c.lambda_im = j.value("lambda_im", 0.1);
  c.gamma = j.value("gamma", 1.0);
  c.profile = j.value("profile", std::string("selfadjoint"));
  c.fiber_dim = j.value("fiber_dim", 1);
  return c;
}

std::string config_hash(const ExperimentConfig& c) {
  const std::string dump = config_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : dump) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << contents;
  }
  fs::rename(tmp, target);
}

namespace {

std::string sheet_name(Sheet s) {
  return s == Sheet::Physical ? "physical" : "nonphysical";
}

Json scan_to_json(const ScanResult& scan) {
  Json records = Json::array();
  for (const auto& r : scan.records)
    records.push_back({{"lambda", complex_to_json(r.lambda)},
                       {"energy", complex_to_json(r.energy)},
                       {"mult", r.multiplicity},
                       {"sheet", sheet_name(r.sheet)}});
  Json j;
  j["records"] = records;
  j["top_cell_indices"] = scan.top_cell_indices;
  j["total_index"] = scan.total_index;
  return j;
}

std::string scan_to_csv(const ScanResult& scan) {
  std::ostringstream csv;
  csv << "lambda_re,lambda_im,energy_re,energy_im,mult,sheet\n";
  csv.precision(17);
  for (const auto& r : scan.records)
    csv << r.lambda.real() << ',' << r.lambda.imag() << ','
        << r.energy.real() << ',' << r.energy.imag() << ','
        << r.multiplicity << ',' << sheet_name(r.sheet) << '\n';
  return csv.str();
}

struct CommandOutput {
  Json payload;
  std::vector<std::pair<std::string, std::string>> extra_files;  // name, contents
};

CommandOutput cmd_verify(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = load_spec(cfg.spec_path);
  const AssumptionReport rep = verify_assumption(spec);
  Json j;
  j["pass"] = rep.pass;
  j["sup_ratio"] = rep.sup_ratio;
  j["bound"] = rep.bound;
  j["fiber_rank"] = rep.fiber_rank;
  j["rank_threshold"] = rep.rank_threshold;
  j["factors_diagonal"] = rep.factors_diagonal;
  j["decay_ok"] = rep.decay_ok;
  Json viol = Json::array();
  for (const auto& v : rep.violations)
    viol.push_back({{"n", v.n}, {"m", v.m}, {"ratio", v.ratio}});
  j["violations"] = viol;
  return {j, {}};
}

CommandOutput cmd_kernel(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = load_spec(cfg.spec_path);
  const Complex lambda(cfg.lambda_re, cfg.lambda_im);
  const SurfacePoint p(lambda, cfg.threshold == 0 ? Threshold::Zero : Threshold::Four,
                       1.999);
  const LatticeWindow win(cfg.window, 1);
  const CMatrix g = weighted_green(p, spec.gamma, win);

  std::ostringstream csv;
  csv << "n,m,re,im\n";
  csv.precision(17);
  const int N = win.half_width();
  for (int n = -N; n <= N; ++n)
    for (int m = -N; m <= N; ++m) {
      const Complex v = g(win.index(n), win.index(m));
      csv << n << ',' << m << ',' << v.real() << ',' << v.imag() << '\n';
    }
  Json j;
  j["lambda"] = complex_to_json(lambda);
  j["window"] = cfg.window;
  j["gamma"] = spec.gamma;
  j["entries"] = win.dim() * win.dim();
  return {j, {{"kernel.csv", csv.str()}}};
}

CommandOutput cmd_bs_dump(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = load_spec(cfg.spec_path);
  const Complex lambda(cfg.lambda_re, cfg.lambda_im);
  const Threshold thr = cfg.threshold == 0 ? Threshold::Zero : Threshold::Four;
  const BSVariant variant =
      thr == Threshold::Zero ? BSVariant::AtZero : BSVariant::AtFour;
  const SurfacePoint p(lambda, thr, 1.999);
  const LatticeWindow win(cfg.window, spec.fiber_dim);
  const BSOperator op = assemble_bs(spec, p, variant, win);

  std::ostringstream csv;
  csv << "row,col,re,im\n";
  csv.precision(17);
  for (Eigen::Index r = 0; r < op.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < op.matrix.cols(); ++c)
      csv << r << ',' << c << ',' << op.matrix(r, c).real() << ','
          << op.matrix(r, c).imag() << '\n';
  Json j;
  j["lambda"] = complex_to_json(lambda);
  j["threshold"] = cfg.threshold;
  j["dim"] = op.matrix.rows();
  return {j, {{"bs.csv", csv.str()}}};
}

CommandOutput cmd_resonances(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = load_spec(cfg.spec_path);
  ScanOptions opts;
  opts.window = cfg.window;
  opts.nodes = cfg.nodes;
  opts.min_sep = cfg.min_sep;
  opts.continuation_radius = cfg.continuation_radius;
  const ScanResult scan = resonance_scan(
      spec, cfg.threshold == 0 ? Threshold::Zero : Threshold::Four, cfg.r_min,
      cfg.r_max, opts);
  return {scan_to_json(scan), {{"resonances.csv", scan_to_csv(scan)}}};
}

CommandOutput cmd_scaling(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = load_spec(cfg.spec_path);
  const Complex theta(cfg.theta_re, cfg.theta_im);
  const FourierGrid grid(cfg.grid);
  const ScaledSpectrum sp = scaled_spectrum(spec, theta, grid);

  std::ostringstream arc_csv, disc_csv;
  arc_csv << "re,im\n";
  disc_csv << "re,im\n";
  arc_csv.precision(17);
  disc_csv.precision(17);
  for (const auto& z : sp.arc) arc_csv << z.real() << ',' << z.imag() << '\n';
  for (const auto& z : sp.discrete)
    disc_csv << z.real() << ',' << z.imag() << '\n';

  Json j;
  j["theta"] = complex_to_json(theta);
  j["grid"] = cfg.grid;
  j["arc_threshold"] = sp.arc_threshold;
  Json disc = Json::array();
  for (const auto& z : sp.discrete) disc.push_back(complex_to_json(z));
  j["discrete"] = disc;
  j["arc_count"] = sp.arc.size();
  return {j, {{"arc.csv", arc_csv.str()}, {"discrete.csv", disc_csv.str()}}};
}

CommandOutput cmd_spectrum(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = load_spec(cfg.spec_path);
  const SpectrumReport rep =
      discrete_spectrum(spec, {cfg.window / 2, cfg.window});

  std::ostringstream csv;
  csv << "re,im,window,stable\n";
  csv.precision(17);
  for (const auto& w : rep.windows) {
    for (const auto& z : w.values) {
      bool stable = false;
      if (w.window == rep.windows.back().window)
        for (const auto& s : rep.stable_discrete)
          if (std::abs(s.value - z) < 1e-12) stable = true;
      csv << z.real() << ',' << z.imag() << ',' << w.window << ','
          << (stable ? 1 : 0) << '\n';
    }
  }
  Json j;
  Json stable = Json::array();
  for (const auto& s : rep.stable_discrete)
    stable.push_back({{"value", complex_to_json(s.value)}, {"drift", s.drift}});
  j["stable_discrete"] = stable;
  j["windows"] = Json::array();
  for (const auto& w : rep.windows) j["windows"].push_back(w.window);
  j["band_threshold"] = rep.band_threshold;
  return {j, {{"spectrum.csv", csv.str()}}};
}

CommandOutput cmd_lap(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = load_spec(cfg.spec_path);
  const LapTable table =
      lap_check(spec, cfg.e_lo, cfg.e_hi, cfg.phi_site, cfg.psi_site,
                cfg.eps_ladder, cfg.window);
  std::ostringstream csv;
  csv << "energy,eps,sign,value,clean\n";
  csv.precision(17);
  for (const auto& s : table.samples)
    csv << s.energy << ',' << s.eps << ',' << s.sign << ',' << s.value << ','
        << (s.clean ? 1 : 0) << '\n';
  Json j;
  j["bounded"] = table.bounded;
  j["epsilons"] = table.epsilons;
  j["max_upper"] = table.max_upper;
  j["max_lower"] = table.max_lower;
  j["candidate_energies"] = table.candidate_energies;
  return {j, {{"lap.csv", csv.str()}}};
}

CommandOutput cmd_xcheck(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = load_spec(cfg.spec_path);
  ScanOptions opts;
  opts.window = cfg.window;
  opts.nodes = cfg.nodes;
  opts.min_sep = cfg.min_sep;
  opts.continuation_radius = cfg.continuation_radius;

  std::vector<ResonanceRecord> records;
  for (Threshold thr : {Threshold::Zero, Threshold::Four}) {
    const ScanResult scan =
        resonance_scan(spec, thr, cfg.r_min, cfg.r_max, opts);
    records.insert(records.end(), scan.records.begin(), scan.records.end());
  }

  const FourierGrid grid(cfg.grid);
  const ScaledSpectrum sp =
      scaled_spectrum(spec, Complex(cfg.theta_re, cfg.theta_im), grid);
  const SpectrumReport eig = discrete_spectrum(spec, {cfg.window / 2, cfg.window});

  Json rows = Json::array();
  std::ostringstream csv;
  csv << "energy_re,energy_im,mult,sheet,scaled_dist,eig_dist\n";
  csv.precision(17);
  for (const auto& r : records) {
    double scaled_dist = 1e300, eig_dist = 1e300;
    for (const auto& z : sp.discrete)
      scaled_dist = std::min(scaled_dist, std::abs(z - r.energy));
    for (const auto& s : eig.stable_discrete)
      eig_dist = std::min(eig_dist, std::abs(s.value - r.energy));
    rows.push_back({{"energy", complex_to_json(r.energy)},
                    {"mult", r.multiplicity},
                    {"sheet", sheet_name(r.sheet)},
                    {"scaled_dist", scaled_dist},
                    {"eig_dist", eig_dist}});
    csv << r.energy.real() << ',' << r.energy.imag() << ',' << r.multiplicity
        << ',' << sheet_name(r.sheet) << ',' << scaled_dist << ',' << eig_dist
        << '\n';
  }
  Json j;
  j["matches"] = rows;
  Json scaled = Json::array();
  for (const auto& z : sp.discrete) scaled.push_back(complex_to_json(z));
  j["scaled_discrete"] = scaled;
  Json stable = Json::array();
  for (const auto& s : eig.stable_discrete)
    stable.push_back(complex_to_json(s.value));
  j["eig_stable"] = stable;
  return {j, {{"xcheck.csv", csv.str()}}};
}

CommandOutput cmd_generate(const ExperimentConfig& cfg) {
  const PerturbationSpec spec = generate_spec(
      cfg.seed, profile_from_string(cfg.profile), cfg.gamma, cfg.fiber_dim);
  const Json doc = spec_to_json(spec);
  Json j;
  j["profile"] = cfg.profile;
  j["seed"] = cfg.seed;
  j["spec"] = doc;
  return {j, {{"generated_spec.json", doc.dump(2) + "\n"}}};
}

}  // namespace

Json run(const ExperimentConfig& config) {
  config.validate();
  if (config.command != "generate" && config.command != "verify") {
    // Inputs must satisfy the structural assumptions before any dispatch.
    const PerturbationSpec spec = load_spec(config.spec_path);
    const AssumptionReport rep = verify_assumption(spec);
    if (!rep.pass)
      throw ValidationError("spec fails its assumption check; run `verify` for a report");
  }

  CommandOutput out;
  if (config.command == "verify") out = cmd_verify(config);
  else if (config.command == "kernel") out = cmd_kernel(config);
  else if (config.command == "resonances") out = cmd_resonances(config);
  else if (config.command == "scaling") out = cmd_scaling(config);
  else if (config.command == "spectrum") out = cmd_spectrum(config);
  else if (config.command == "lap") out = cmd_lap(config);
  else if (config.command == "xcheck") out = cmd_xcheck(config);
  else if (config.command == "generate") out = cmd_generate(config);
  else if (config.command == "bs-dump") out = cmd_bs_dump(config);

  Json doc;
  doc["engine_version"] = kEngineVersion;
  doc["config_hash"] = config_hash(config);
  doc["config"] = config_to_json(config);
  doc["payload"] = out.payload;
  doc["timestamp"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();

  fs::create_directories(config.output_dir);
  const std::string base = config.command == "bs-dump" ? "bs" : config.command;
  write_file_atomic((fs::path(config.output_dir) / (base + ".json")).string(),
                    doc.dump(2) + "\n");
  for (const auto& [name, contents] : out.extra_files)
    write_file_atomic((fs::path(config.output_dir) / name).string(), contents);
  return doc;
}

}  // namespace latres
