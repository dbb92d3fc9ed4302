// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <iostream>

#include "latres/runner.hpp"

using namespace latres;

int main(int argc, char** argv) {
  CLI::App app{"latres: lattice resonance engine"};
  app.require_subcommand(1);

  ExperimentConfig cfg;

  auto add_common = [&](CLI::App* sub, bool needs_spec) {
    if (needs_spec)
      sub->add_option("--spec", cfg.spec_path, "perturbation spec JSON")->required();
    sub->add_option("--output-dir", cfg.output_dir, "artifact directory");
    sub->add_option("--seed", cfg.seed, "seed for randomized generation");
  };

  auto* verify = app.add_subcommand("verify", "check a spec against its assumptions");
  add_common(verify, true);

  auto* kernel = app.add_subcommand("kernel", "dump the weighted kernel table");
  add_common(kernel, true);
  kernel->add_option("--lambda-re", cfg.lambda_re);
  kernel->add_option("--lambda-im", cfg.lambda_im);
  kernel->add_option("--window", cfg.window);
  kernel->add_option("--threshold", cfg.threshold)->check(CLI::IsMember({0, 4}));

  auto* bs = app.add_subcommand("bs-dump", "dump the sandwiched operator matrix");
  add_common(bs, true);
  bs->add_option("--lambda-re", cfg.lambda_re);
  bs->add_option("--lambda-im", cfg.lambda_im);
  bs->add_option("--window", cfg.window);
  bs->add_option("--threshold", cfg.threshold)->check(CLI::IsMember({0, 4}));

  auto* res = app.add_subcommand("resonances", "characteristic-value scan on an annulus");
  add_common(res, true);
  res->add_option("--threshold", cfg.threshold)->check(CLI::IsMember({0, 4}));
  res->add_option("--rmin", cfg.r_min);
  res->add_option("--rmax", cfg.r_max);
  res->add_option("--window", cfg.window);
  res->add_option("--nodes", cfg.nodes);
  res->add_option("--min-sep", cfg.min_sep);
  res->add_option("--eps0", cfg.continuation_radius,
                  "continuation radius; raise for the enlarged-annulus mode");

  auto* sc = app.add_subcommand("scaling", "deformed spectrum on the angular grid");
  add_common(sc, true);
  sc->add_option("--theta-re", cfg.theta_re);
  sc->add_option("--theta-im", cfg.theta_im);
  sc->add_option("--grid", cfg.grid);

  auto* spm = app.add_subcommand("spectrum", "window eigenvalues and stable discrete points");
  add_common(spm, true);
  spm->add_option("--window", cfg.window);

  auto* lap = app.add_subcommand("lap", "boundary matrix elements over an epsilon ladder");
  add_common(lap, true);
  lap->add_option("--elo", cfg.e_lo);
  lap->add_option("--ehi", cfg.e_hi);
  lap->add_option("--phi", cfg.phi_site);
  lap->add_option("--psi", cfg.psi_site);
  lap->add_option("--eps", cfg.eps_ladder, "epsilon ladder values");
  lap->add_option("--window", cfg.window);

  auto* xc = app.add_subcommand("xcheck", "cross-compare scan, scaling and eigensolve");
  add_common(xc, true);
  xc->add_option("--rmin", cfg.r_min);
  xc->add_option("--rmax", cfg.r_max);
  xc->add_option("--window", cfg.window);
  xc->add_option("--nodes", cfg.nodes);
  xc->add_option("--grid", cfg.grid);
  xc->add_option("--theta-re", cfg.theta_re);
  xc->add_option("--theta-im", cfg.theta_im);
  xc->add_option("--eps0", cfg.continuation_radius);

  auto* gen = app.add_subcommand("generate", "write a reproducible random spec");
  add_common(gen, false);
  gen->add_option("--profile", cfg.profile)
      ->check(CLI::IsMember({"selfadjoint", "nonselfadjoint", "rank_one", "fibered"}));
  gen->add_option("--gamma", cfg.gamma);
  gen->add_option("--fiber-dim", cfg.fiber_dim);

  CLI11_PARSE(app, argc, argv);
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    run(cfg);
  } catch (const ValidationError& e) {
    Json err = {{"error", {{"type", "validation"}, {"message", e.what()}}}};
    std::cerr << err.dump() << std::endl;
    return 2;
  } catch (const NumericalError& e) {
    Json err = {{"error", {{"type", "numerical"}, {"message", e.what()}}}};
    std::cerr << err.dump() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    Json err = {{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cerr << err.dump() << std::endl;
    return 3;
  }
  return 0;
}
