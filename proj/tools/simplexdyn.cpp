#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "simplexdyn/cli.hpp"

namespace cli = simplexdyn::cli;

namespace {

void add_common(CLI::App* sub, cli::Common& common) {
  sub->add_option("--config", common.config_path, "Model configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", common.out_path, "Output file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate nonlinear Markov chains on the simplex and certify their stability"};
  app.require_subcommand(1);

  cli::SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Iterate the map and write the trajectory as CSV");
  add_common(simulate, sim.common);
  simulate->add_option("--p0", sim.p0, "Initial point: uniform, vertex:i or comma-separated entries");
  simulate->add_option("--steps", sim.steps, "Number of steps");

  cli::FixedPointsArgs fps;
  auto* fixed = app.add_subcommand("fixed-points", "Locate fixed points and certify each one locally");
  add_common(fixed, fps.common);
  fixed->add_option("--strategy", fps.strategy, "auto, kappa, multistart, closed-form or grouping");
  fixed->add_option("--starts", fps.starts, "Number of multistart seeds");

  cli::CertifyArgs cert;
  auto* certify = app.add_subcommand("certify", "Certify a fixed point, an orbit or global attraction");
  add_common(certify, cert.common);
  certify->add_option("--target", cert.target, "point, orbit or global");
  certify->add_option("--point", cert.point, "Fixed point to certify (comma-separated)");
  certify->add_option("--orbit-file", cert.orbit_file, "JSON file holding the orbit points");
  certify->add_option("--max-order", cert.max_order, "Largest iterate order tried");
  certify->add_option("--grid-density", cert.grid_density, "Barycentric grid density for sampled checks");

  cli::SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Scan gamma and report fixed points, gains and verdicts");
  add_common(sweep, sw.common);
  sweep->add_option("--gamma", sw.gamma_range, "Range a:b:step")->required();
  sweep->add_option("--starts", sw.starts, "Number of multistart seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  std::optional<std::string> tol_override;
  if (const char* env = std::getenv("SIMPLEXDYN_TOL_OVERRIDE"); env && *env) tol_override = env;
  for (auto* c : {&sim.common, &fps.common, &cert.common, &sw.common}) c->tolerance_override = tol_override;

  if (simulate->parsed()) return cli::cmd_simulate(sim, std::cout, std::cerr);
  if (fixed->parsed()) return cli::cmd_fixed_points(fps, std::cout, std::cerr);
  if (certify->parsed()) return cli::cmd_certify(cert, std::cout, std::cerr);
  return cli::cmd_sweep(sw, std::cout, std::cerr);
}
