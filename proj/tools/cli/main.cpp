#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "run_config.hpp"

using rectprop::cli::ConfigError;
using rectprop::cli::RunConfig;

int main(int argc, char** argv) {
  RunConfig cfg;
  std::string mode;

  CLI::App app{"Exact kernels <x|exp(-alpha H)|x'> for a rectangular potential"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.add_option("mode", mode,
                 "propagate | density | diffuse | evolve | sweep | oracle-compare | amplitudes")
      ->required();

  app.add_option("--U", cfg.U, "potential inside 0 < x < 1 (units of E_d)");
  app.add_option("--Delta", cfg.Delta, "potential for x > 1, >= 0");
  app.add_option("--x", cfg.x, "destination x / d");
  app.add_option("--xp", cfg.xp, "source x' / d");
  app.add_option("--t", cfg.t, "real time (units of hbar / E_d)");
  app.add_option("--beta", cfg.beta, "E_d / k_B T");
  app.add_option("--tbar", cfg.tbar, "t / t_D");

  app.add_option("--figure", cfg.figure, "sweep preset 1..6");
  app.add_option("--kernel", cfg.sweep_kernel, "custom sweep: propagate | density | diffuse");
  app.add_option("--param", cfg.sweep_param, "custom sweep axis: U | x | time");
  app.add_option("--lo", cfg.lo);
  app.add_option("--hi", cfg.hi);
  app.add_option("--samples", cfg.samples);
  app.add_option("--threads", cfg.threads, "sweep workers, 0 = hardware concurrency");

  app.add_option("--x0", cfg.x0, "packet centre");
  app.add_option("--sigma", cfg.sigma, "packet width");
  app.add_option("--k0", cfg.k0, "packet mean wave number");
  app.add_option("--packet-h", cfg.packet_h, "packet sampling step");
  app.add_option("--x-lo", cfg.x_lo);
  app.add_option("--x-hi", cfg.x_hi);
  app.add_option("--dx", cfg.dx);

  app.add_option("--E-lo", cfg.E_lo);
  app.add_option("--E-hi", cfg.E_hi);

  app.add_option("--suite", cfg.suite, "oracle-compare test set");
  app.add_option("--L", cfg.grid.L, "oracle box half-width");
  app.add_option("--N", cfg.grid.N, "oracle interior nodes");

  app.add_option("--rel-tol", cfg.quad.rel_tol);
  app.add_option("--abs-tol", cfg.quad.abs_tol);
  app.add_option("--emax-factor", cfg.quad.E_max_factor);
  app.add_option("--epsilon", cfg.quad.epsilon_reg, "real-time regularisation");
  app.add_option("--richardson-levels", cfg.quad.richardson_levels);
  app.add_option("--max-subdivisions", cfg.quad.max_subdivisions);

  app.add_option("-o,--output", cfg.output, "CSV path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cfg.mode = rectprop::cli::parse_mode(mode);
    int status = 0;
    if (cfg.output == "-") {
      status = rectprop::cli::run(cfg, std::cout);
    } else {
      rectprop::cli::validate(cfg);
      std::ofstream file(cfg.output, std::ios::binary);
      if (!file) throw ConfigError("output: cannot open '" + cfg.output + "' for writing");
      status = rectprop::cli::run(cfg, file);
    }
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
