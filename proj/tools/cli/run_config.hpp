#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rectprop/engines.hpp"
#include "rectprop/oracle.hpp"
#include "rectprop/quadrature.hpp"

namespace rectprop::cli {

enum class RunMode { Propagate, Density, Diffuse, Evolve, Sweep, OracleCompare, Amplitudes };

struct RunConfig {
  RunMode mode = RunMode::Density;
  double U = 0.0;
  double Delta = 0.0;
  double x = -2.0;
  double xp = -2.0;
  double t = 1.0;
  double beta = 10.0;
  double tbar = 1.0;

  // sweep: a figure preset, or an explicit one-axis sweep
  int figure = 0;
  std::string sweep_kernel = "density";
  std::string sweep_param = "U";
  double lo = 0.0;
  double hi = 1.0;
  int samples = 2;
  unsigned threads = 0;

  // evolve: Gaussian packet and destination grid
  double x0 = -24.0;
  double sigma = 2.0;
  double k0 = 2.2360679774997898;
  double packet_h = 0.01;
  double x_lo = -60.0;
  double x_hi = 60.0;
  double dx = 0.05;

  // amplitudes
  double E_lo = 0.1;
  double E_hi = 50.0;

  // oracle-compare
  std::string suite = "standard";
  GridSpec grid;

  QuadratureOptions quad;
  std::string output = "-";
};

/// Raised for configuration problems; the CLI maps it to exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunMode parse_mode(const std::string& name);
std::string_view mode_name(RunMode m) noexcept;

/// Field-level checks beyond what the parser enforces.
void validate(const RunConfig& cfg);

/// Writes the CSV for cfg to out. Returns 0 on full success, 2 if any row
/// failed. Throws ConfigError for invalid configurations.
int run(const RunConfig& cfg, std::ostream& out);

/// "%.16e", the CSV number format.
std::string format_number(double v);

}  // namespace rectprop::cli
