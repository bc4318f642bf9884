#pragma once

// Brute-force reference: H = -d^2/dx^2 + V on a hard-wall box [-L, L] with
// N interior nodes, x_j = -L + j h, h = 2L / (N + 1). Imaginary-time kernels
// come from the eigenpairs of the tridiagonal matrix, real-time ones from
// Crank-Nicolson stepping.

#include <complex>
#include <functional>
#include <vector>

#include "rectprop/model.hpp"
#include "rectprop/quadrature.hpp"

namespace rectprop {

struct GridSpec {
  double L = 40.0;
  int N = 7999;  // h = 0.01 with the default L, so x = 0 and x = 1 are nodes

  void validate() const;
  double h() const noexcept { return 2.0 * L / (N + 1); }
  double x(int j) const noexcept { return -L + (j + 1) * h(); }  // j = 0 .. N-1
  int nearest(double x_tilde) const noexcept;

  /// Same box, h halved (N -> 2N + 1), so every old node stays a node.
  GridSpec refined() const noexcept { return {L, 2 * N + 1}; }
};

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // size N - 1
};

/// Central-difference kinetic term plus sampled V; symmetric.
Tridiagonal grid_hamiltonian(const GridSpec& grid, const PotentialSpec& pot);

struct ThermalOracle {
  double continuum = 0.0;  // states with E_n > 0
  double bound = 0.0;      // states with E_n < 0
  double total = 0.0;
  double x_snapped = 0.0;
  double xp_snapped = 0.0;
  double snap_offset = 0.0;  // max distance from requested points to nodes
  int states = 0;            // eigenpairs kept
  int bound_states = 0;
  double boundary_weight = 0.0;  // relative kernel weight one unit from the walls
};

/// sum_n phi_n(x) exp(-beta E_n) phi_n(x') / h over eigenpairs with
/// exp(-beta E_n) >= 1e-16 (relative to E = 0 for the continuum part).
/// Throws BoxTooSmall if the kernel from x or x' to the nodes one unit inside
/// either wall exceeds 1e-8 of max(rho(x, x), rho(x', x')), after removing
/// the rounding floor of the eigenvectors.
ThermalOracle thermal_kernel_oracle(const GridSpec& grid, const PotentialSpec& pot,
                                    double beta_tilde, double x_tilde, double xp_tilde);

/// Richardson combination (4 rho_{h/2} - rho_h) / 3 of two oracle runs; the
/// diagnostics are those of the fine grid.
struct ExtrapolatedOracle {
  ThermalOracle coarse;
  ThermalOracle fine;
  double continuum = 0.0;
  double bound = 0.0;
  double total = 0.0;
  double h_change = 0.0;  // |fine - coarse| of the continuum part
};

ExtrapolatedOracle thermal_kernel_extrapolated(const GridSpec& grid, const PotentialSpec& pot,
                                               double beta_tilde, double x_tilde, double xp_tilde);

/// sum_j h rho_{beta/2}(x, x_j) rho_{beta/2}(x_j, x') from the same eigenpairs,
/// all states included.
double semigroup_composition(const GridSpec& grid, const PotentialSpec& pot, double beta_tilde,
                             double x_tilde, double xp_tilde);

std::vector<std::complex<double>> sample_on_grid(
    const GridSpec& grid, const std::function<std::complex<double>(double)>& f);

/// Crank-Nicolson evolution of grid samples over real time t with step
/// <= h^2 / 2. Throws BoxTooSmall if |psi| within one unit of a wall exceeds
/// 1e-8 of its peak at the end of the run.
std::vector<std::complex<double>> realtime_oracle(const GridSpec& grid, const PotentialSpec& pot,
                                                  double t_tilde,
                                                  std::vector<std::complex<double>> psi0);

/// Crank-Nicolson in imaginary time: exp(-tau H) psi0.
std::vector<std::complex<double>> imaginary_time_oracle(const GridSpec& grid,
                                                        const PotentialSpec& pot, double tau,
                                                        std::vector<std::complex<double>> psi0);

/// K(x, x'; t - i eps): a delta at x' smoothed by imaginary-time evolution
/// over eps, then propagated over t and read at x.
std::complex<double> regularized_kernel_oracle(const GridSpec& grid, const PotentialSpec& pot,
                                               double x_tilde, double xp_tilde, double t_tilde,
                                               double epsilon);

struct PointPair {
  double x = 0.0;
  double xp = 0.0;
};

/// Twelve (x, x') pairs, four per destination region, all sources left.
std::vector<PointPair> standard_pairs();

struct OracleComparison {
  PotentialSpec pot;
  PointPair pair;
  double engine = 0.0;
  double engine_error = 0.0;
  double engine_bound = 0.0;  // closed-form bound-state term, wells only
  double oracle_continuum = 0.0;
  double oracle_bound = 0.0;
  double oracle_h_change = 0.0;
  double snap_offset = 0.0;
  double difference = 0.0;  // |engine - oracle_continuum|
  double scale = 0.0;       // max |oracle_continuum| over the potential's pairs
  bool passed = false;
};

/// Engine density matrix against the extrapolated oracle on standard_pairs()
/// for U in {-30, 10}, Delta in {0, 5}. Pass: difference <= tol * scale.
std::vector<OracleComparison> compare_standard_suite(double beta_tilde, const GridSpec& grid = {},
                                                     const QuadratureOptions& opts = {},
                                                     double tol = 1e-3);

}  // namespace rectprop
