#pragma once

// Kernel evaluations <x| exp(-alpha H) |x'> built from the spectral density of
// the regional Green functions:
//   K(x, x'; t)  = int_0^inf exp(-i E t) A(x, x'; E) dE
//   rho(x, x'; beta) = int_0^inf exp(-beta E) A(x, x'; E) dE
// For x, x' both left of the potential the free part is added in closed form
// and only the reflected part goes through quadrature.

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "rectprop/amplitudes.hpp"
#include "rectprop/model.hpp"
#include "rectprop/quadrature.hpp"

namespace rectprop {

struct KernelValue {
  cplx value;
  double error_estimate = 0.0;
  Mode mode = Mode::Thermal;
  std::vector<Warning> warnings;
};

/// Thread-safe memo of amplitude sets keyed by the bit patterns of (E, U, Delta).
class AmplitudeCache {
 public:
  AmplitudeSet get(double E_tilde, const PotentialSpec& pot);
  std::size_t size() const;
  std::size_t hits() const;
  void clear();

 private:
  using Key = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>;
  mutable std::mutex mutex_;
  std::map<Key, AmplitudeSet> store_;
  std::size_t hits_ = 0;
};

/// Free kernels. t may be complex with Re t > 0 or Im t < 0 (t = -i beta gives
/// the free density matrix).
cplx free_propagator_closed(double x_tilde, double xp_tilde, cplx t_tilde);
double free_density_closed(double x_tilde, double xp_tilde, double beta_tilde);

/// Spectral density A(x, x'; E) with the free part removed when both points
/// are left of the potential. Zero for E <= 0 away from bound states.
double scattered_spectral_density(double x_tilde, double xp_tilde, double E_tilde,
                                  const PotentialSpec& pot, AmplitudeCache* cache = nullptr);

/// Real-time propagator. With richardson_levels == 1 the result is the
/// regularised kernel at t - i epsilon_reg, closed-form part included.
KernelValue propagator(const EvaluationPoint& p, const PotentialSpec& pot,
                       const QuadratureOptions& opts = {}, AmplitudeCache* cache = nullptr);

/// Non-normalised thermal density matrix. Covers the positive-energy
/// spectrum; bound states of a well are reported by bound_state_density.
KernelValue density_matrix(const EvaluationPoint& p, const PotentialSpec& pot,
                           const QuadratureOptions& opts = {}, AmplitudeCache* cache = nullptr);

/// Diffusion kernel Q(x, x'; tbar) with U, Delta measured in E_D: the same
/// integral as density_matrix with beta -> tbar.
KernelValue diffusion_kernel(const EvaluationPoint& p, const PotentialSpec& pot,
                             const QuadratureOptions& opts = {}, AmplitudeCache* cache = nullptr);

/// Contribution sum_n phi_n(x) phi_n(x') exp(-beta E_n) of the bound states of
/// a well, with phi_n the normalised eigenfunctions at the roots of d(E).
double bound_state_density(double x_tilde, double xp_tilde, double beta_tilde,
                           const PotentialSpec& pot);

/// Wave packet sampled on a uniform source grid, all nodes left of x = 0.
struct Packet {
  double x0 = 0.0;  // first node
  double h = 0.0;   // spacing
  std::vector<cplx> psi;

  double x(std::size_t j) const noexcept { return x0 + static_cast<double>(j) * h; }
};

/// Gaussian exp(-(x - center)^2 / (4 sigma^2) + i k0 x) normalised on the
/// grid, sampled on [center - width_sigmas sigma, center + width_sigmas sigma].
Packet gaussian_packet(double center, double sigma, double k0, double h,
                       double width_sigmas = 12.0);

struct PacketEvolution {
  std::vector<double> x;
  std::vector<cplx> psi;
  std::vector<double> density;  // |psi|^2
  double error_estimate = 0.0;  // max |psi_n - psi_2n| over the grid
};

/// psi(x, t) = int K(x, x'; t) psi0(x') dx' by the trapezoidal rule in x'.
/// The free part of K uses the closed form; the scattered part is summed over
/// the source first and then integrated over energy on fixed Kronrod nodes.
/// Scattering states only: for a well the bound-state part of psi0 is not
/// propagated. Throws SupportViolation when psi0 is not negligible at its
/// right end or the grid reaches x' >= 0.
PacketEvolution evolve_packet(const Packet& psi0, const std::vector<double>& x_dest, double t_tilde,
                              const PotentialSpec& pot, int energy_panels = 0);

/// Transmission oracle: int |t(k^2)|^2 |phi(k)|^2 dk over k > 0 divided by the
/// full momentum norm, with phi the Fourier transform of psi0.
struct FluxEstimate {
  double transmitted = 0.0;
  double backward_weight = 0.0;  // fraction of |phi|^2 at k < 0
};

FluxEstimate flux_transmission(const Packet& psi0, const PotentialSpec& pot, int k_panels = 64);

enum class SweepParameter { U_tilde, x_tilde, time };

struct SweepSpec {
  Mode mode = Mode::Thermal;
  SweepParameter parameter = SweepParameter::U_tilde;
  double lo = 0.0;
  double hi = 1.0;
  int samples = 2;
  EvaluationPoint fixed;
  PotentialSpec pot;
  // Optional second axis; rows are ordered with the inner axis fastest.
  std::optional<SweepParameter> inner_parameter;
  double inner_lo = 0.0;
  double inner_hi = 1.0;
  int inner_samples = 2;

  void validate() const;
};

struct SweepRow {
  double parameter = 0.0;
  double inner = 0.0;
  EvaluationPoint point;
  PotentialSpec pot;
  std::optional<KernelValue> value;
  std::string error;
};

/// Evaluates every row; failures are recorded and do not stop the sweep.
/// Rows come back in grid order whatever the number of worker threads.
std::vector<SweepRow> sweep(const SweepSpec& spec, const QuadratureOptions& opts = {},
                            unsigned threads = 0);

/// Figure presets 1..6: the resonance and coherence sweeps (1-4) and the
/// diffusion profiles (5, 6).
SweepSpec figure_preset(int figure);

KernelValue evaluate(const EvaluationPoint& p, const PotentialSpec& pot,
                     const QuadratureOptions& opts = {}, AmplitudeCache* cache = nullptr);

}  // namespace rectprop
