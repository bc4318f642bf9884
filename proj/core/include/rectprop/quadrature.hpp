#pragma once

// Energy quadrature for spectral integrals of the form
//   int_0^inf f(E) dE
// where f carries either an exp(-beta E) damping factor (imaginary time) or
// an exp(-i E t) phase (real time). Panels are integrated with a 21-point
// Gauss-Kronrod rule and refined globally by largest error.

#include <complex>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "rectprop/model.hpp"

namespace rectprop {

using cplx = std::complex<double>;
using Integrand = std::function<cplx(double)>;

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double E_max_factor = 60.0;   // cutoff E_max = factor / (damping rate)
  double epsilon_reg = 1e-2;    // complex-time shift t -> t - i eps
  int richardson_levels = 3;    // eps, eps/2, eps/4, ...
  int max_subdivisions = 2000;  // bisections beyond the initial partition

  void validate() const;
};

enum class Warning { NearPole, ToleranceNotMet };

std::string_view to_string(Warning w) noexcept;

struct IntegralResult {
  cplx value;
  double error_estimate = 0.0;
  long evaluations = 0;
  std::vector<Warning> warnings;
};

/// Change of variable on a panel, E = E(s):
///   Linear        E = s
///   SqrtFromLeft  E = anchor + s^2   (integrable sqrt behaviour at anchor)
///   SqrtFromRight E = anchor - s^2
///   Root          E = s^2
enum class PanelMap { Linear, SqrtFromLeft, SqrtFromRight, Root };

struct Panel {
  double s0 = 0.0;
  double s1 = 0.0;
  PanelMap map = PanelMap::Linear;
  double anchor = 0.0;
};

/// Panels covering [a, b] in E, split into n equal pieces of the mapped
/// variable.
std::vector<Panel> make_panels(double a, double b, PanelMap map, int n);

/// Globally adaptive Gauss-Kronrod over a fixed initial partition. Panels are
/// refined one at a time in a deterministic order and summed left to right,
/// so identical inputs give bit-identical output.
/// Throws NoConvergence once max_subdivisions bisections are spent.
IntegralResult integrate_panels(const Integrand& f, std::vector<Panel> panels,
                                const QuadratureOptions& opts);

/// Appends panels covering [a, b]. Pieces that start at E = 0 or touch
/// E = Delta get a square-root map so the sqrt-type behaviour there is
/// absorbed; a piece with both ends singular is split in half first.
void append_threshold_panels(std::vector<Panel>& out, double a, double b, const PotentialSpec& pot,
                             int n);

/// Points where the integrand is not smooth or must be avoided: Delta (> 0),
/// U (> 0) and |U| for wells. Sorted, positive, unique.
std::vector<double> energy_breakpoints(const PotentialSpec& pot);

/// int_0^inf f(E) dE for f already containing exp(-beta E). beta only sets the
/// cutoff E_max = E_max_factor / beta, which is pushed outward until the tail
/// bound |f(E_max)| / beta drops below abs_tol.
IntegralResult integrate_damped(const Integrand& f, double beta_tilde, const PotentialSpec& pot,
                                const QuadratureOptions& opts = {});

/// Conditionally convergent int_0^inf f(E) dE for f containing exp(-i E t),
/// evaluated as the eps -> 0 limit of int f(E) exp(-eps E) dE with Richardson
/// extrapolation over richardson_levels halvings of eps. With a single level
/// the result is the regularised integral at t - i eps.
/// Throws ExtrapolationUnstable when successive extrapolants stop converging.
IntegralResult integrate_oscillatory(const Integrand& f, double t_tilde, const PotentialSpec& pot,
                                     const QuadratureOptions& opts = {});

/// Per-level detail of integrate_oscillatory, exposed for diagnostics.
struct RegularizedLevel {
  double epsilon = 0.0;
  IntegralResult integral;
};

std::vector<RegularizedLevel> regularized_levels(const Integrand& f, double t_tilde,
                                                 const PotentialSpec& pot,
                                                 const QuadratureOptions& opts);

/// Fixed composite Kronrod nodes for integrands evaluated many times on the
/// same grid. Energies and weights include the panel change of variable.
struct NodeSet {
  std::vector<double> E;
  std::vector<double> weight;
};

NodeSet fixed_nodes(std::span<const Panel> panels);

}  // namespace rectprop
