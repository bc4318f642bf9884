#pragma once

// Potential description, physical scales and the dimensionless frame every
// other module works in. Lengths are measured in units of the potential width
// d, energies in E_d = hbar^2 / (2 m d^2) (or E_D = 2 m D^2 / d^2 for the
// diffusion problem), so the Hamiltonian reads H = -d^2/dx^2 + V(x).

#include <optional>
#include <string_view>

namespace rectprop {

/// Gaussian (CGS) constants, CODATA 2018.
namespace cgs {
inline constexpr double electron_mass = 9.1093837015e-28;  // g
inline constexpr double hbar = 1.054571817e-27;            // erg s
inline constexpr double boltzmann = 1.380649e-16;          // erg / K
inline constexpr double electron_volt = 1.602176634e-12;   // erg
}  // namespace cgs

/// Rectangular potential V = U on (0, 1), Delta for x > 1, 0 for x < 0.
struct PotentialSpec {
  double U_tilde = 0.0;
  double Delta_tilde = 0.0;

  /// Throws InvalidArgument for non-finite values or Delta < 0.
  void validate() const;

  /// Sampled potential; the value on a jump is the mean of both sides.
  double value_at(double x_tilde) const noexcept;
};

PotentialSpec make_potential(double U_tilde, double Delta_tilde);

/// Physical scales (CGS). D is only consulted by the diffusion helpers.
struct Scales {
  double d = 1e-7;
  double m = cgs::electron_mass;
  double hbar = cgs::hbar;
  double D = 1.0;

  void validate() const;

  double energy_unit() const noexcept;             // E_d
  double characteristic_temperature() const noexcept;  // E_d / k_B
  double time_unit() const noexcept;               // hbar / E_d
  double diffusion_time() const noexcept;          // t_D = d^2 / D
  double diffusion_energy() const noexcept;        // E_D = 2 m D^2 / d^2
};

enum class Region { Left, Inside, Right };

std::string_view to_string(Region r) noexcept;

inline constexpr double kBoundaryTolerance = 1e-12;

/// Open-interval classification; x = 0 and x = 1 raise BoundaryPoint.
Region classify_region(double x_tilde);

enum class Mode { RealTime, Thermal, Diffusion };

std::string_view to_string(Mode m) noexcept;

/// Destination x, source x' and the time-like parameter of the kernel:
/// t (units of hbar/E_d), beta = E_d / k_B T, or tbar = t / t_D.
struct EvaluationPoint {
  double x_tilde = 0.0;
  double xp_tilde = 0.0;
  Mode mode = Mode::Thermal;
  double time = 1.0;

  static EvaluationPoint real_time(double x, double xp, double t);
  static EvaluationPoint thermal(double x, double xp, double beta);
  static EvaluationPoint diffusion(double x, double xp, double tbar);

  /// Finite coordinates, time > 0, neither coordinate on a jump.
  void validate() const;
};

struct PhysicalPoint {
  double x = 0.0;  // cm
  double E = 0.0;  // erg
  double t = 0.0;  // s
  double T = 0.0;  // K
};

struct DimensionlessPoint {
  double x = 0.0;
  double E = 0.0;
  double t = 0.0;
  double beta = 0.0;  // E_d / k_B T; requires T > 0
};

DimensionlessPoint to_dimensionless(const Scales& s, const PhysicalPoint& p);
PhysicalPoint from_dimensionless(const Scales& s, const DimensionlessPoint& p);

/// Diffusion frame: x/d, E/E_D, t/t_D.
struct DiffusionPoint {
  double x = 0.0;
  double E = 0.0;
  double tbar = 0.0;
};

DiffusionPoint to_diffusion_units(const Scales& s, double x, double E, double t);

}  // namespace rectprop
