#include "rectprop/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rectprop/error.hpp"

namespace rectprop {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BoundaryPoint: return "BoundaryPoint";
    case ErrorCode::NearSingularEnergy: return "NearSingularEnergy";
    case ErrorCode::BranchViolation: return "BranchViolation";
    case ErrorCode::DegenerateStep: return "DegenerateStep";
    case ErrorCode::ThresholdEnergy: return "ThresholdEnergy";
    case ErrorCode::UnsupportedRegion: return "UnsupportedRegion";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ExtrapolationUnstable: return "ExtrapolationUnstable";
    case ErrorCode::SupportViolation: return "SupportViolation";
    case ErrorCode::BoxTooSmall: return "BoxTooSmall";
  }
  return "Unknown";
}

void PotentialSpec::validate() const {
  if (!std::isfinite(U_tilde) || !std::isfinite(Delta_tilde)) {
    throw Error(ErrorCode::InvalidArgument, "potential parameters must be finite");
  }
  if (Delta_tilde < 0.0) {
    throw Error(ErrorCode::InvalidArgument,
                "Delta must be >= 0, got " + std::to_string(Delta_tilde));
  }
}

double PotentialSpec::value_at(double x) const noexcept {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return 0.5 * U_tilde;
  if (x < 1.0) return U_tilde;
  if (x == 1.0) return 0.5 * (U_tilde + Delta_tilde);
  return Delta_tilde;
}

PotentialSpec make_potential(double U_tilde, double Delta_tilde) {
  PotentialSpec p{U_tilde, Delta_tilde};
  p.validate();
  return p;
}

void Scales::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(d) || !positive(m) || !positive(hbar) || !positive(D)) {
    throw Error(ErrorCode::InvalidArgument, "scales d, m, hbar, D must be finite and > 0");
  }
  if (!positive(energy_unit()) || !positive(diffusion_energy())) {
    throw Error(ErrorCode::InvalidArgument, "derived energy scales are not positive");
  }
}

double Scales::energy_unit() const noexcept { return hbar * hbar / (2.0 * m * d * d); }

double Scales::characteristic_temperature() const noexcept {
  return energy_unit() / cgs::boltzmann;
}

double Scales::time_unit() const noexcept { return hbar / energy_unit(); }

double Scales::diffusion_time() const noexcept { return d * d / D; }

double Scales::diffusion_energy() const noexcept { return 2.0 * m * D * D / (d * d); }

std::string_view to_string(Region r) noexcept {
  switch (r) {
    case Region::Left: return "left";
    case Region::Inside: return "inside";
    case Region::Right: return "right";
  }
  return "?";
}

Region classify_region(double x) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::InvalidArgument, "coordinate is not finite");
  }
  if (std::abs(x) <= kBoundaryTolerance || std::abs(x - 1.0) <= kBoundaryTolerance) {
    throw Error(ErrorCode::BoundaryPoint,
                "x = " + std::to_string(x) + " lies on a potential jump");
  }
  if (x < 0.0) return Region::Left;
  return x < 1.0 ? Region::Inside : Region::Right;
}

std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::RealTime: return "realtime";
    case Mode::Thermal: return "thermal";
    case Mode::Diffusion: return "diffusion";
  }
  return "?";
}

EvaluationPoint EvaluationPoint::real_time(double x, double xp, double t) {
  return {x, xp, Mode::RealTime, t};
}

EvaluationPoint EvaluationPoint::thermal(double x, double xp, double beta) {
  return {x, xp, Mode::Thermal, beta};
}

EvaluationPoint EvaluationPoint::diffusion(double x, double xp, double tbar) {
  return {x, xp, Mode::Diffusion, tbar};
}

void EvaluationPoint::validate() const {
  classify_region(x_tilde);
  classify_region(xp_tilde);
  if (!std::isfinite(time) || time <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "time-like parameter must be > 0");
  }
}

DimensionlessPoint to_dimensionless(const Scales& s, const PhysicalPoint& p) {
  s.validate();
  if (p.T < 0.0) throw Error(ErrorCode::InvalidArgument, "temperature must be >= 0");
  const double Ed = s.energy_unit();
  DimensionlessPoint out;
  out.x = p.x / s.d;
  out.E = p.E / Ed;
  out.t = p.t * Ed / s.hbar;
  out.beta = p.T > 0.0 ? Ed / (cgs::boltzmann * p.T) : std::numeric_limits<double>::infinity();
  return out;
}

PhysicalPoint from_dimensionless(const Scales& s, const DimensionlessPoint& p) {
  s.validate();
  if (p.beta < 0.0) throw Error(ErrorCode::InvalidArgument, "beta must be >= 0");
  const double Ed = s.energy_unit();
  PhysicalPoint out;
  out.x = p.x * s.d;
  out.E = p.E * Ed;
  out.t = p.t * s.hbar / Ed;
  out.T = Ed / (cgs::boltzmann * p.beta);
  return out;
}

DiffusionPoint to_diffusion_units(const Scales& s, double x, double E, double t) {
  s.validate();
  return {x / s.d, E / s.diffusion_energy(), t / s.diffusion_time()};
}

}  // namespace rectprop
