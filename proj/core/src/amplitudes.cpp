#include "rectprop/amplitudes.hpp"

#include <cmath>
#include <string>

#include "rectprop/error.hpp"

namespace rectprop {

namespace {

constexpr cplx I{0.0, 1.0};

bool on_branch(cplx k) noexcept {
  return (k.imag() == 0.0 && k.real() >= 0.0) || (k.real() == 0.0 && k.imag() > 0.0);
}

}  // namespace

cplx wave_number(double E, double offset) noexcept {
  const double diff = E - offset;
  if (diff >= 0.0) return {std::sqrt(diff), 0.0};
  return {0.0, std::sqrt(-diff)};
}

cplx fourth_root_velocity(cplx k) {
  if (!on_branch(k)) {
    throw Error(ErrorCode::BranchViolation,
                "wave number (" + std::to_string(k.real()) + ", " + std::to_string(k.imag()) +
                    ") is neither non-negative real nor positive imaginary");
  }
  if (k.imag() == 0.0) return {std::sqrt(k.real()), 0.0};
  // sqrt(i kappa) = e^{i pi/4} sqrt(kappa)
  const double s = std::sqrt(0.5 * k.imag());
  return {s, s};
}

WaveNumbers wave_numbers(double E, const PotentialSpec& pot) noexcept {
  WaveNumbers w;
  w.k = wave_number(E, 0.0);
  w.k_u = wave_number(E, pot.U_tilde);
  w.k_delta = wave_number(E, pot.Delta_tilde);
  w.v = 2.0 * w.k;
  w.v_u = 2.0 * w.k_u;
  w.v_delta = 2.0 * w.k_delta;
  return w;
}

AmplitudeSet amplitude_set(double E, const PotentialSpec& pot, double eta) {
  if (!std::isfinite(E)) throw Error(ErrorCode::InvalidArgument, "energy is not finite");
  if (std::abs(E - pot.U_tilde) <= eta) {
    throw Error(ErrorCode::NearSingularEnergy,
                "E = " + std::to_string(E) + " is within the excluded window around U");
  }
  AmplitudeSet a;
  a.E_tilde = E;
  a.wn = wave_numbers(E, pot);
  const cplx k = a.wn.k;
  const cplx ku = a.wn.k_u;
  const cplx kd = a.wn.k_delta;
  a.sqrt_k = fourth_root_velocity(k);
  a.sqrt_k_u = fourth_root_velocity(ku);
  a.sqrt_k_delta = fourth_root_velocity(kd);

  const cplx e1 = std::exp(I * ku);
  const cplx e2 = e1 * e1;
  a.d_E = (k + ku) * (kd + ku) - (k - ku) * (kd - ku) * e2;
  if (a.d_E == 0.0) {
    throw Error(ErrorCode::NearSingularEnergy,
                "d(E) vanishes at E = " + std::to_string(E) + " (bound-state pole)");
  }
  a.t = 4.0 * a.sqrt_k * a.sqrt_k_delta * ku * e1 / a.d_E;
  a.t_prime = 2.0 * a.sqrt_k * a.sqrt_k_u * (kd + ku) / a.d_E;
  a.r_prime = 2.0 * a.sqrt_k * a.sqrt_k_u * (ku - kd) * e2 / a.d_E;
  a.r = ((k - ku) * (kd + ku) - (k + ku) * (kd - ku) * e2) / a.d_E;
  return a;
}

double denominator_scale(const AmplitudeSet& a) noexcept {
  const cplx k = a.wn.k;
  const cplx ku = a.wn.k_u;
  const cplx kd = a.wn.k_delta;
  const cplx e2 = std::exp(2.0 * I * ku);
  return std::abs((k + ku) * (kd + ku)) + std::abs((k - ku) * (kd - ku) * e2);
}

StepAmplitudes step_amplitudes(cplx k_left, cplx k_right) {
  const cplx sum = k_left + k_right;
  if (sum == 0.0) {
    throw Error(ErrorCode::DegenerateStep, "k_left + k_right vanishes");
  }
  StepAmplitudes s;
  s.k_left = k_left;
  s.k_right = k_right;
  const cplx sq_l = fourth_root_velocity(k_left);
  const cplx sq_r = fourth_root_velocity(k_right);

  s.r_gt = (k_right - k_left) / sum;
  s.r_lt = -s.r_gt;
  s.t_s = 2.0 * sq_r * sq_l / sum;

  // v = 2k, so i*hbar*v -> 2ik and sqrt(v> v<) -> 2 sqrt(k>) sqrt(k<).
  s.T_gt = 2.0 * I * k_right * s.r_gt;
  s.T_lt = 2.0 * I * k_left * s.r_lt;
  s.T_trans = 2.0 * I * sq_r * sq_l * s.t_s;

  s.H_gt = I * (k_right - k_left);
  s.H_lt = I * (k_left - k_right);
  const cplx root_sum = sq_r + sq_l;
  s.H_trans = 4.0 * I * k_right * k_left / (root_sum * root_sum);

  s.G_gt = 1.0 / (2.0 * I * k_right);
  s.G_lt = 1.0 / (2.0 * I * k_left);
  s.G_trans = 1.0 / (2.0 * I * sq_r * sq_l);
  return s;
}

namespace {

// For U < E < 0 the product d(E) e^{-i k_u} is purely imaginary; its imaginary
// part is a real function whose sign changes bracket the bound states.
double bound_state_function(double E, const PotentialSpec& pot) {
  const WaveNumbers w = wave_numbers(E, pot);
  const cplx e2 = std::exp(2.0 * I * w.k_u);
  const cplx d = (w.k + w.k_u) * (w.k_delta + w.k_u) - (w.k - w.k_u) * (w.k_delta - w.k_u) * e2;
  return (d * std::exp(-I * w.k_u)).imag();
}

}  // namespace

std::vector<double> find_bound_states(const PotentialSpec& pot, int samples) {
  pot.validate();
  std::vector<double> roots;
  if (pot.U_tilde >= 0.0 || samples < 2) return roots;
  const double lo = pot.U_tilde;
  const double hi = 0.0;
  const double step = (hi - lo) / samples;
  double a = lo + 0.5 * step;
  double fa = bound_state_function(a, pot);
  for (int i = 1; i < samples; ++i) {
    const double b = lo + (i + 0.5) * step;
    const double fb = bound_state_function(b, pot);
    if ((fa < 0.0) != (fb < 0.0)) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200 && x1 - x0 > 1e-14 * std::max(1.0, std::abs(x0)); ++it) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = bound_state_function(mid, pot);
        if ((fm < 0.0) == (f0 < 0.0)) {
          x0 = mid;
          f0 = fm;
        } else {
          x1 = mid;
        }
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace rectprop
