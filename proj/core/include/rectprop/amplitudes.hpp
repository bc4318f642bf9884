#pragma once

#include <complex>
#include <vector>

#include "rectprop/model.hpp"

namespace rectprop {

using cplx = std::complex<double>;

/// Half-width of the excluded energy window around E = U, where the
/// denominator d(E) and all numerators vanish together.
inline constexpr double kSingularWindow = 1e-9;

/// Wave numbers of the three regions at one energy. Velocities are 2k in the
/// dimensionless frame (hbar k / m with hbar^2 / 2m = 1).
struct WaveNumbers {
  cplx k;        // x < 0
  cplx k_u;      // 0 < x < 1
  cplx k_delta;  // x > 1
  cplx v;
  cplx v_u;
  cplx v_delta;
};

/// sqrt(E - offset) when E >= offset, i sqrt(offset - E) otherwise. The result
/// is always non-negative real or positive imaginary, so exp(i k x) decays
/// for x > 0 in classically forbidden regions.
cplx wave_number(double E_tilde, double offset) noexcept;

/// Principal square root of a wave number obeying the branch rule above.
/// Throws BranchViolation for inputs off the allowed set.
cplx fourth_root_velocity(cplx wave_number);

WaveNumbers wave_numbers(double E_tilde, const PotentialSpec& pot) noexcept;

/// Transmission / reflection amplitudes of the whole potential, normalised
/// with sqrt(k k_delta) so that |r|^2 + |t|^2 = 1 above all thresholds.
struct AmplitudeSet {
  double E_tilde = 0.0;
  WaveNumbers wn;
  cplx sqrt_k;  // principal roots of k, k_u, k_delta
  cplx sqrt_k_u;
  cplx sqrt_k_delta;
  cplx t;
  cplx t_prime;
  cplx r_prime;
  cplx r;
  cplx d_E;
};

/// Any real E outside |E - U| <= eta (NearSingularEnergy). Negative energies
/// use the evanescent continuation of every wave number; a vanishing
/// denominator there (a bound state) also raises NearSingularEnergy.
AmplitudeSet amplitude_set(double E_tilde, const PotentialSpec& pot,
                           double eta = kSingularWindow);

/// Scale of the two products forming d(E); |d| / scale flags near-poles.
double denominator_scale(const AmplitudeSet& a) noexcept;

/// Single interface between wave numbers k_left (the "<" side) and k_right
/// (the ">" side): step amplitudes, t-matrices, the step-localised effective
/// potentials and the interface Green values of each scattering channel.
struct StepAmplitudes {
  cplx k_left;
  cplx k_right;
  cplx r_gt;  // reflection on the right side
  cplx r_lt;  // reflection on the left side
  cplx t_s;
  cplx T_gt;
  cplx T_lt;
  cplx T_trans;
  cplx H_gt;
  cplx H_lt;
  cplx H_trans;
  cplx G_gt;
  cplx G_lt;
  cplx G_trans;
};

/// Throws DegenerateStep when k_left + k_right == 0.
StepAmplitudes step_amplitudes(cplx k_left, cplx k_right);

/// Zeros of d(E) on (U, 0) for a well: the bound-state poles of G+, which the
/// positive-energy spectral integrals do not contain. Empty for U >= 0.
std::vector<double> find_bound_states(const PotentialSpec& pot, int samples = 4000);

}  // namespace rectprop
