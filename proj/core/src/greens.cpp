#include "rectprop/greens.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rectprop/error.hpp"

namespace rectprop {

namespace {

constexpr cplx I{0.0, 1.0};

cplx propagate(cplx kappa, double distance) {
  if (kappa == 0.0) {
    throw Error(ErrorCode::ThresholdEnergy, "free Green function at a threshold energy");
  }
  return std::exp(I * kappa * distance) / (2.0 * I * kappa);
}

cplx checked_inverse(cplx denom) {
  if (denom == 0.0) {
    throw Error(ErrorCode::ThresholdEnergy, "Green prefactor vanishes at a threshold energy");
  }
  return 1.0 / denom;
}

}  // namespace

cplx free_green(double x, double xp, double E, double offset) {
  return propagate(wave_number(E, offset), std::abs(x - xp));
}

double GreenValue::scattered_spectral() const noexcept {
  return -scattered.imag() / std::numbers::pi;
}

GreenValue regional_green(double x, double xp, const AmplitudeSet& a) {
  GreenValue g;
  g.region = classify_region(x);
  g.source_region = classify_region(xp);
  const cplx k = a.wn.k;
  const cplx ku = a.wn.k_u;
  const cplx kd = a.wn.k_delta;

  if (g.source_region == Region::Left) {
    switch (g.region) {
      case Region::Right: {
        const cplx pre = checked_inverse(2.0 * I * a.sqrt_k * a.sqrt_k_delta);
        g.scattered = pre * std::exp(I * kd * (x - 1.0)) * a.t * std::exp(-I * k * xp);
        break;
      }
      case Region::Inside: {
        const cplx pre = checked_inverse(2.0 * I * a.sqrt_k * a.sqrt_k_u);
        g.scattered = pre * (std::exp(I * ku * x) * a.t_prime * std::exp(-I * k * xp) +
                             std::exp(-I * ku * x) * a.r_prime * std::exp(-I * k * xp));
        break;
      }
      case Region::Left: {
        const cplx pre = checked_inverse(2.0 * I * k);
        g.direct = pre * std::exp(I * k * std::abs(x - xp));
        g.scattered = pre * a.r * std::exp(-I * k * (x + xp));
        break;
      }
    }
  } else if (g.region == Region::Left) {
    if (g.source_region == Region::Right) {
      const cplx pre = checked_inverse(2.0 * I * a.sqrt_k * a.sqrt_k_delta);
      g.scattered = pre * std::exp(-I * k * x) * a.t * std::exp(I * kd * (xp - 1.0));
    } else {
      const cplx pre = checked_inverse(2.0 * I * a.sqrt_k * a.sqrt_k_u);
      g.scattered = pre * (std::exp(-I * k * x) * a.t_prime * std::exp(I * ku * xp) +
                           std::exp(-I * k * x) * a.r_prime * std::exp(-I * ku * xp));
    }
  } else {
    throw Error(ErrorCode::UnsupportedRegion,
                "no closed form for source " + std::string(to_string(g.source_region)) +
                    " and destination " + std::string(to_string(g.region)));
  }
  g.g_plus = g.direct + g.scattered;
  g.spectral = -g.g_plus.imag() / std::numbers::pi;
  return g;
}

GreenValue regional_green(double x, double xp, double E, const PotentialSpec& pot) {
  return regional_green(x, xp, amplitude_set(E, pot));
}

cplx outgoing_factor(double x, const AmplitudeSet& a) {
  const cplx k = a.wn.k;
  const cplx ku = a.wn.k_u;
  const cplx kd = a.wn.k_delta;
  switch (classify_region(x)) {
    case Region::Right:
      return checked_inverse(2.0 * I * a.sqrt_k * a.sqrt_k_delta) * std::exp(I * kd * (x - 1.0)) *
             a.t;
    case Region::Inside:
      return checked_inverse(2.0 * I * a.sqrt_k * a.sqrt_k_u) *
             (std::exp(I * ku * x) * a.t_prime + std::exp(-I * ku * x) * a.r_prime);
    case Region::Left:
      return checked_inverse(2.0 * I * k) * a.r * std::exp(-I * k * x);
  }
  return {};
}

MstMatrices mst_matrices(double E, const PotentialSpec& pot) {
  const WaveNumbers w = wave_numbers(E, pot);
  MstMatrices m;
  m.step0 = step_amplitudes(w.k, w.k_u);
  m.step1 = step_amplitudes(w.k_u, w.k_delta);
  m.G_01 = propagate(w.k_u, 1.0);
  m.D = 1.0 - m.step1.T_lt * m.G_01 * m.step0.T_gt * m.G_01;
  if (m.D == 0.0) {
    throw Error(ErrorCode::NearSingularEnergy, "multiple-scattering denominator vanishes");
  }
  m.T = m.step1.T_trans * m.G_01 * m.step0.T_trans / m.D;
  m.T_prime = m.step0.T_trans / m.D;
  m.R_prime = m.step1.T_lt * m.G_01 * m.T_prime;
  m.R = m.step0.T_lt +
        m.step0.T_trans * m.G_01 * m.step1.T_lt * m.G_01 * m.step0.T_trans / m.D;
  return m;
}

cplx mst_green(double x, double xp, double E, const PotentialSpec& pot) {
  if (std::abs(E - pot.U_tilde) <= kSingularWindow) {
    throw Error(ErrorCode::NearSingularEnergy, "energy inside the excluded window around U");
  }
  const Region dst = classify_region(x);
  const Region src = classify_region(xp);
  const WaveNumbers w = wave_numbers(E, pot);
  const MstMatrices m = mst_matrices(E, pot);

  if (src == Region::Left) {
    switch (dst) {
      case Region::Right:
        return propagate(w.k_delta, x - 1.0) * m.T * propagate(w.k, -xp);
      case Region::Inside:
        return propagate(w.k_u, x) * m.T_prime * propagate(w.k, -xp) +
               propagate(w.k_u, 1.0 - x) * m.R_prime * propagate(w.k, -xp);
      case Region::Left:
        return propagate(w.k, std::abs(x - xp)) +
               propagate(w.k, -x) * m.R * propagate(w.k, -xp);
    }
  }
  if (dst == Region::Left) {
    if (src == Region::Right) {
      return propagate(w.k, -x) * m.T * propagate(w.k_delta, xp - 1.0);
    }
    return propagate(w.k, -x) * m.T_prime * propagate(w.k_u, xp) +
           propagate(w.k, -x) * m.R_prime * propagate(w.k_u, 1.0 - xp);
  }
  throw Error(ErrorCode::UnsupportedRegion, "multiple-scattering form not available for this pair");
}

}  // namespace rectprop
