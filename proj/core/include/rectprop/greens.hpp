#pragma once

// Energy-domain Green functions of H = -d^2/dx^2 + V(x), i.e. matrix elements
// of (E - H + i0)^{-1}. Multiply by 1/(E_d d) for the physical G+.

#include "rectprop/amplitudes.hpp"

namespace rectprop {

/// e^{i kappa |x - x'|} / (2 i kappa) with kappa = wave_number(E, offset).
/// Throws ThresholdEnergy at E == offset.
cplx free_green(double x_tilde, double xp_tilde, double E_tilde, double offset);

struct GreenValue {
  cplx g_plus;
  cplx direct;     // free-particle part (left -> left only), zero elsewhere
  cplx scattered;  // g_plus - direct
  double spectral = 0.0;  // A = -Im(g_plus) / pi
  Region region = Region::Left;
  Region source_region = Region::Left;

  double scattered_spectral() const noexcept;
};

/// Closed-form G+ for a source on the left and any destination, plus the two
/// mirrored pairs (destination left, source inside or right).
/// Other region pairs raise UnsupportedRegion.
GreenValue regional_green(double x_tilde, double xp_tilde, const AmplitudeSet& amps);
GreenValue regional_green(double x_tilde, double xp_tilde, double E_tilde,
                          const PotentialSpec& pot);

/// For a source x' < 0 the scattered Green function factorises as
/// F(x, E) e^{-i k x'}; returns F for any destination region.
cplx outgoing_factor(double x_tilde, const AmplitudeSet& amps);

/// Multiple-scattering transmission / reflection matrices of the two-step
/// potential built from the single-step t-matrices.
struct MstMatrices {
  StepAmplitudes step0;  // interface at x = 0
  StepAmplitudes step1;  // interface at x = 1
  cplx G_01;             // free propagation across the slab, G0(1, 0) = G0(0, 1)
  cplx D;
  cplx T;
  cplx T_prime;
  cplx R_prime;
  cplx R;
};

MstMatrices mst_matrices(double E_tilde, const PotentialSpec& pot);

/// G+ assembled from the multiple-scattering series. Independent of the
/// closed-form amplitudes; used to cross-check regional_green.
cplx mst_green(double x_tilde, double xp_tilde, double E_tilde, const PotentialSpec& pot);

}  // namespace rectprop
