#include "rectprop/engines.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "rectprop/error.hpp"
#include "rectprop/greens.hpp"

namespace rectprop {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

// Quadrature nodes never sit inside the excluded window; move them just outside.
double avoid_window(double E, const PotentialSpec& pot) {
  const double gap = E - pot.U_tilde;
  if (std::abs(gap) > kSingularWindow) return E;
  return pot.U_tilde + (gap < 0.0 ? -2.0 : 2.0) * kSingularWindow;
}

AmplitudeSet amplitudes_for(double E, const PotentialSpec& pot, AmplitudeCache* cache) {
  E = avoid_window(E, pot);
  return cache ? cache->get(E, pot) : amplitude_set(E, pot);
}

bool both_left(double x, double xp) {
  return classify_region(x) == Region::Left && classify_region(xp) == Region::Left;
}

void require_supported(double x, double xp) {
  const Region a = classify_region(x);
  const Region b = classify_region(xp);
  if (a != Region::Left && b != Region::Left) {
    throw Error(ErrorCode::UnsupportedRegion,
                "one of x, x' must lie left of the potential (got " + std::string(to_string(a)) +
                    ", " + std::string(to_string(b)) + ")");
  }
}

KernelValue damped_kernel(const EvaluationPoint& p, const PotentialSpec& pot,
                          const QuadratureOptions& opts, AmplitudeCache* cache) {
  p.validate();
  pot.validate();
  require_supported(p.x_tilde, p.xp_tilde);
  const double beta = p.time;
  const Integrand f = [&](double E) -> cplx {
    return std::exp(-beta * E) * scattered_spectral_density(p.x_tilde, p.xp_tilde, E, pot, cache);
  };
  const IntegralResult r = integrate_damped(f, beta, pot, opts);
  KernelValue kv;
  kv.mode = p.mode;
  double value = r.value.real();
  if (both_left(p.x_tilde, p.xp_tilde)) value += free_density_closed(p.x_tilde, p.xp_tilde, beta);
  kv.value = value;
  kv.error_estimate = r.error_estimate;
  kv.warnings = r.warnings;
  return kv;
}

}  // namespace

AmplitudeSet AmplitudeCache::get(double E, const PotentialSpec& pot) {
  const Key key{std::bit_cast<std::uint64_t>(E), std::bit_cast<std::uint64_t>(pot.U_tilde),
                std::bit_cast<std::uint64_t>(pot.Delta_tilde)};
  {
    std::lock_guard lock(mutex_);
    if (auto it = store_.find(key); it != store_.end()) {
      ++hits_;
      return it->second;
    }
  }
  AmplitudeSet a = amplitude_set(E, pot);
  std::lock_guard lock(mutex_);
  store_.emplace(key, a);
  return a;
}

std::size_t AmplitudeCache::size() const {
  std::lock_guard lock(mutex_);
  return store_.size();
}

std::size_t AmplitudeCache::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

void AmplitudeCache::clear() {
  std::lock_guard lock(mutex_);
  store_.clear();
  hits_ = 0;
}

cplx free_propagator_closed(double x, double xp, cplx t) {
  if (!(t.real() > 0.0 || t.imag() < 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "free propagator needs Re t > 0 or Im t < 0");
  }
  const double dx = x - xp;
  return std::sqrt(1.0 / (4.0 * kPi * I * t)) * std::exp(I * dx * dx / (4.0 * t));
}

double free_density_closed(double x, double xp, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be > 0");
  const double dx = x - xp;
  return std::exp(-dx * dx / (4.0 * beta)) / std::sqrt(4.0 * kPi * beta);
}

double scattered_spectral_density(double x, double xp, double E, const PotentialSpec& pot,
                                  AmplitudeCache* cache) {
  if (!(E > 0.0)) return 0.0;
  const AmplitudeSet a = amplitudes_for(E, pot, cache);
  const GreenValue g = regional_green(x, xp, a);
  return g.source_region == Region::Left && g.region == Region::Left ? g.scattered_spectral()
                                                                      : g.spectral;
}

KernelValue propagator(const EvaluationPoint& p, const PotentialSpec& pot,
                       const QuadratureOptions& opts, AmplitudeCache* cache) {
  p.validate();
  pot.validate();
  if (p.mode != Mode::RealTime) throw Error(ErrorCode::InvalidArgument, "propagator needs a real-time point");
  require_supported(p.x_tilde, p.xp_tilde);
  const double t = p.time;
  const Integrand f = [&](double E) -> cplx {
    return std::exp(-I * (E * t)) * scattered_spectral_density(p.x_tilde, p.xp_tilde, E, pot, cache);
  };
  const IntegralResult r = integrate_oscillatory(f, t, pot, opts);
  KernelValue kv;
  kv.mode = Mode::RealTime;
  kv.value = r.value;
  if (both_left(p.x_tilde, p.xp_tilde)) {
    const cplx tc = opts.richardson_levels == 1 ? cplx{t, -opts.epsilon_reg} : cplx{t, 0.0};
    kv.value += free_propagator_closed(p.x_tilde, p.xp_tilde, tc);
  }
  kv.error_estimate = r.error_estimate;
  kv.warnings = r.warnings;
  return kv;
}

KernelValue density_matrix(const EvaluationPoint& p, const PotentialSpec& pot,
                           const QuadratureOptions& opts, AmplitudeCache* cache) {
  if (p.mode != Mode::Thermal) throw Error(ErrorCode::InvalidArgument, "density_matrix needs a thermal point");
  return damped_kernel(p, pot, opts, cache);
}

KernelValue diffusion_kernel(const EvaluationPoint& p, const PotentialSpec& pot,
                             const QuadratureOptions& opts, AmplitudeCache* cache) {
  if (p.mode != Mode::Diffusion) throw Error(ErrorCode::InvalidArgument, "diffusion_kernel needs a diffusion point");
  return damped_kernel(p, pot, opts, cache);
}

KernelValue evaluate(const EvaluationPoint& p, const PotentialSpec& pot,
                     const QuadratureOptions& opts, AmplitudeCache* cache) {
  switch (p.mode) {
    case Mode::RealTime: return propagator(p, pot, opts, cache);
    case Mode::Thermal: return density_matrix(p, pot, opts, cache);
    case Mode::Diffusion: return diffusion_kernel(p, pot, opts, cache);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown mode");
}

namespace {

// Bound-state eigenfunction at energy E < 0, normalised on the real line.
double bound_state_value(double x, double E, const PotentialSpec& pot) {
  const double kappa = std::sqrt(-E);
  const double kappa_d = std::sqrt(pot.Delta_tilde - E);
  const double q = std::sqrt(E - pot.U_tilde);
  const double B = 1.0;
  const double C = kappa / q;
  const double D = B * std::cos(q) + C * std::sin(q);
  const double inside = 0.5 * (B * B + C * C) + (B * B - C * C) * std::sin(2.0 * q) / (4.0 * q) +
                        B * C * (1.0 - std::cos(2.0 * q)) / (2.0 * q);
  const double norm = std::sqrt(B * B / (2.0 * kappa) + inside + D * D / (2.0 * kappa_d));
  double v = 0.0;
  if (x <= 0.0) {
    v = B * std::exp(kappa * x);
  } else if (x < 1.0) {
    v = B * std::cos(q * x) + C * std::sin(q * x);
  } else {
    v = D * std::exp(-kappa_d * (x - 1.0));
  }
  return v / norm;
}

}  // namespace

double bound_state_density(double x, double xp, double beta, const PotentialSpec& pot) {
  double sum = 0.0;
  for (double E : find_bound_states(pot)) {
    sum += bound_state_value(x, E, pot) * bound_state_value(xp, E, pot) * std::exp(-beta * E);
  }
  return sum;
}

Packet gaussian_packet(double center, double sigma, double k0, double h, double width_sigmas) {
  if (!(sigma > 0.0) || !(h > 0.0) || !(width_sigmas > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sigma, h and width must be > 0");
  }
  Packet p;
  p.h = h;
  const double half = width_sigmas * sigma;
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * half / h)) + 1;
  p.x0 = center - half;
  p.psi.resize(n);
  double norm = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double x = p.x(j);
    const double g = std::exp(-(x - center) * (x - center) / (4.0 * sigma * sigma));
    p.psi[j] = g * std::exp(I * (k0 * x));
    norm += g * g * h;
  }
  const double s = 1.0 / std::sqrt(norm);
  for (auto& v : p.psi) v *= s;
  return p;
}

namespace {

void check_support(const Packet& p) {
  if (p.psi.size() < 2 || !(p.h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "packet needs at least two nodes and h > 0");
  }
  const double x_last = p.x(p.psi.size() - 1);
  double peak = 0.0;
  for (const auto& v : p.psi) peak = std::max(peak, std::abs(v));
  if (x_last >= -kBoundaryTolerance) {
    throw Error(ErrorCode::SupportViolation,
                "source grid reaches x' = " + std::to_string(x_last) + " >= 0");
  }
  if (std::abs(p.psi.back()) > 1e-12 * peak) {
    throw Error(ErrorCode::SupportViolation, "packet is not negligible at its right end");
  }
}

double trapezoid_weight(const Packet& p, std::size_t j) {
  return (j == 0 || j + 1 == p.psi.size()) ? 0.5 * p.h : p.h;
}

// S_{+-}(k) = sum_j w_j psi_j exp(-+ i k x_j), trapezoidal or plain Riemann weights.
std::pair<cplx, cplx> source_sums(const Packet& p, double k, bool trapezoid = true) {
  cplx plus{0.0, 0.0}, minus{0.0, 0.0};
  const cplx step = std::exp(-I * (k * p.h));
  cplx phase = std::exp(-I * (k * p.x0));
  // Recurrence drifts slowly; re-anchor every 256 nodes.
  for (std::size_t j = 0; j < p.psi.size(); ++j) {
    if (j % 256 == 0) phase = std::exp(-I * (k * p.x(j)));
    const cplx wpsi = (trapezoid ? trapezoid_weight(p, j) : p.h) * p.psi[j];
    plus += wpsi * phase;
    minus += wpsi * std::conj(phase);
    phase *= step;
  }
  return {plus, minus};
}

// Largest energy carried by the packet, from |S(k)| on a coarse scan.
double packet_energy_cutoff(const Packet& p) {
  const double k_nyquist = kPi / p.h;
  const int n = 4096;
  std::vector<double> mag(n + 1);
  double peak = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double k = k_nyquist * i / n;
    const auto [sp, sm] = source_sums(p, k);
    mag[i] = std::max(std::abs(sp), std::abs(sm));
    peak = std::max(peak, mag[i]);
  }
  int last = 1;
  for (int i = 0; i <= n; ++i) {
    if (mag[i] > 1e-13 * peak) last = i;
  }
  const double k_cut = std::min(k_nyquist, k_nyquist * (last + 2) / n);
  return k_cut * k_cut;
}

std::vector<Panel> packet_panels(const Packet& p, double x_span, double t, double E_cut,
                                 const PotentialSpec& pot, int requested) {
  std::vector<double> pts{0.0};
  for (double b : energy_breakpoints(pot)) {
    if (b < E_cut) pts.push_back(b);
  }
  pts.push_back(E_cut);
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    int n = requested;
    if (n <= 0) {
      // about one radian of phase per panel
      const double phase = (b - a) * t + (std::sqrt(b) - std::sqrt(a)) * (x_span + p.h);
      n = std::max(4, static_cast<int>(std::ceil(phase)));
    }
    append_threshold_panels(panels, a, b, pot, n);
  }
  return panels;
}

std::vector<Panel> bisect_all(const std::vector<Panel>& panels) {
  std::vector<Panel> out;
  out.reserve(panels.size() * 2);
  for (const Panel& p : panels) {
    Panel l = p, r = p;
    l.s1 = r.s0 = 0.5 * (p.s0 + p.s1);
    out.push_back(l);
    out.push_back(r);
  }
  return out;
}

std::vector<cplx> scattered_packet(const Packet& p, const std::vector<double>& x_dest, double t,
                                   const PotentialSpec& pot, const NodeSet& nodes) {
  const std::size_t m = nodes.E.size();
  std::vector<AmplitudeSet> amps(m);
  std::vector<cplx> splus(m), sminus(m), phase(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double E = avoid_window(nodes.E[i], pot);
    amps[i] = amplitude_set(E, pot);
    const auto [sp, sm] = source_sums(p, std::sqrt(E));
    splus[i] = sp;
    sminus[i] = sm;
    phase[i] = nodes.weight[i] * std::exp(-I * (E * t));
  }
  std::vector<cplx> psi(x_dest.size());
  for (std::size_t q = 0; q < x_dest.size(); ++q) {
    cplx sum{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
      const cplx F = outgoing_factor(x_dest[q], amps[i]);
      sum += phase[i] * (F * splus[i] - std::conj(F) * sminus[i]);
    }
    psi[q] = -sum / (2.0 * kPi * I);
  }
  return psi;
}

}  // namespace

PacketEvolution evolve_packet(const Packet& psi0, const std::vector<double>& x_dest, double t,
                              const PotentialSpec& pot, int energy_panels) {
  pot.validate();
  check_support(psi0);
  if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::InvalidArgument, "t must be > 0");
  double x_span = 0.0;
  for (double x : x_dest) {
    classify_region(x);
    x_span = std::max(x_span, std::abs(x));
  }
  x_span += std::abs(psi0.x0);

  const double E_cut = packet_energy_cutoff(psi0);
  const std::vector<Panel> coarse = packet_panels(psi0, x_span, t, E_cut, pot, energy_panels);
  const std::vector<Panel> fine = bisect_all(coarse);
  const std::vector<cplx> psi_n = scattered_packet(psi0, x_dest, t, pot, fixed_nodes(coarse));
  const std::vector<cplx> psi_2n = scattered_packet(psi0, x_dest, t, pot, fixed_nodes(fine));

  PacketEvolution out;
  out.x = x_dest;
  out.psi.resize(x_dest.size());
  out.density.resize(x_dest.size());
  for (std::size_t q = 0; q < x_dest.size(); ++q) {
    cplx direct{0.0, 0.0};
    if (classify_region(x_dest[q]) == Region::Left) {
      for (std::size_t j = 0; j < psi0.psi.size(); ++j) {
        direct += trapezoid_weight(psi0, j) * free_propagator_closed(x_dest[q], psi0.x(j), t) *
                  psi0.psi[j];
      }
    }
    out.psi[q] = direct + psi_2n[q];
    out.density[q] = std::norm(out.psi[q]);
    out.error_estimate = std::max(out.error_estimate, std::abs(psi_2n[q] - psi_n[q]));
  }
  return out;
}

FluxEstimate flux_transmission(const Packet& psi0, const PotentialSpec& pot, int k_panels) {
  pot.validate();
  if (psi0.psi.size() < 2 || !(psi0.h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "packet needs at least two nodes and h > 0");
  }
  const double k_nyquist = kPi / psi0.h;
  // Riemann weights make the transform periodic in k, so Parseval is exact
  // and the momentum norm needs no quadrature.
  auto phi2 = [&](double k) { return std::norm(source_sums(psi0, k, false).first) / (2.0 * kPi); };
  double norm = 0.0;
  for (const auto& v : psi0.psi) norm += psi0.h * std::norm(v);

  // Momentum support from a coarse scan of one period.
  const int scan = 8192;
  std::vector<double> mag(scan + 1);
  double peak = 0.0;
  for (int i = 0; i <= scan; ++i) {
    mag[i] = phi2(-k_nyquist + 2.0 * k_nyquist * i / scan);
    peak = std::max(peak, mag[i]);
  }
  int lo = scan, hi = 0;
  for (int i = 0; i <= scan; ++i) {
    if (mag[i] > 1e-18 * peak) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  }
  const double k_lo = -k_nyquist + 2.0 * k_nyquist * std::max(lo - 2, 0) / scan;
  const double k_hi = -k_nyquist + 2.0 * k_nyquist * std::min(hi + 2, scan) / scan;

  QuadratureOptions opts;
  opts.rel_tol = 1e-10;
  opts.abs_tol = 1e-16;
  opts.max_subdivisions = 20000;
  const int n = std::max(k_panels, 8);
  const Integrand transmitted = [&](double k) -> cplx {
    const double E = avoid_window(k * k, pot);
    if (!(E > pot.Delta_tilde)) return 0.0;
    return std::norm(amplitude_set(E, pot).t) * phi2(k);
  };
  const Integrand density = [&](double k) -> cplx { return phi2(k); };

  // |t|^2 switches on with a square root at k = sqrt(Delta); split there.
  const double k_on = std::sqrt(pot.Delta_tilde);
  const double a = std::max(k_lo, k_on);
  FluxEstimate fe;
  if (a < k_hi) {
    fe.transmitted = integrate_panels(transmitted, make_panels(a, k_hi, PanelMap::Linear, n), opts)
                         .value.real() / norm;
  }
  if (k_lo < 0.0) {
    fe.backward_weight = integrate_panels(density, make_panels(k_lo, std::min(0.0, k_hi), PanelMap::Linear, n), opts)
                             .value.real() / norm;
  }
  return fe;
}

void SweepSpec::validate() const {
  if (!(lo < hi) || samples < 2) throw Error(ErrorCode::InvalidArgument, "sweep needs lo < hi and samples >= 2");
  if (inner_parameter && (!(inner_lo < inner_hi) || inner_samples < 2)) {
    throw Error(ErrorCode::InvalidArgument, "inner sweep needs lo < hi and samples >= 2");
  }
  if (inner_parameter && *inner_parameter == parameter) {
    throw Error(ErrorCode::InvalidArgument, "inner and outer sweep parameters must differ");
  }
  pot.validate();
}

namespace {

void apply(SweepParameter what, double v, EvaluationPoint& p, PotentialSpec& pot) {
  switch (what) {
    case SweepParameter::U_tilde: pot.U_tilde = v; break;
    case SweepParameter::x_tilde: p.x_tilde = v; break;
    case SweepParameter::time: p.time = v; break;
  }
}

double grid_value(double lo, double hi, int n, int i) {
  return i + 1 == n ? hi : lo + (hi - lo) * i / (n - 1);
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, const QuadratureOptions& opts, unsigned threads) {
  spec.validate();
  opts.validate();
  const int inner_n = spec.inner_parameter ? spec.inner_samples : 1;
  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.samples) * inner_n);
  for (int i = 0; i < spec.samples; ++i) {
    for (int j = 0; j < inner_n; ++j) {
      SweepRow& row = rows[static_cast<std::size_t>(i) * inner_n + j];
      row.point = spec.fixed;
      row.point.mode = spec.mode;
      row.pot = spec.pot;
      row.parameter = grid_value(spec.lo, spec.hi, spec.samples, i);
      apply(spec.parameter, row.parameter, row.point, row.pot);
      if (spec.inner_parameter) {
        row.inner = grid_value(spec.inner_lo, spec.inner_hi, spec.inner_samples, j);
        apply(*spec.inner_parameter, row.inner, row.point, row.pot);
      }
    }
  }

  AmplitudeCache cache;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      try {
        row.value = evaluate(row.point, row.pot, opts, &cache);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(rows.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  return rows;
}

SweepSpec figure_preset(int figure) {
  SweepSpec s;
  s.mode = Mode::Thermal;
  s.parameter = SweepParameter::U_tilde;
  s.pot = make_potential(0.0, 0.0);
  switch (figure) {
    case 1:
    case 2:
      s.fixed = EvaluationPoint::thermal(-2.0, -2.0, 10.0);
      s.lo = figure == 1 ? -300.0 : 0.0;
      s.hi = figure == 1 ? 0.0 : 300.0;
      s.samples = 600;
      break;
    case 3:
    case 4:
      s.fixed = EvaluationPoint::thermal(2.0, -10.0, 10.0);
      s.lo = figure == 3 ? -300.0 : 0.0;
      s.hi = figure == 3 ? 0.0 : 100.0;
      s.samples = figure == 3 ? 600 : 200;
      break;
    case 5:
    case 6:
      s.mode = Mode::Diffusion;
      s.fixed = EvaluationPoint::diffusion(1.04, -3.0, 1.0);
      s.pot = make_potential(figure == 5 ? 10.0 : 0.0, 0.0);
      s.parameter = SweepParameter::x_tilde;
      s.lo = 1.04;
      s.hi = 3.0;
      s.samples = 50;
      s.inner_parameter = SweepParameter::time;
      s.inner_lo = 1.0;
      s.inner_hi = 10.0;
      s.inner_samples = 37;
      break;
    default:
      throw Error(ErrorCode::InvalidArgument, "figure presets are numbered 1 to 6");
  }
  return s;
}

}  // namespace rectprop
