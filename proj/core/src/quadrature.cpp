#include "rectprop/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "rectprop/amplitudes.hpp"
#include "rectprop/error.hpp"

namespace rectprop {

namespace {

// QUADPACK qk21 abscissae and weights; odd indices form the 10-point Gauss rule.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEpmach = std::numeric_limits<double>::epsilon();

struct MappedPoint {
  double E;
  double jacobian;
};

MappedPoint map_point(const Panel& p, double s) noexcept {
  switch (p.map) {
    case PanelMap::Linear: return {s, 1.0};
    case PanelMap::SqrtFromLeft: return {p.anchor + s * s, 2.0 * s};
    case PanelMap::SqrtFromRight: return {p.anchor - s * s, 2.0 * s};
    case PanelMap::Root: return {s * s, 2.0 * s};
  }
  return {s, 1.0};
}

struct PanelResult {
  Panel panel;
  cplx value;
  double error = 0.0;
  bool frozen = false;
};

PanelResult gauss_kronrod(const Integrand& f, const Panel& p, long& evals) {
  const double centr = 0.5 * (p.s0 + p.s1);
  const double hlgth = 0.5 * (p.s1 - p.s0);
  const double dhlgth = std::abs(hlgth);

  auto eval = [&](double s) {
    const MappedPoint m = map_point(p, s);
    ++evals;
    return f(m.E) * m.jacobian;
  };

  std::array<cplx, 10> fv1{}, fv2{};
  const cplx fc = eval(centr);
  cplx resk = fc * kWgk[10];
  cplx resg{0.0, 0.0};
  double resabs = std::abs(fc) * kWgk[10];
  for (int j = 0; j < 5; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * kXgk[jtw];
    const cplx f1 = eval(centr - absc);
    const cplx f2 = eval(centr + absc);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 5; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * kXgk[jtwm1];
    const cplx f1 = eval(centr - absc);
    const cplx f2 = eval(centr + absc);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  const cplx reskh = resk * 0.5;
  double resasc = kWgk[10] * std::abs(fc - reskh);
  for (int j = 0; j < 10; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }

  PanelResult r;
  r.panel = p;
  r.value = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double err = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEpmach)) {
    err = std::max(50.0 * kEpmach * resabs, err);
  }
  r.error = err;
  return r;
}

struct ByError {
  const std::vector<PanelResult>* store;
  bool operator()(std::size_t a, std::size_t b) const {
    const auto& pa = (*store)[a];
    const auto& pb = (*store)[b];
    if (pa.error != pb.error) return pa.error < pb.error;
    return a > b;
  }
};

struct AdaptiveOutcome {
  IntegralResult result;
  std::vector<PanelResult> panels;
};

AdaptiveOutcome adaptive(const Integrand& f, std::vector<Panel> initial,
                         const QuadratureOptions& opts) {
  AdaptiveOutcome out;
  long evals = 0;
  std::vector<PanelResult> store;
  store.reserve(initial.size() * 2 + 64);
  for (const Panel& p : initial) store.push_back(gauss_kronrod(f, p, evals));

  std::priority_queue<std::size_t, std::vector<std::size_t>, ByError> heap(ByError{&store});
  cplx total{0.0, 0.0};
  double total_err = 0.0;
  for (std::size_t i = 0; i < store.size(); ++i) {
    heap.push(i);
    total += store[i].value;
    total_err += store[i].error;
  }

  int subdivisions = 0;
  while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (heap.empty()) {
      throw Error(ErrorCode::NoConvergence,
                  "round-off limits the attainable accuracy (error " + std::to_string(total_err) +
                      ")");
    }
    if (subdivisions >= opts.max_subdivisions) {
      throw Error(ErrorCode::NoConvergence,
                  "max_subdivisions exhausted with error estimate " + std::to_string(total_err));
    }
    const std::size_t idx = heap.top();
    heap.pop();
    const Panel p = store[idx].panel;
    const double mid = 0.5 * (p.s0 + p.s1);
    if (!(mid > p.s0 && mid < p.s1) ||
        (p.s1 - p.s0) <= 64.0 * kEpmach * std::max(std::abs(p.s0), std::abs(p.s1))) {
      store[idx].frozen = true;
      continue;
    }
    Panel left = p, right = p;
    left.s1 = mid;
    right.s0 = mid;
    PanelResult rl = gauss_kronrod(f, left, evals);
    PanelResult rr = gauss_kronrod(f, right, evals);
    total += rl.value + rr.value - store[idx].value;
    total_err += rl.error + rr.error - store[idx].error;
    store[idx] = rl;
    store.push_back(rr);
    heap.push(idx);
    heap.push(store.size() - 1);
    ++subdivisions;
  }

  // Final sum in panel order, independent of refinement history.
  std::sort(store.begin(), store.end(), [](const PanelResult& a, const PanelResult& b) {
    const auto key = [](const Panel& p) {
      return map_point(p, p.map == PanelMap::SqrtFromRight ? p.s1 : p.s0).E;
    };
    return key(a.panel) < key(b.panel);
  });
  cplx sum{0.0, 0.0};
  double err = 0.0;
  for (const auto& r : store) {
    sum += r.value;
    err += r.error;
  }
  out.result.value = sum;
  out.result.error_estimate = err;
  out.result.evaluations = evals;
  out.panels = std::move(store);
  return out;
}

void add_warning(IntegralResult& r, Warning w) {
  if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) {
    r.warnings.push_back(w);
  }
}

void check_poles(IntegralResult& r, const std::vector<PanelResult>& panels,
                 const PotentialSpec& pot) {
  for (const auto& pr : panels) {
    const double E = map_point(pr.panel, 0.5 * (pr.panel.s0 + pr.panel.s1)).E;
    if (!(E > 0.0)) continue;
    try {
      const AmplitudeSet a = amplitude_set(E, pot);
      const double scale = denominator_scale(a);
      if (scale > 0.0 && std::abs(a.d_E) < 1e-6 * scale) {
        add_warning(r, Warning::NearPole);
        return;
      }
    } catch (const Error&) {
      // midpoint inside the excluded window: not a pole
    }
  }
}

double tail_magnitude(const Integrand& f, double E) {
  double m = 0.0;
  for (double scale : {1.0, 0.97, 0.93}) m = std::max(m, std::abs(f(E * scale)));
  return m;
}

// Cutoff pushed out until the exponential tail is below abs_tol.
double cutoff(const Integrand& f, double rate, const QuadratureOptions& opts) {
  double E_max = opts.E_max_factor / rate;
  for (int i = 0; i < 60 && tail_magnitude(f, E_max) / rate >= opts.abs_tol; ++i) E_max *= 1.5;
  return E_max;
}

std::vector<double> split_points(const PotentialSpec& pot, double E_max, bool with_unit) {
  std::vector<double> pts{0.0};
  if (with_unit && 1.0 < E_max) pts.push_back(1.0);
  for (double b : energy_breakpoints(pot)) {
    if (b < E_max) pts.push_back(b);
  }
  pts.push_back(E_max);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, b); }),
            pts.end());
  return pts;
}

}  // namespace

void append_threshold_panels(std::vector<Panel>& out, double a, double b, const PotentialSpec& pot,
                             int n) {
  const double delta = pot.Delta_tilde;
  const bool left_sing = a == 0.0 || (delta > 0.0 && a == delta);
  const bool right_sing = delta > 0.0 && b == delta;
  if (left_sing && right_sing) {
    const double mid = 0.5 * (a + b);
    for (const Panel& p : make_panels(a, mid, PanelMap::SqrtFromLeft, n)) out.push_back(p);
    for (const Panel& p : make_panels(mid, b, PanelMap::SqrtFromRight, n)) out.push_back(p);
  } else if (left_sing) {
    for (const Panel& p : make_panels(a, b, PanelMap::SqrtFromLeft, n)) out.push_back(p);
  } else if (right_sing) {
    for (const Panel& p : make_panels(a, b, PanelMap::SqrtFromRight, n)) out.push_back(p);
  } else {
    for (const Panel& p : make_panels(a, b, PanelMap::Linear, n)) out.push_back(p);
  }
}

void QuadratureOptions::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(E_max_factor > 0.0) || !(epsilon_reg > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "quadrature tolerances and epsilon must be > 0");
  }
  if (richardson_levels < 1 || max_subdivisions < 0) {
    throw Error(ErrorCode::InvalidArgument, "richardson_levels >= 1, max_subdivisions >= 0");
  }
}

std::string_view to_string(Warning w) noexcept {
  switch (w) {
    case Warning::NearPole: return "NearPole";
    case Warning::ToleranceNotMet: return "ToleranceNotMet";
  }
  return "?";
}

std::vector<Panel> make_panels(double a, double b, PanelMap map, int n) {
  n = std::max(n, 1);
  double s_lo = 0.0, s_hi = 0.0, anchor = 0.0;
  switch (map) {
    case PanelMap::Linear:
      s_lo = a;
      s_hi = b;
      break;
    case PanelMap::SqrtFromLeft:
      anchor = a;
      s_hi = std::sqrt(b - a);
      break;
    case PanelMap::SqrtFromRight:
      anchor = b;
      s_hi = std::sqrt(b - a);
      break;
    case PanelMap::Root:
      s_lo = std::sqrt(a);
      s_hi = std::sqrt(b);
      break;
  }
  std::vector<Panel> out;
  out.reserve(static_cast<std::size_t>(n));
  const double h = (s_hi - s_lo) / n;
  for (int i = 0; i < n; ++i) {
    Panel p;
    p.s0 = s_lo + i * h;
    p.s1 = i + 1 == n ? s_hi : s_lo + (i + 1) * h;
    p.map = map;
    p.anchor = anchor;
    out.push_back(p);
  }
  return out;
}

IntegralResult integrate_panels(const Integrand& f, std::vector<Panel> panels,
                                const QuadratureOptions& opts) {
  opts.validate();
  return adaptive(f, std::move(panels), opts).result;
}

std::vector<double> energy_breakpoints(const PotentialSpec& pot) {
  std::vector<double> pts;
  if (pot.Delta_tilde > 0.0) pts.push_back(pot.Delta_tilde);
  if (pot.U_tilde > 0.0) pts.push_back(pot.U_tilde);
  if (pot.U_tilde < 0.0) pts.push_back(-pot.U_tilde);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

IntegralResult integrate_damped(const Integrand& f, double beta, const PotentialSpec& pot,
                                const QuadratureOptions& opts) {
  opts.validate();
  pot.validate();
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidArgument, "beta must be finite and > 0");
  }
  const double E_max = cutoff(f, beta, opts);
  const std::vector<double> pts = split_points(pot, E_max, true);
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) append_threshold_panels(panels, pts[i], pts[i + 1], pot, 4);
  AdaptiveOutcome o = adaptive(f, std::move(panels), opts);
  check_poles(o.result, o.panels, pot);
  return o.result;
}

namespace {

// Initial partition for a phase exp(-i E t): E-width <= pi / (4t) below
// E_stationary, then E = s^2 panels each spanning about half a period.
std::vector<Panel> oscillatory_panels(double t, double E_max, const PotentialSpec& pot) {
  double E_stationary = 1.0;
  for (double b : energy_breakpoints(pot)) E_stationary = std::max(E_stationary, 2.0 * b);
  E_stationary = std::max(E_stationary, 10.0 / t);
  E_stationary = std::min(E_stationary, E_max);

  const double width = std::numbers::pi / (4.0 * t);
  const std::vector<double> pts = split_points(pot, E_stationary, true);
  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const int n = std::max(2, static_cast<int>(std::ceil(2.0 * (b - a) / width)));
    append_threshold_panels(panels, a, b, pot, n);
  }
  double s = std::sqrt(E_stationary);
  const double s_max = std::sqrt(E_max);
  while (s < s_max) {
    const double next = std::min(s_max, s + std::numbers::pi / (2.0 * t * s));
    Panel p;
    p.s0 = s;
    p.s1 = next;
    p.map = PanelMap::Root;
    panels.push_back(p);
    s = next;
  }
  return panels;
}

}  // namespace

std::vector<RegularizedLevel> regularized_levels(const Integrand& f, double t,
                                                 const PotentialSpec& pot,
                                                 const QuadratureOptions& opts) {
  opts.validate();
  pot.validate();
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::InvalidArgument, "t must be finite and > 0");
  }
  std::vector<RegularizedLevel> levels;
  double eps = opts.epsilon_reg;
  for (int j = 0; j < opts.richardson_levels; ++j, eps *= 0.5) {
    const Integrand damped = [&f, eps](double E) { return f(E) * std::exp(-eps * E); };
    const double E_max = cutoff(damped, eps, opts);
    AdaptiveOutcome o = adaptive(damped, oscillatory_panels(t, E_max, pot), opts);
    check_poles(o.result, o.panels, pot);
    levels.push_back({eps, std::move(o.result)});
  }
  return levels;
}

IntegralResult integrate_oscillatory(const Integrand& f, double t, const PotentialSpec& pot,
                                     const QuadratureOptions& opts) {
  const std::vector<RegularizedLevel> levels = regularized_levels(f, t, pot, opts);
  const std::size_t L = levels.size();

  IntegralResult out;
  double quad_err = 0.0;
  for (const auto& lv : levels) {
    out.evaluations += lv.integral.evaluations;
    quad_err += lv.integral.error_estimate;
    for (Warning w : lv.integral.warnings) add_warning(out, w);
  }

  // Neville table for an error expansion in integer powers of eps.
  std::vector<std::vector<cplx>> R(L);
  for (std::size_t j = 0; j < L; ++j) {
    R[j].resize(j + 1);
    R[j][0] = levels[j].integral.value;
    for (std::size_t m = 1; m <= j; ++m) {
      const double factor = std::ldexp(1.0, static_cast<int>(m)) - 1.0;
      R[j][m] = R[j][m - 1] + (R[j][m - 1] - R[j - 1][m - 1]) / factor;
    }
  }
  out.value = R[L - 1][L - 1];
  double extrap_err = 0.0;
  if (L >= 2) extrap_err = std::abs(R[L - 1][L - 1] - R[L - 1][L - 2]);
  if (L >= 3) {
    const double prev = std::abs(R[L - 2][L - 2] - R[L - 2][L - 3]);
    const double noise = 10.0 * quad_err + opts.abs_tol + 1e-14 * std::abs(out.value);
    if (extrap_err > prev && extrap_err > noise) {
      throw Error(ErrorCode::ExtrapolationUnstable,
                  "Richardson corrections grow: " + std::to_string(extrap_err) + " > " +
                      std::to_string(prev));
    }
  }
  out.error_estimate = extrap_err + quad_err;
  if (out.error_estimate > std::max(opts.rel_tol * std::abs(out.value), opts.abs_tol)) {
    add_warning(out, Warning::ToleranceNotMet);
  }
  return out;
}

NodeSet fixed_nodes(std::span<const Panel> panels) {
  NodeSet ns;
  ns.E.reserve(panels.size() * 21);
  ns.weight.reserve(panels.size() * 21);
  for (const Panel& p : panels) {
    const double centr = 0.5 * (p.s0 + p.s1);
    const double hlgth = 0.5 * (p.s1 - p.s0);
    auto push = [&](double s, double w) {
      const MappedPoint m = map_point(p, s);
      ns.E.push_back(m.E);
      ns.weight.push_back(w * hlgth * m.jacobian);
    };
    for (int j = 0; j < 10; ++j) {
      push(centr - hlgth * kXgk[j], kWgk[j]);
    }
    push(centr, kWgk[10]);
    for (int j = 9; j >= 0; --j) {
      push(centr + hlgth * kXgk[j], kWgk[j]);
    }
  }
  return ns;
}

}  // namespace rectprop
