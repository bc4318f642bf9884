#include "rectprop/oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "rectprop/engines.hpp"
#include "rectprop/error.hpp"

namespace rectprop {

namespace {

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", w);
  return buf;
}

using cplx = std::complex<double>;

// e^{-36.8} ~ 1e-16
constexpr double kTruncation = 36.8;

struct EigenPairs {
  std::vector<double> E;
  std::vector<double> Z;  // column-major, N x m
  int n = 0;
  int m = 0;

  double phi(int state, int node) const { return Z[static_cast<std::size_t>(state) * n + node]; }
};

EigenPairs eigenpairs_below(const GridSpec& grid, const PotentialSpec& pot, double E_max) {
  const Tridiagonal H = grid_hamiltonian(grid, pot);
  std::vector<double> d = H.diag;
  std::vector<double> e = H.off;
  e.push_back(0.0);
  const double vl = std::min({0.0, pot.U_tilde, pot.Delta_tilde}) - 1.0;
  EigenPairs ep;
  ep.n = grid.N;
  ep.E.resize(grid.N);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(grid.N));
  // Bounded by the count of states below E_max; size the workspace generously.
  const auto max_m = static_cast<std::size_t>(
      std::min<double>(grid.N, 2.0 * grid.L * std::sqrt(std::max(E_max - vl, 1.0)) / 3.0 + 64.0));
  ep.Z.resize(max_m * grid.N);
  lapack_int m = 0;
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'V', grid.N, d.data(), e.data(), vl, E_max, 0, 0, 0.0,
                     &m, ep.E.data(), ep.Z.data(), grid.N, isuppz.data());
  if (info != 0) {
    throw Error(ErrorCode::NoConvergence, "dstevr failed with info = " + std::to_string(info));
  }
  if (static_cast<std::size_t>(m) > max_m) {
    throw Error(ErrorCode::NoConvergence, "eigenvector workspace too small");
  }
  ep.m = m;
  ep.E.resize(m);
  ep.Z.resize(static_cast<std::size_t>(m) * grid.N);
  return ep;
}

struct Split {
  double continuum = 0.0;
  double bound = 0.0;
};

Split kernel_sum(const EigenPairs& ep, double beta, int i, int j, double h) {
  Split s;
  for (int n = 0; n < ep.m; ++n) {
    const double term = ep.phi(n, i) * std::exp(-beta * ep.E[n]) * ep.phi(n, j) / h;
    (ep.E[n] < 0.0 ? s.bound : s.continuum) += term;
  }
  return s;
}

// LU factors of the constant tridiagonal matrix (diag a_i, off-diagonal b).
struct ThomasFactors {
  std::vector<cplx> inv_denom;
  std::vector<cplx> upper;
  cplx off;
};

ThomasFactors thomas_factor(const std::vector<cplx>& a_diag, cplx off) {
  const std::size_t n = a_diag.size();
  ThomasFactors f;
  f.off = off;
  f.inv_denom.resize(n);
  f.upper.resize(n);
  cplx denom = a_diag[0];
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) denom = a_diag[i] - off * f.upper[i - 1];
    f.inv_denom[i] = 1.0 / denom;
    f.upper[i] = off * f.inv_denom[i];
  }
  return f;
}

void thomas_solve(const ThomasFactors& f, std::vector<cplx>& rhs) {
  const std::size_t n = rhs.size();
  rhs[0] *= f.inv_denom[0];
  for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - f.off * rhs[i - 1]) * f.inv_denom[i];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= f.upper[i] * rhs[i + 1];
}

// (1 + c H) psi_new = (1 - c H) psi_old with c = i dt / 2 (real time) or dt / 2.
void crank_nicolson(const GridSpec& grid, const PotentialSpec& pot, cplx c, int steps,
                    std::vector<cplx>& psi) {
  const Tridiagonal H = grid_hamiltonian(grid, pot);
  const std::size_t n = psi.size();
  const double off_h = H.off.empty() ? 0.0 : H.off[0];
  std::vector<cplx> lhs(n), rhs_diag(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    lhs[i] = 1.0 + c * H.diag[i];
    rhs_diag[i] = 1.0 - c * H.diag[i];
  }
  const ThomasFactors lu = thomas_factor(lhs, c * off_h);
  const cplx rhs_off = -c * off_h;
  for (int s = 0; s < steps; ++s) {
    rhs[0] = rhs_diag[0] * psi[0] + rhs_off * psi[1];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      rhs[i] = rhs_diag[i] * psi[i] + rhs_off * (psi[i - 1] + psi[i + 1]);
    }
    rhs[n - 1] = rhs_diag[n - 1] * psi[n - 1] + rhs_off * psi[n - 2];
    thomas_solve(lu, rhs);
    psi.swap(rhs);
  }
}

void check_walls(const GridSpec& grid, const std::vector<cplx>& psi) {
  double peak = 0.0;
  for (const auto& v : psi) peak = std::max(peak, std::abs(v));
  const int margin = static_cast<int>(std::lround(1.0 / grid.h()));
  double edge = 0.0;
  for (int j = 0; j < std::min(margin, grid.N); ++j) {
    edge = std::max({edge, std::abs(psi[j]), std::abs(psi[grid.N - 1 - j])});
  }
  if (edge > 1e-8 * peak) {
    throw Error(ErrorCode::BoxTooSmall,
                "wave function reaches the walls (relative weight " + format_weight(edge / peak) + ")");
  }
}

int cn_steps(const GridSpec& grid, double duration) {
  const double h = grid.h();
  return std::max(1, static_cast<int>(std::ceil(duration / (0.5 * h * h))));
}

}  // namespace

void GridSpec::validate() const {
  if (!(L > 2.0) || !std::isfinite(L) || N < 1000) {
    throw Error(ErrorCode::InvalidArgument, "grid needs L > 2 and N >= 1000");
  }
}

int GridSpec::nearest(double x_tilde) const noexcept {
  const int j = static_cast<int>(std::lround((x_tilde + L) / h())) - 1;
  return std::clamp(j, 0, N - 1);
}

Tridiagonal grid_hamiltonian(const GridSpec& grid, const PotentialSpec& pot) {
  grid.validate();
  pot.validate();
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  Tridiagonal H;
  H.diag.resize(grid.N);
  H.off.assign(grid.N - 1, -inv_h2);
  for (int j = 0; j < grid.N; ++j) {
    double x = grid.x(j);
    // nodes that should sit exactly on a jump
    if (std::abs(x) < 1e-6 * h) x = 0.0;
    if (std::abs(x - 1.0) < 1e-6 * h) x = 1.0;
    H.diag[j] = 2.0 * inv_h2 + pot.value_at(x);
  }
  return H;
}

ThermalOracle thermal_kernel_oracle(const GridSpec& grid, const PotentialSpec& pot, double beta,
                                    double x, double xp) {
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be > 0");
  const EigenPairs ep = eigenpairs_below(grid, pot, kTruncation / beta);
  const int i = grid.nearest(x);
  const int j = grid.nearest(xp);
  const double h = grid.h();

  ThermalOracle r;
  r.x_snapped = grid.x(i);
  r.xp_snapped = grid.x(j);
  r.snap_offset = std::max(std::abs(r.x_snapped - x), std::abs(r.xp_snapped - xp));
  r.states = ep.m;
  r.bound_states = static_cast<int>(std::count_if(ep.E.begin(), ep.E.end(), [](double E) { return E < 0.0; }));
  const Split s = kernel_sum(ep, beta, i, j, h);
  r.continuum = s.continuum;
  r.bound = s.bound;
  r.total = s.continuum + s.bound;

  const auto diag = [&](int k) {
    const Split d = kernel_sum(ep, beta, k, k, h);
    return std::abs(d.continuum + d.bound);
  };
  // A point in a region suppressed by e^{-beta Delta} has a diagonal made of
  // truncation remainders, so the larger diagonal sets the scale.
  const double scale = std::max(diag(i), diag(j));
  const int margin = static_cast<int>(std::lround(1.0 / h));
  const int walls[2] = {margin - 1, grid.N - margin};
  // Eigenvector components carry absolute errors of order eps max|phi_n|, so
  // wall weight below that floor is rounding noise, not leakage.
  std::vector<double> peak(ep.m, 0.0);
  for (int n = 0; n < ep.m; ++n) {
    for (int node = 0; node < ep.n; ++node) peak[n] = std::max(peak[n], std::abs(ep.phi(n, node)));
  }
  const auto floor_at = [&](int k) {
    double f = 0.0;
    for (int n = 0; n < ep.m; ++n) f += peak[n] * std::abs(ep.phi(n, k)) * std::exp(-beta * ep.E[n]) / h;
    return 100.0 * std::numeric_limits<double>::epsilon() * f;
  };
  for (int k : {i, j}) {
    const double noise = floor_at(k);
    for (int w : walls) {
      const Split b = kernel_sum(ep, beta, w, k, h);
      const double weight = std::max(0.0, std::abs(b.continuum + b.bound) - noise);
      r.boundary_weight = std::max(r.boundary_weight, weight / scale);
    }
  }
  if (r.boundary_weight > 1e-8) {
    throw Error(ErrorCode::BoxTooSmall,
                "relative kernel weight near the walls " + format_weight(r.boundary_weight) + " > 1e-8");
  }
  return r;
}

ExtrapolatedOracle thermal_kernel_extrapolated(const GridSpec& grid, const PotentialSpec& pot,
                                               double beta, double x, double xp) {
  ExtrapolatedOracle r;
  r.coarse = thermal_kernel_oracle(grid, pot, beta, x, xp);
  r.fine = thermal_kernel_oracle(grid.refined(), pot, beta, x, xp);
  const auto rich = [](double c, double f) { return (4.0 * f - c) / 3.0; };
  r.continuum = rich(r.coarse.continuum, r.fine.continuum);
  r.bound = rich(r.coarse.bound, r.fine.bound);
  r.total = r.continuum + r.bound;
  r.h_change = std::abs(r.fine.continuum - r.coarse.continuum);
  return r;
}

double semigroup_composition(const GridSpec& grid, const PotentialSpec& pot, double beta, double x,
                             double xp) {
  const EigenPairs ep = eigenpairs_below(grid, pot, 2.0 * kTruncation / beta);
  const int i = grid.nearest(x);
  const int j = grid.nearest(xp);
  const double h = grid.h();
  std::vector<double> left(grid.N), right(grid.N);
  for (int k = 0; k < grid.N; ++k) {
    double a = 0.0, b = 0.0;
    for (int n = 0; n < ep.m; ++n) {
      const double w = std::exp(-0.5 * beta * ep.E[n]) / h;
      a += ep.phi(n, i) * w * ep.phi(n, k);
      b += ep.phi(n, k) * w * ep.phi(n, j);
    }
    left[k] = a;
    right[k] = b;
  }
  double sum = 0.0;
  for (int k = 0; k < grid.N; ++k) sum += h * left[k] * right[k];
  return sum;
}

std::vector<cplx> sample_on_grid(const GridSpec& grid, const std::function<cplx(double)>& f) {
  grid.validate();
  std::vector<cplx> v(grid.N);
  for (int j = 0; j < grid.N; ++j) v[j] = f(grid.x(j));
  return v;
}

std::vector<cplx> realtime_oracle(const GridSpec& grid, const PotentialSpec& pot, double t,
                                  std::vector<cplx> psi) {
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t must be > 0");
  if (static_cast<int>(psi.size()) != grid.N) {
    throw Error(ErrorCode::InvalidArgument, "psi0 must have one value per grid node");
  }
  const int steps = cn_steps(grid, t);
  crank_nicolson(grid, pot, cplx{0.0, 0.5 * t / steps}, steps, psi);
  check_walls(grid, psi);
  return psi;
}

std::vector<cplx> imaginary_time_oracle(const GridSpec& grid, const PotentialSpec& pot, double tau,
                                        std::vector<cplx> psi) {
  if (!(tau > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau must be > 0");
  if (static_cast<int>(psi.size()) != grid.N) {
    throw Error(ErrorCode::InvalidArgument, "psi0 must have one value per grid node");
  }
  const int steps = cn_steps(grid, tau);
  crank_nicolson(grid, pot, cplx{0.5 * tau / steps, 0.0}, steps, psi);
  return psi;
}

cplx regularized_kernel_oracle(const GridSpec& grid, const PotentialSpec& pot, double x, double xp,
                               double t, double epsilon) {
  std::vector<cplx> psi(grid.N, 0.0);
  psi[grid.nearest(xp)] = 1.0 / grid.h();
  psi = imaginary_time_oracle(grid, pot, epsilon, std::move(psi));
  psi = realtime_oracle(grid, pot, t, std::move(psi));
  return psi[grid.nearest(x)];
}

std::vector<PointPair> standard_pairs() {
  return {{-2.0, -2.0}, {-1.0, -3.0}, {-0.5, -0.5}, {-4.0, -1.0},
          {0.5, -1.0},  {0.25, -0.5}, {0.75, -2.0}, {0.5, -0.3},
          {2.0, -1.0},  {1.5, -0.5},  {3.0, -2.0},  {1.2, -1.2}};
}

std::vector<OracleComparison> compare_standard_suite(double beta, const GridSpec& grid,
                                                     const QuadratureOptions& opts, double tol) {
  std::vector<OracleComparison> rows;
  for (double U : {-30.0, 10.0}) {
    for (double Delta : {0.0, 5.0}) {
      const PotentialSpec pot = make_potential(U, Delta);
      const std::size_t first = rows.size();
      double scale = 0.0;
      for (const PointPair& pp : standard_pairs()) {
        OracleComparison c;
        c.pot = pot;
        c.pair = pp;
        const KernelValue kv = density_matrix(EvaluationPoint::thermal(pp.x, pp.xp, beta), pot, opts);
        c.engine = kv.value.real();
        c.engine_error = kv.error_estimate;
        c.engine_bound = bound_state_density(pp.x, pp.xp, beta, pot);
        const ExtrapolatedOracle o = thermal_kernel_extrapolated(grid, pot, beta, pp.x, pp.xp);
        c.oracle_continuum = o.continuum;
        c.oracle_bound = o.bound;
        c.oracle_h_change = o.h_change;
        c.snap_offset = std::max(o.coarse.snap_offset, o.fine.snap_offset);
        c.difference = std::abs(c.engine - c.oracle_continuum);
        scale = std::max(scale, std::abs(c.oracle_continuum));
        rows.push_back(c);
      }
      for (std::size_t k = first; k < rows.size(); ++k) {
        rows[k].scale = scale;
        rows[k].passed = rows[k].difference <= tol * scale;
      }
    }
  }
  return rows;
}

}  // namespace rectprop
