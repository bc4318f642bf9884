#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "rectprop/engines.hpp"
#include "rectprop/error.hpp"
#include "rectprop/oracle.hpp"

using namespace rectprop;

namespace {

constexpr double kPi = std::numbers::pi;
using cd = std::complex<double>;

// Number of eigenvalues of a symmetric tridiagonal matrix below lambda
// (Sturm sequence).
int count_below(const Tridiagonal& m, double lambda) {
  int count = 0;
  double q = m.diag[0] - lambda;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < m.diag.size(); ++i) {
    const double prev = q == 0.0 ? 1e-300 : q;
    q = m.diag[i] - lambda - m.off[i - 1] * m.off[i - 1] / prev;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (k = 0, 1, ...) by bisection on the Sturm count.
double eigenvalue(const Tridiagonal& m, int k, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(m, mid) > k) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

cd free_gaussian(double x, double center, double sigma, double k0, double t) {
  const cd alpha = 1.0 + cd{0.0, 1.0} * t / (sigma * sigma);
  const double shift = x - center - 2.0 * k0 * t;
  return std::pow(2.0 * kPi * sigma * sigma, -0.25) / std::sqrt(alpha) *
         std::exp(-shift * shift / (4.0 * sigma * sigma * alpha) + cd{0.0, k0 * x} - cd{0.0, k0 * k0 * t});
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("grid geometry") {
  const GridSpec g;
  CHECK(g.h() == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(g.x(g.nearest(0.0)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(g.x(g.nearest(1.0)) - 1.0) < 1e-12);
  CHECK(std::abs(g.x(g.nearest(-2.0)) + 2.0) < 1e-12);
  const GridSpec f = g.refined();
  CHECK(f.h() == doctest::Approx(0.5 * g.h()).epsilon(1e-14));
  CHECK(std::abs(f.x(2 * 100 + 1) - g.x(100)) < 1e-12);
  CHECK_THROWS_AS((GridSpec{40.0, 999}.validate()), Error);
  CHECK_THROWS_AS((GridSpec{1.0, 2000}.validate()), Error);
}

TEST_CASE("stencil rows sum to the potential") {
  const GridSpec g{40.0, 1999};
  const PotentialSpec p{10.0, 5.0};
  const Tridiagonal m = grid_hamiltonian(g, p);
  REQUIRE(m.diag.size() == 1999);
  REQUIRE(m.off.size() == 1998);
  for (std::size_t i = 1; i + 1 < m.diag.size(); ++i) {
    const double kinetic = m.diag[i] - p.value_at(g.x(static_cast<int>(i))) + m.off[i - 1] + m.off[i];
    CHECK(std::abs(kinetic) < 1e-9);
  }
  // the jump nodes take the mean of both sides
  CHECK(p.value_at(0.0) == 5.0);
  CHECK(p.value_at(1.0) == 7.5);
}

TEST_CASE("empty box eigenvalues") {
  const GridSpec g{20.0, 3999};
  const Tridiagonal m = grid_hamiltonian(g, {});
  for (int n = 1; n <= 5; ++n) {
    const double exact = kPi * kPi * n * n / (4.0 * g.L * g.L);
    const double e = eigenvalue(m, n - 1, 0.0, 1.0);
    CHECK(std::abs(e - exact) <= exact * exact * g.h() * g.h());
  }
}

TEST_CASE("a deep well binds") {
  const Tridiagonal m = grid_hamiltonian({}, {-30.0, 0.0});
  const int bound = count_below(m, 0.0);
  CHECK(bound >= 1);
  CHECK(count_below(m, -30.0) == 0);
  const auto roots = find_bound_states({-30.0, 0.0});
  REQUIRE(static_cast<int>(roots.size()) == bound);
  for (int n = 0; n < bound; ++n) {
    CHECK(eigenvalue(m, n, -30.0, 0.0) == doctest::Approx(roots[n]).epsilon(1e-3));
  }
}

TEST_CASE("free thermal kernel") {
  const ThermalOracle o = thermal_kernel_oracle({}, {}, 10.0, -2.0, -2.0);
  CHECK(std::abs(o.continuum - 0.089206) < 1e-4);
  CHECK(o.bound == 0.0);
  CHECK(o.bound_states == 0);
  CHECK(o.snap_offset < 1e-12);
  CHECK(o.boundary_weight < 1e-8);
  CHECK(o.total == o.continuum);
}

TEST_CASE("second-order convergence in h") {
  const double exact = free_density_closed(-1.0, -3.0, 2.0);
  const double coarse = thermal_kernel_oracle({20.0, 1999}, {}, 2.0, -1.0, -3.0).continuum;
  const double fine = thermal_kernel_oracle({20.0, 3999}, {}, 2.0, -1.0, -3.0).continuum;
  const double ratio = std::abs(coarse - exact) / std::abs(fine - exact);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);

  const ExtrapolatedOracle x = thermal_kernel_extrapolated({20.0, 1999}, {}, 2.0, -1.0, -3.0);
  CHECK(std::abs(x.continuum - exact) < 0.1 * std::abs(fine - exact));
  CHECK(x.h_change == doctest::Approx(std::abs(fine - coarse)));
}

TEST_CASE("semigroup composition") {
  for (const PotentialSpec& p : {PotentialSpec{10.0, 0.0}, PotentialSpec{-30.0, 5.0}}) {
    const GridSpec g{40.0, 3999};
    const double beta = p.U_tilde < 0 ? 0.5 : 4.0;
    const double direct = thermal_kernel_oracle(g, p, beta, 0.5, -1.0).total;
    const double composed = semigroup_composition(g, p, beta, 0.5, -1.0);
    CHECK(std::abs(direct - composed) <= 1e-6 * std::abs(direct));
  }
}

TEST_CASE("box too small") {
  try {
    thermal_kernel_oracle({6.0, 1199}, {}, 20.0, -2.0, -2.0);
    FAIL("expected BoxTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BoxTooSmall);
  }
}

TEST_CASE("Crank-Nicolson: norm and free spreading") {
  const GridSpec g{30.0, 5999};
  const double center = -10.0, sigma = 2.0, k0 = 1.0, t = 1.0;
  const auto psi0 = sample_on_grid(g, [&](double x) { return free_gaussian(x, center, sigma, k0, 0.0); });
  const auto psi = realtime_oracle(g, {}, t, psi0);
  double n0 = 0.0, n1 = 0.0, worst = 0.0;
  for (int j = 0; j < g.N; ++j) {
    n0 += std::norm(psi0[j]);
    n1 += std::norm(psi[j]);
    worst = std::max(worst, std::abs(psi[j] - free_gaussian(g.x(j), center, sigma, k0, t)));
  }
  CHECK(std::abs(n1 - n0) / n0 < 1e-9);
  CHECK(worst < 1e-5);
}

TEST_CASE("Crank-Nicolson wall check") {
  const GridSpec g{10.0, 1999};
  const auto psi0 = sample_on_grid(g, [](double x) { return free_gaussian(x, -6.0, 1.0, -3.0, 0.0); });
  CHECK_THROWS_AS(realtime_oracle(g, {}, 2.0, psi0), Error);
}

TEST_CASE("imaginary-time stepping agrees with the eigen-sum") {
  const GridSpec g{40.0, 3999};
  const PotentialSpec p{10.0, 0.0};
  const double tau = 1.0;
  std::vector<cd> delta(g.N, 0.0);
  delta[g.nearest(-1.0)] = 1.0 / g.h();
  const auto out = imaginary_time_oracle(g, p, tau, delta);
  const double eig = thermal_kernel_oracle(g, p, tau, 0.5, -1.0).total;
  CHECK(std::abs(out[g.nearest(0.5)].real() - eig) < 1e-4 * std::abs(eig));
}

}
