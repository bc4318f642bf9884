#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "rectprop/engines.hpp"
#include "rectprop/error.hpp"
#include "rectprop/oracle.hpp"

using namespace rectprop;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

double thermal(double x, double xp, double beta, const PotentialSpec& pot) {
  return density_matrix(EvaluationPoint::thermal(x, xp, beta), pot).value.real();
}

// Free Gaussian packet of H = -d^2/dx^2, normalised on the real line.
cplx free_gaussian(double x, double center, double sigma, double k0, double t) {
  const cplx alpha = 1.0 + kI * t / (sigma * sigma);
  const double shift = x - center - 2.0 * k0 * t;
  return std::pow(2.0 * kPi * sigma * sigma, -0.25) / std::sqrt(alpha) *
         std::exp(-shift * shift / (4.0 * sigma * sigma * alpha) + kI * k0 * x - kI * k0 * k0 * t);
}

}  // namespace

TEST_SUITE("engines") {

TEST_CASE("free closed forms") {
  CHECK(free_density_closed(-2.0, -2.0, 10.0) == doctest::Approx(1.0 / (2.0 * std::sqrt(10.0 * kPi))).epsilon(1e-15));
  for (double beta : {0.3, 10.0}) {
    const cplx k = free_propagator_closed(-1.0, -3.5, cplx{0.0, -beta});
    CHECK(std::abs(k - free_density_closed(-1.0, -3.5, beta)) < 1e-15);
  }
  const cplx k = free_propagator_closed(1.0, 0.0, cplx{2.0, 0.0});
  CHECK(std::abs(k) == doctest::Approx(1.0 / std::sqrt(8.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("no potential reproduces the free kernels") {
  const PotentialSpec none{};
  for (double beta : {1.0, 10.0}) {
    const KernelValue r = density_matrix(EvaluationPoint::thermal(-2.0, -0.5, beta), none);
    CHECK(r.value.real() == doctest::Approx(free_density_closed(-2.0, -0.5, beta)).epsilon(1e-8));
    CHECK(r.value.imag() == 0.0);
    CHECK(r.mode == Mode::Thermal);
  }
  const KernelValue k = propagator(EvaluationPoint::real_time(-2.0, -0.5, 1.3), none);
  CHECK(std::abs(k.value - free_propagator_closed(-2.0, -0.5, cplx{1.3, 0.0})) < 1e-14);
  CHECK(k.mode == Mode::RealTime);

  // across the (absent) potential the whole kernel comes from quadrature
  const KernelValue right = density_matrix(EvaluationPoint::thermal(2.5, -1.0, 4.0), none);
  CHECK(right.value.real() == doctest::Approx(free_density_closed(2.5, -1.0, 4.0)).epsilon(1e-8));
}

TEST_CASE("density matrix matches frozen grid-oracle values") {
  // Continuum part of the h-extrapolated eigendecomposition oracle
  // (L = 40, h = 0.01 and 0.005), beta = 10.
  struct Case {
    double U, Delta, x, xp, oracle;
  };
  for (const Case& c : {Case{10.0, 0.0, 0.5, -1.0, 7.880684075598e-04},
                        Case{10.0, 5.0, 2.0, -1.0, 2.004098999798e-05},
                        Case{-30.0, 0.0, -2.0, -2.0, 3.368523755831e-02},
                        Case{-30.0, 5.0, 0.3, -0.5, -9.551742692631e-04}}) {
    const double e = thermal(c.x, c.xp, 10.0, {c.U, c.Delta});
    CHECK(std::abs(e - c.oracle) <= 1e-3 * std::abs(c.oracle));
    CHECK(std::abs(e - c.oracle) <= 1e-6 * std::abs(c.oracle));
  }
}

TEST_CASE("bound-state term of a well") {
  CHECK(bound_state_density(-2.0, -2.0, 10.0, {10.0, 0.0}) == 0.0);
  // frozen from the grid oracle's E_n < 0 part
  CHECK(bound_state_density(-2.0, -2.0, 10.0, {-30.0, 0.0}) == doctest::Approx(2.600035e+98).epsilon(1e-4));
  CHECK(bound_state_density(0.3, -0.5, 10.0, {-30.0, 5.0}) == doctest::Approx(7.013697e+105).epsilon(1e-4));
}

TEST_CASE("propagator matches the Crank-Nicolson kernel at matched epsilon") {
  QuadratureOptions o;
  o.richardson_levels = 1;
  o.epsilon_reg = 0.25;
  const PotentialSpec barrier{10.0, 0.0};
  const KernelValue e = propagator(EvaluationPoint::real_time(2.0, -3.0, 2.0), barrier, o);
  const cplx coarse = regularized_kernel_oracle({40.0, 1999}, barrier, 2.0, -3.0, 2.0, 0.25);
  const cplx fine = regularized_kernel_oracle({40.0, 3999}, barrier, 2.0, -3.0, 2.0, 0.25);
  const cplx oracle = (4.0 * fine - coarse) / 3.0;
  CHECK(std::abs(e.value - oracle) / std::abs(oracle) < 1e-4);
}

TEST_CASE("single-level propagator is the kernel at t - i eps") {
  QuadratureOptions o;
  o.richardson_levels = 1;
  o.epsilon_reg = 0.02;
  const KernelValue k = propagator(EvaluationPoint::real_time(-1.0, -2.5, 0.8), {}, o);
  const cplx ref = free_propagator_closed(-1.0, -2.5, cplx{0.8, -0.02});
  CHECK(std::abs(k.value - ref) / std::abs(ref) < 1e-8);
}

TEST_CASE("self-adjointness through the mirrored pairs") {
  for (const PotentialSpec& p : {PotentialSpec{10.0, 0.0}, PotentialSpec{-30.0, 5.0}}) {
    for (auto [x, xp] : std::vector<std::pair<double, double>>{{2.0, -1.0}, {0.4, -2.0}, {1.5, -0.3}}) {
      const double a = thermal(x, xp, 10.0, p);
      const double b = thermal(xp, x, 10.0, p);
      CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), 1e-12));
    }
  }
}

TEST_CASE("diffusion kernel is the density matrix under renaming") {
  const PotentialSpec p{10.0, 0.0};
  for (double b : {1.0, 3.7, 10.0}) {
    const KernelValue q = diffusion_kernel(EvaluationPoint::diffusion(1.2, -3.0, b), p);
    const KernelValue r = density_matrix(EvaluationPoint::thermal(1.2, -3.0, b), p);
    CHECK(std::memcmp(&q.value, &r.value, sizeof(cplx)) == 0);
    CHECK(q.mode == Mode::Diffusion);
    CHECK(q.value.real() >= -1e-10);
  }
  // evaluate dispatches on the mode
  const KernelValue d = evaluate(EvaluationPoint::diffusion(1.2, -3.0, 2.0), p);
  CHECK(d.mode == Mode::Diffusion);
}

TEST_CASE("barrier structure of the diagonal and the transmitted element") {
  const double r5 = thermal(-2.0, -2.0, 10.0, {5.0, 0.0});
  const double r50 = thermal(-2.0, -2.0, 10.0, {50.0, 0.0});
  CHECK(r50 < r5);
  const double h = 0.5;
  const double slope5 = (thermal(-2.0, -2.0, 10.0, {5.0 + h, 0.0}) - thermal(-2.0, -2.0, 10.0, {5.0 - h, 0.0})) / (2 * h);
  const double slope250 =
      (thermal(-2.0, -2.0, 10.0, {250.0 + h, 0.0}) - thermal(-2.0, -2.0, 10.0, {250.0 - h, 0.0})) / (2 * h);
  CHECK(std::abs(slope250) < std::abs(slope5));

  const double t1 = thermal(2.0, -10.0, 10.0, {1.0, 0.0});
  const double t100 = thermal(2.0, -10.0, 10.0, {100.0, 0.0});
  CHECK(std::abs(t100) < 1e-3 * std::abs(t1));
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(density_matrix(EvaluationPoint::thermal(0.5, 0.3, 1.0), {10.0, 0.0}), Error);
  try {
    density_matrix(EvaluationPoint::thermal(0.5, 0.3, 1.0), {10.0, 0.0});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedRegion);
  }
  CHECK_THROWS_AS(density_matrix(EvaluationPoint::thermal(-1.0, -2.0, -1.0), {}), Error);
  CHECK_THROWS_AS(density_matrix(EvaluationPoint::thermal(1.0, -2.0, 1.0), {}), Error);
}

TEST_CASE("amplitude cache") {
  AmplitudeCache cache;
  const PotentialSpec p{10.0, 5.0};
  const AmplitudeSet a = cache.get(3.0, p);
  const AmplitudeSet b = cache.get(3.0, p);
  CHECK(cache.size() == 1);
  CHECK(cache.hits() == 1);
  CHECK(a.t == b.t);
  CHECK(a.t == amplitude_set(3.0, p).t);
  cache.clear();
  CHECK(cache.size() == 0);

  const KernelValue with = density_matrix(EvaluationPoint::thermal(-1.0, -2.0, 10.0), p, {}, &cache);
  const KernelValue again = density_matrix(EvaluationPoint::thermal(-1.0, -2.0, 10.0), p, {}, &cache);
  CHECK(cache.hits() > 0);
  CHECK(std::memcmp(&with.value, &again.value, sizeof(cplx)) == 0);
}

TEST_CASE("free packet spreads like the analytic Gaussian") {
  const double center = -24.0, sigma = 2.0, k0 = std::sqrt(5.0), t = 2.0;
  const Packet psi0 = gaussian_packet(center, sigma, k0, 0.01, 11.0);
  double norm = 0.0;
  for (const cplx& v : psi0.psi) norm += std::norm(v) * psi0.h;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi0.x(psi0.psi.size() - 1) < 0.0);

  std::vector<double> dest;
  for (double x = -30.0; x <= 4.0; x += 0.25) dest.push_back(x + 0.013);
  const PacketEvolution ev = evolve_packet(psi0, dest, t, {});
  double worst = 0.0;
  for (std::size_t i = 0; i < dest.size(); ++i) {
    worst = std::max(worst, std::abs(ev.psi[i] - free_gaussian(dest[i], center, sigma, k0, t)));
    CHECK(ev.density[i] == doctest::Approx(std::norm(ev.psi[i])));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("packet evolution conserves the norm across the barrier") {
  const Packet psi0 = gaussian_packet(-24.0, 2.0, std::sqrt(5.0), 0.01, 11.0);
  std::vector<double> dest;
  const double dx = 0.1;
  for (double x = -70.0 + 0.5 * dx; x < 70.0; x += dx) dest.push_back(x);
  const PacketEvolution ev = evolve_packet(psi0, dest, 10.0, {10.0, 0.0});
  double norm = 0.0;
  for (double d : ev.density) norm += d * dx;
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(ev.error_estimate < 1e-6);
}

TEST_CASE("packet support is checked") {
  const Packet late = gaussian_packet(-3.0, 2.0, 1.0, 0.01, 11.0);
  try {
    evolve_packet(late, {-1.0}, 1.0, {});
    FAIL("expected SupportViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportViolation);
  }
}

TEST_CASE("flux oracle") {
  const Packet psi0 = gaussian_packet(-24.0, 2.0, std::sqrt(5.0), 0.01, 11.0);
  const FluxEstimate none = flux_transmission(psi0, {});
  CHECK(none.transmitted == doctest::Approx(1.0).epsilon(1e-8));
  const FluxEstimate f = flux_transmission(psi0, {10.0, 0.0});
  CHECK(f.transmitted > 0.0);
  CHECK(f.transmitted < 0.2);
  CHECK(f.backward_weight < 1e-12);
}

TEST_CASE("sweeps keep going past failing rows and keep their order") {
  SweepSpec s;
  s.mode = Mode::Thermal;
  s.parameter = SweepParameter::x_tilde;
  s.lo = -1.0;
  s.hi = 3.0;
  s.samples = 5;  // x = 1 is on the jump
  s.fixed = EvaluationPoint::thermal(-1.0, -2.0, 5.0);
  s.pot = {10.0, 0.0};
  const auto one = sweep(s, {}, 1);
  const auto many = sweep(s, {}, 4);
  REQUIRE(one.size() == 5);
  REQUIRE(many.size() == 5);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].parameter == -1.0 + static_cast<double>(i));
    CHECK(one[i].parameter == many[i].parameter);
    CHECK(one[i].value.has_value() == many[i].value.has_value());
    if (one[i].value) CHECK(std::memcmp(&one[i].value->value, &many[i].value->value, sizeof(cplx)) == 0);
  }
  CHECK(!one[2].value);
  CHECK(one[2].error.find("BoundaryPoint") != std::string::npos);
  CHECK(!one[1].value);  // x = 0 is a jump as well
  CHECK(one[0].value.has_value());
  CHECK(one[3].value.has_value());

  s.inner_parameter = SweepParameter::time;
  s.inner_lo = 1.0;
  s.inner_hi = 2.0;
  s.inner_samples = 3;
  const auto grid = sweep(s, {}, 2);
  REQUIRE(grid.size() == 15);
  CHECK(grid[1].inner == 1.5);
  CHECK(grid[1].parameter == -1.0);
  CHECK(grid[3].parameter == 0.0);

  s.samples = 1;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("figure presets") {
  const SweepSpec f1 = figure_preset(1);
  CHECK(f1.lo == -300.0);
  CHECK(f1.hi == 0.0);
  CHECK(f1.fixed.x_tilde == -2.0);
  CHECK(f1.fixed.time == 10.0);
  const SweepSpec f5 = figure_preset(5);
  CHECK(f5.mode == Mode::Diffusion);
  CHECK(f5.pot.U_tilde == 10.0);
  CHECK(f5.inner_parameter.has_value());
  CHECK(figure_preset(6).pot.U_tilde == 0.0);
  CHECK_THROWS_AS(figure_preset(7), Error);
}

}
