#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rectprop/amplitudes.hpp"
#include "rectprop/error.hpp"
#include "transfer_matrix.hpp"

using namespace rectprop;
using rectprop::testing::rectangular_scatter;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<PotentialSpec> kPotentials = {{10.0, 0.0}, {-30.0, 0.0}, {10.0, 5.0}, {-30.0, 5.0}};

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

double threshold(const PotentialSpec& p) { return std::max({0.0, p.U_tilde, p.Delta_tilde}); }

}  // namespace

TEST_SUITE("amplitudes") {

TEST_CASE("wave_number branch rule") {
  CHECK(wave_number(4.0, 0.0) == cplx{2.0, 0.0});
  CHECK(wave_number(1.0, 5.0) == cplx{0.0, 2.0});
  CHECK(wave_number(3.0, 3.0) == cplx{0.0, 0.0});
  for (double E : {-7.5, -0.1, 0.0, 0.3, 12.0}) {
    for (double off : {-30.0, 0.0, 5.0}) {
      const cplx k = wave_number(E, off);
      CHECK(std::abs(k * k - (E - off)) <= 1e-14 * std::max(1.0, std::abs(E - off)));
      CHECK((k.imag() == 0.0 ? k.real() >= 0.0 : (k.real() == 0.0 && k.imag() > 0.0)));
    }
  }
}

TEST_CASE("fourth_root_velocity principal roots") {
  CHECK(fourth_root_velocity({4.0, 0.0}) == cplx{2.0, 0.0});
  const cplx r = fourth_root_velocity({0.0, 1.0});
  CHECK(r.real() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(r.imag() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(fourth_root_velocity({0.0, 0.0}) == cplx{0.0, 0.0});
  for (cplx k : {cplx{2.5, 0.0}, cplx{0.0, 3.7}, cplx{0.0, 1e-3}}) {
    const cplx s = fourth_root_velocity(k);
    CHECK(std::abs(s * s - k) <= 1e-14 * std::abs(k));
  }
  for (cplx bad : {cplx{-1.0, 0.0}, cplx{0.0, -2.0}, cplx{1.0, 1.0}}) {
    try {
      fourth_root_velocity(bad);
      FAIL("expected BranchViolation");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BranchViolation);
    }
  }
}

TEST_CASE("no potential: r = 0 and t = exp(i sqrt(E))") {
  const PotentialSpec free{0.0, 0.0};
  for (double E : {0.01, 1.0, 7.3, 100.0}) {
    const AmplitudeSet a = amplitude_set(E, free);
    CHECK(std::abs(a.r) < 1e-15);
    CHECK(std::abs(a.t - std::exp(cplx{0.0, std::sqrt(E)})) < 1e-14);
    CHECK(std::abs(a.d_E - 4.0 * E) < 1e-12 * E);
  }
}

TEST_CASE("reflectionless energy above a well") {
  const PotentialSpec well{-30.0, 0.0};
  const double E = 4.0 * kPi * kPi - 30.0;
  const AmplitudeSet a = amplitude_set(E, well);
  CHECK(std::abs(a.r) < 1e-10);
  CHECK(std::abs(a.t) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("amplitudes match the transfer-matrix reference") {
  for (const PotentialSpec& p : kPotentials) {
    for (double E : log_grid(threshold(p) + 1e-3, threshold(p) + 200.0, 60)) {
      const AmplitudeSet a = amplitude_set(E, p);
      const auto ref = rectangular_scatter(E, p.U_tilde, p.Delta_tilde);
      CHECK(std::abs(a.t - ref.t) < 1e-10);
      CHECK(std::abs(a.r - ref.r) < 1e-10);
    }
  }
  // tunnelling region of the barrier
  const PotentialSpec barrier{10.0, 0.0};
  for (double E : {0.5, 2.0, 5.0, 9.5}) {
    const AmplitudeSet a = amplitude_set(E, barrier);
    const auto ref = rectangular_scatter(E, 10.0, 0.0);
    CHECK(std::abs(a.t - ref.t) < 1e-12);
    CHECK(std::abs(a.r - ref.r) < 1e-12);
  }
}

TEST_CASE("barrier at E = 5 conserves flux") {
  const AmplitudeSet a = amplitude_set(5.0, {10.0, 0.0});
  CHECK(std::abs(std::norm(a.r) + std::norm(a.t) - 1.0) < 1e-12);
}

TEST_CASE("unitarity on a 1000-point log grid") {
  for (const PotentialSpec& p : kPotentials) {
    double worst = 0.0;
    for (double E : log_grid(threshold(p) + 1e-6, threshold(p) + 1e4, 1000)) {
      const AmplitudeSet a = amplitude_set(E, p);
      worst = std::max(worst, std::abs(std::norm(a.r) + std::norm(a.t) - 1.0));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("tunnelling keeps |r|^2 + |t|^2 = 1") {
  for (double E : {5.5, 7.0, 9.9}) {
    const AmplitudeSet a = amplitude_set(E, {10.0, 5.0});
    CHECK(std::abs(std::norm(a.r) + std::norm(a.t) - 1.0) < 1e-12);
  }
}

TEST_CASE("resonances of a square well sit at k_u = n pi") {
  const PotentialSpec well{-30.0, 0.0};
  for (int n = 2; n <= 5; ++n) {
    const double guess = kPi * kPi * n * n - 30.0;
    // bisect Re(r e^{-i phase}) near the guess: locate the minimum of |r|
    double lo = guess - 0.5, hi = guess + 0.5;
    for (int it = 0; it < 200; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (std::abs(amplitude_set(m1, well).r) < std::abs(amplitude_set(m2, well).r)) hi = m2;
      else lo = m1;
    }
    const double E = 0.5 * (lo + hi);
    CHECK(E == doctest::Approx(guess).epsilon(1e-9));
    CHECK(std::abs(amplitude_set(E, well).r) < 1e-10);
  }
}

TEST_CASE("branch continuity across thresholds") {
  // Near a threshold the amplitudes are power series in u = |E - E0|^{1/4}
  // on each side; Richardson in u (u halved each level) gives the one-sided
  // limits.
  const auto one_sided = [](const PotentialSpec& p, double E0, double side, auto pick) {
    constexpr int levels = 6;
    cplx table[levels][levels];
    for (int j = 0; j < levels; ++j) {
      const double u = 0.1 / std::pow(2.0, j);
      table[j][0] = pick(amplitude_set(E0 + side * u * u * u * u, p));
      for (int m = 1; m <= j; ++m) {
        const double f = std::pow(2.0, m);
        table[j][m] = table[j][m - 1] + (table[j][m - 1] - table[j - 1][m - 1]) / (f - 1.0);
      }
    }
    return table[levels - 1][levels - 1];
  };
  const auto t_of = [](const AmplitudeSet& a) { return a.t; };
  const auto r_of = [](const AmplitudeSet& a) { return a.r; };
  for (const PotentialSpec& p : kPotentials) {
    std::vector<double> points;
    if (p.Delta_tilde > 0.0) points.push_back(p.Delta_tilde);
    if (p.U_tilde < 0.0) points.push_back(-p.U_tilde);
    for (double E0 : points) {
      CHECK(std::abs(one_sided(p, E0, -1.0, t_of) - one_sided(p, E0, 1.0, t_of)) < 1e-8);
      CHECK(std::abs(one_sided(p, E0, -1.0, r_of) - one_sided(p, E0, 1.0, r_of)) < 1e-8);
      const AmplitudeSet at = amplitude_set(E0, p);
      CHECK(std::abs(one_sided(p, E0, 1.0, r_of) - at.r) < 1e-8);
    }
  }
}

TEST_CASE("removable point E = U is excluded") {
  const PotentialSpec barrier{10.0, 0.0};
  try {
    amplitude_set(10.0 + 5e-10, barrier);
    FAIL("expected NearSingularEnergy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NearSingularEnergy);
  }
  // finite limits on both sides
  const AmplitudeSet lo = amplitude_set(10.0 - 1e-6, barrier);
  const AmplitudeSet hi = amplitude_set(10.0 + 1e-6, barrier);
  CHECK(std::abs(lo.t - hi.t) < 1e-5);
}

TEST_CASE("negative energies give real t and r for a barrier") {
  for (double Delta : {0.0, 5.0}) {
    const PotentialSpec p{10.0, Delta};
    for (double E = -50.0; E < 0.0; E += 0.37) {
      const AmplitudeSet a = amplitude_set(E, p);
      CHECK(std::abs(a.t.imag()) <= 1e-12 * std::max(1.0, std::abs(a.t)));
      CHECK(std::abs(a.r.imag()) <= 1e-12 * std::max(1.0, std::abs(a.r)));
    }
  }
}

TEST_CASE("single-step amplitudes") {
  const StepAmplitudes same = step_amplitudes({2.0, 0.0}, {2.0, 0.0});
  CHECK(std::abs(same.r_gt) == 0.0);
  CHECK(std::abs(same.t_s - 1.0) < 1e-15);

  const StepAmplitudes s = step_amplitudes({1.0, 0.0}, {3.0, 0.0});
  CHECK(s.r_gt == cplx{0.5, 0.0});
  CHECK(s.r_lt == cplx{-0.5, 0.0});
  CHECK(s.t_s.real() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-15));
  CHECK(std::abs(s.r_gt * s.r_gt + s.t_s * s.t_s - 1.0) < 1e-12);

  CHECK_THROWS_AS(step_amplitudes({0.0, 0.0}, {0.0, 0.0}), Error);
}

TEST_CASE("t-matrices resum the effective potentials") {
  const std::vector<std::pair<cplx, cplx>> pairs = {
      {{1.0, 0.0}, {3.0, 0.0}}, {{2.0, 0.0}, {0.0, 1.5}}, {{0.0, 0.7}, {4.0, 0.0}}, {{5.0, 0.0}, {4.9, 0.0}}};
  for (auto [kl, kr] : pairs) {
    const StepAmplitudes s = step_amplitudes(kl, kr);
    CHECK(s.r_gt == -s.r_lt);
    const cplx channels[3][3] = {
        {s.T_gt, s.H_gt, s.G_gt}, {s.T_lt, s.H_lt, s.G_lt}, {s.T_trans, s.H_trans, s.G_trans}};
    for (const auto& c : channels) {
      const cplx closed = c[1] / (1.0 - c[2] * c[1]);
      CHECK(std::abs(c[0] - closed) <= 1e-12 * std::max(1.0, std::abs(closed)));
      // Born series where it converges
      if (std::abs(c[2] * c[1]) < 0.9) {
        cplx sum{0.0, 0.0}, term = c[1];
        for (int n = 0; n < 2000 && std::abs(term) > 1e-18; ++n) {
          sum += term;
          term *= c[2] * c[1];
        }
        CHECK(std::abs(sum - closed) <= 1e-10 * std::abs(closed));
      }
    }
  }
}

TEST_CASE("bound states of a well are found and absent for a barrier") {
  CHECK(find_bound_states({10.0, 0.0}).empty());
  const auto roots = find_bound_states({-30.0, 0.0});
  REQUIRE(roots.size() == 2);
  // even / odd square-well conditions q tan(q/2) = kappa, -q cot(q/2) = kappa
  const auto even = [](double E) {
    const double q = std::sqrt(E + 30.0), kappa = std::sqrt(-E);
    return q * std::tan(0.5 * q) - kappa;
  };
  const auto odd = [](double E) {
    const double q = std::sqrt(E + 30.0), kappa = std::sqrt(-E);
    return -q / std::tan(0.5 * q) - kappa;
  };
  CHECK(std::abs(even(roots[0])) < 1e-8);
  CHECK(std::abs(odd(roots[1])) < 1e-8);
  CHECK(roots[0] == doctest::Approx(-24.79).epsilon(1e-3));
  CHECK(roots[1] == doctest::Approx(-10.54).epsilon(1e-3));
  for (double E : roots) {
    const AmplitudeSet a = amplitude_set(E - 1e-3, {-30.0, 0.0});
    const AmplitudeSet b = amplitude_set(E + 1e-3, {-30.0, 0.0});
    // d changes sign through the root, so |t| peaks there
    CHECK(std::abs(a.t) > 1e3);
    CHECK(std::abs(b.t) > 1e3);
  }
}

}
