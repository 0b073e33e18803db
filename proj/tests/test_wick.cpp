#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spectral.hpp"
#include "util.hpp"
#include "wick.hpp"

using namespace pam;

namespace {

NoiseRealization zero_noise(int K) {
  NoiseRealization nr;
  nr.seed = 0;
  nr.xi.assign(static_cast<std::size_t>(K), 0.0);
  return nr;
}

// One-mode hierarchy has the closed form u_(n)(t) = c B^n e^{-t} t^n / sqrt(n!)
// with B the self-interaction coefficient of the first mode.
double one_mode_exact(double c, int n, double t) {
  const double B = triple_coeff(1, 1, 1);
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  return c * std::pow(B, n) * std::exp(-t) * std::pow(t, n) / std::sqrt(fact);
}

}  // namespace

TEST_CASE("level sizes follow the composition count") {
  const SpectralField phi = project([](double x) { return std::sin(x); }, 4);
  const PropagatorTable table = build_table(phi, 4, 5, {0.0, 0.1}, 4);
  const std::size_t expected[] = {1, 4, 10, 20, 35, 56};  // C(n+3, 3)
  for (int n = 0; n <= 5; ++n) {
    CHECK(table.level_indices[n].size() == expected[n]);
    CHECK(table.entries[n].size() == expected[n]);
  }
}

TEST_CASE("level zero is the heat flow, independent of any realization") {
  SpectralField phi(3);
  phi.coeffs = {1.0, -0.5, 0.25};
  const PropagatorTable table = build_table(phi, 3, 2, {0.0, 0.5}, 512);
  const SpectralField exact = heat_evolve(phi, 0.5);
  const int ti = table.time_index(0.5);
  for (int j = 0; j < 3; ++j) {
    CHECK(table.entries[0][0][ti].coeffs[j] ==
          doctest::Approx(exact.coeffs[j]).epsilon(1e-11));
  }
}

TEST_CASE("one-mode hierarchy matches the closed form") {
  SpectralField phi(1);
  phi.coeffs = {0.8};
  const double t = 0.5;
  const PropagatorTable table = build_table(phi, 1, 4, {0.0, t}, 2048);
  const int ti = table.time_index(t);
  // stepping error compounds down the hierarchy: ~3e-7 relative at level 4
  for (int n = 0; n <= 4; ++n) {
    CHECK(table.entries[n][0][ti].coeffs[0] ==
          doctest::Approx(one_mode_exact(0.8, n, t)).epsilon(1e-6));
  }
}

TEST_CASE("substep refinement converges at second order") {
  SpectralField phi(1);
  phi.coeffs = {1.0};
  const double t = 0.5;
  const double exact = one_mode_exact(1.0, 2, t);
  auto error_at = [&](int steps) {
    const PropagatorTable table = build_table(phi, 1, 2, {0.0, t}, steps);
    return std::abs(table.entries[2][0][table.time_index(t)].coeffs[0] - exact);
  };
  const double e16 = error_at(16), e32 = error_at(32);
  CHECK(e16 / e32 > 3.0);
  CHECK(e16 / e32 < 5.5);
}

TEST_CASE("two-mode hierarchy matches a dense RK4 integration") {
  SpectralField phi(2);
  phi.coeffs = {1.0, 0.6};
  const double t = 0.5;
  const PropagatorTable table = build_table(phi, 2, 2, {0.0, t}, 4096);

  // Flattened state: levels 0..2 in canonical order, 2 coefficients each.
  const auto lvl0 = enumerate_multiindices(2, 0);
  const auto lvl1 = enumerate_multiindices(2, 1);
  const auto lvl2 = enumerate_multiindices(2, 2);
  const std::vector<std::vector<MultiIndex>> levels = {lvl0, lvl1, lvl2};
  std::vector<double> y0 = {phi.coeffs[0], phi.coeffs[1], 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};

  auto offset_of = [&](int n, const MultiIndex& a) {
    std::size_t off = 0;
    for (int m = 0; m < n; ++m) off += levels[m].size();
    for (std::size_t i = 0; i < levels[n].size(); ++i) {
      if (levels[n][i] == a) return 2 * (off + i);
    }
    REQUIRE(false);
    return std::size_t{0};
  };

  auto rhs = [&](double, const std::vector<double>& y) {
    std::vector<double> dy(y.size(), 0.0);
    for (int n = 0; n <= 2; ++n) {
      for (const MultiIndex& a : levels[n]) {
        const std::size_t off = offset_of(n, a);
        for (int j = 1; j <= 2; ++j) {
          double v = -double(j * j) * y[off + j - 1];
          for (int k = 1; k <= 2; ++k) {
            if (a.entries[k - 1] == 0) continue;
            MultiIndex prev = a;
            prev.entries[k - 1] -= 1;
            const std::size_t poff = offset_of(n - 1, prev);
            double src = 0.0;
            for (int i = 1; i <= 2; ++i) {
              src += triple_coeff(j, k, i) * y[poff + i - 1];
            }
            v += std::sqrt(double(a.entries[k - 1])) * src;
          }
          dy[off + j - 1] = v;
        }
      }
    }
    return dy;
  };

  const std::vector<double> yT = oracle::rk4(rhs, y0, 0.0, t, 20000);
  const int ti = table.time_index(t);
  for (int n = 0; n <= 2; ++n) {
    for (std::size_t idx = 0; idx < levels[n].size(); ++idx) {
      const std::size_t off = offset_of(n, table.level_indices[n][idx]);
      for (int j = 0; j < 2; ++j) {
        CHECK(std::abs(table.entries[n][idx][ti].coeffs[j] - yT[off + j]) <= 1e-7);
      }
    }
  }
}

TEST_CASE("the recursion is exactly linear in the initial condition") {
  SpectralField phi(2);
  phi.coeffs = {0.7, -0.3};
  SpectralField phi2(2);
  phi2.coeffs = {1.4, -0.6};
  const PropagatorTable a = build_table(phi, 2, 3, {0.0, 0.4}, 32);
  const PropagatorTable b = build_table(phi2, 2, 3, {0.0, 0.4}, 32);
  for (int n = 0; n <= 3; ++n) {
    for (std::size_t idx = 0; idx < a.entries[n].size(); ++idx) {
      for (std::size_t ti = 0; ti < a.t_grid.size(); ++ti) {
        for (int j = 0; j < 2; ++j) {
          CHECK(b.entries[n][idx][ti].coeffs[j] ==
                2.0 * a.entries[n][idx][ti].coeffs[j]);
        }
      }
    }
  }
}

TEST_CASE("entries scale by the intensity power of their level") {
  SpectralField phi(3);
  phi.coeffs = {1.0, 0.2, -0.1};
  const PropagatorTable unit = build_table(phi, 3, 3, {0.0, 0.3}, 16);
  const PropagatorTable half = build_table(phi, 3, 3, {0.0, 0.3}, 16, 0.5);
  for (int n = 0; n <= 3; ++n) {
    const double scale = std::pow(0.5, n);  // exact: powers of two
    for (std::size_t idx = 0; idx < unit.entries[n].size(); ++idx) {
      for (std::size_t ti = 0; ti < unit.t_grid.size(); ++ti) {
        for (int j = 0; j < 3; ++j) {
          CHECK(half.entries[n][idx][ti].coeffs[j] ==
                scale * unit.entries[n][idx][ti].coeffs[j]);
        }
      }
    }
  }
}

TEST_CASE("off-grid time requests are rejected") {
  const SpectralField phi = project([](double x) { return std::sin(x); }, 2);
  const PropagatorTable table = build_table(phi, 2, 1, {0.0, 0.25, 0.5}, 8);
  CHECK(table.time_index(0.25) == 1);
  CHECK(table.time_index(0.25 + 5e-13) == 1);
  CHECK_THROWS_AS(table.time_index(0.3), std::invalid_argument);
}

TEST_CASE("build_table validates its arguments") {
  const SpectralField phi = project([](double x) { return std::sin(x); }, 2);
  CHECK_THROWS_AS(build_table(phi, 0, 1, {0.0, 0.5}, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_table(phi, 2, -1, {0.0, 0.5}, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_table(phi, 2, 1, {0.1, 0.5}, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_table(phi, 2, 1, {0.0, 0.5, 0.4}, 8), std::invalid_argument);
  CHECK_THROWS_AS(build_table(phi, 2, 1, {0.0, 0.5}, 0), std::invalid_argument);
  CHECK_THROWS_AS(build_table(phi, 3, 1, {0.0, 0.5}, 8), std::invalid_argument);
}

TEST_CASE("zero realization kills odd chaos orders") {
  SpectralField phi(3);
  phi.coeffs = {1.0, 0.5, 0.25};
  const double t = 0.4;
  const PropagatorTable table = build_table(phi, 3, 3, {0.0, t}, 64);
  const NoiseRealization z = zero_noise(3);
  for (int n : {1, 3}) {
    const SpectralField term = wick_series_term(table, n, t, z);
    for (double c : term.coeffs) CHECK(c == 0.0);
  }
  // Order 2 survives through He_2(0) = -1 on the doubled indices.
  const SpectralField term2 = wick_series_term(table, 2, t, z);
  const int ti = table.time_index(t);
  SpectralField manual(3);
  for (std::size_t idx = 0; idx < table.level_indices[2].size(); ++idx) {
    const MultiIndex& a = table.level_indices[2][idx];
    bool doubled = false;
    for (int e : a.entries) doubled = doubled || (e == 2);
    if (!doubled) continue;
    manual += (-1.0 / std::sqrt(2.0)) * table.entries[2][idx][ti];
  }
  for (int j = 0; j < 3; ++j) {
    CHECK(term2.coeffs[j] == doctest::Approx(manual.coeffs[j]).epsilon(1e-14));
  }
}

TEST_CASE("truncated solution at zero intensity is the heat flow") {
  SpectralField phi(2);
  phi.coeffs = {0.4, 0.9};
  const PropagatorTable table = build_table(phi, 2, 3, {0.0, 0.5}, 256);
  const NoiseRealization nr = sample(5, 2);
  const WickSolution sol = wick_solution(table, 0.0, 0.5, nr);
  const SpectralField exact = heat_evolve(phi, 0.5);
  for (int j = 0; j < 2; ++j) {
    CHECK(sol.field.coeffs[j] == doctest::Approx(exact.coeffs[j]).epsilon(1e-11));
  }
}

TEST_CASE("truncation error equals the intensity-weighted next term") {
  const SpectralField phi = project([](double x) { return std::sin(x); }, 4);
  const double t = 0.5, eps = 0.2;
  const PropagatorTable t4 = build_table(phi, 4, 4, {0.0, t}, 64);
  const PropagatorTable t5 = build_table(phi, 4, 5, {0.0, t}, 64);
  const NoiseRealization nr = sample(7, 4);
  const SpectralField diff =
      wick_solution(t5, eps, t, nr).field - wick_solution(t4, eps, t, nr).field;
  const SpectralField next = wick_series_term(t5, 5, t, nr);
  const double bound = std::pow(eps, 5) * next.sup_norm();
  CHECK(diff.sup_norm() <= bound * (1.0 + 1e-9));
  CHECK(diff.sup_norm() >= bound * (1.0 - 1e-9));
}

TEST_CASE("a table built at a fixed intensity refuses other intensities") {
  SpectralField phi(1);
  phi.coeffs = {1.0};
  const PropagatorTable table = build_table(phi, 1, 2, {0.0, 0.5}, 8, 0.5);
  const NoiseRealization nr = sample(1, 1);
  CHECK_NOTHROW(wick_solution(table, 0.5, 0.5, nr));
  CHECK_THROWS_AS(wick_solution(table, 0.3, 0.5, nr), std::invalid_argument);
}

TEST_CASE("series decay diagnostic on the zero field") {
  SpectralField phi(2);  // all zeros
  const PropagatorTable table = build_table(phi, 2, 3, {0.0, 0.5}, 16);
  const NoiseRealization nr = sample(2, 2);
  const DecayDiagnostic d = series_decay_diagnostic(table, nr, 0.5);
  REQUIRE(d.norms.size() == 4);
  for (double n : d.norms) CHECK(n == 0.0);
}

TEST_CASE("table json round-trips bitwise") {
  SpectralField phi(2);
  phi.coeffs = {0.3, -0.7};
  const PropagatorTable table = build_table(phi, 2, 2, {0.0, 0.2, 0.5}, 8);
  const PropagatorTable back = table_from_json(table_to_json(table));
  CHECK(back.K == table.K);
  CHECK(back.N == table.N);
  CHECK(back.steps_per_interval == table.steps_per_interval);
  CHECK(back.eps == table.eps);
  CHECK(back.t_grid == table.t_grid);
  CHECK(back.phi.coeffs == table.phi.coeffs);
  REQUIRE(back.entries.size() == table.entries.size());
  for (std::size_t n = 0; n < table.entries.size(); ++n) {
    REQUIRE(back.level_indices[n].size() == table.level_indices[n].size());
    for (std::size_t idx = 0; idx < table.entries[n].size(); ++idx) {
      CHECK(back.level_indices[n][idx] == table.level_indices[n][idx]);
      for (std::size_t ti = 0; ti < table.t_grid.size(); ++ti) {
        CHECK(back.entries[n][idx][ti].coeffs == table.entries[n][idx][ti].coeffs);
      }
    }
  }
}
