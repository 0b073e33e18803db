#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "spectral.hpp"
#include "util.hpp"

using namespace pam;

namespace {

SpectralField random_field(int K, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpectralField f(K);
  for (double& c : f.coeffs) c = g(rng);
  return f;
}

}  // namespace

TEST_CASE("basis functions vanish at the endpoints and match sqrt(2/pi) sin(kx)") {
  for (int k = 1; k <= 5; ++k) {
    CHECK(basis_eval(k, 0.0) == 0.0);
    CHECK(basis_eval(k, kPi) == 0.0);
    CHECK(basis_eval(k, 0.7) ==
          doctest::Approx(std::sqrt(2.0 / kPi) * std::sin(k * 0.7)).epsilon(1e-15));
  }
}

TEST_CASE("basis is orthonormal under the composite quadrature") {
  const int K = 64;
  const QuadRule r = composite_gauss_legendre(0.0, kPi, 4 * K + 16);
  double worst = 0.0;
  for (int j = 1; j <= K; ++j) {
    for (int k = j; k <= K; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        acc += r.weights[i] * basis_eval(j, r.nodes[i]) * basis_eval(k, r.nodes[i]);
      }
      worst = std::max(worst, std::abs(acc - (j == k ? 1.0 : 0.0)));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("project recovers sine-polynomial coefficients") {
  const SpectralField f = random_field(10, 7);
  const SpectralField g = project([&](double x) { return f.eval(x); }, 10);
  for (int i = 0; i < 10; ++i) {
    CHECK(g.coeffs[i] == doctest::Approx(f.coeffs[i]).epsilon(1e-12));
  }
}

TEST_CASE("project rejects non-finite samples") {
  CHECK_THROWS_WITH_AS(project([](double x) { return x > 1.0 ? std::nan("") : 1.0; }, 4),
                       doctest::Contains("non-finite"), std::domain_error);
}

TEST_CASE("field evaluation vanishes at the boundary") {
  const SpectralField f = random_field(12, 3);
  CHECK(f.eval(0.0) == 0.0);
  CHECK(f.eval(kPi) == 0.0);
}

TEST_CASE("l2 norm agrees with quadrature of the square") {
  const SpectralField f = random_field(6, 11);
  const double byq = std::sqrt(
      oracle::integrate([&](double x) { return f.eval(x) * f.eval(x); }, 0.0, kPi));
  CHECK(f.l2_norm() == doctest::Approx(byq).epsilon(1e-10));
}

TEST_CASE("heat kernel reproduces its eigenfunctions") {
  // int p(t, x, y) m_k(y) dy = e^{-k^2 t} m_k(x)
  const double t = 0.3, x = 1.0;
  for (int k = 1; k <= 3; ++k) {
    const double lhs = oracle::integrate(
        [&](double y) { return heat_kernel_eval(t, x, y) * basis_eval(k, y); }, 0.0, kPi,
        1e-13);
    CHECK(lhs == doctest::Approx(std::exp(-double(k * k) * t) * basis_eval(k, x))
                     .epsilon(1e-10));
  }
}

TEST_CASE("heat kernel satisfies the two-sided semigroup identity") {
  const double t = 0.2, s = 0.35, x = 1.1, y = 2.0;
  const double composed = oracle::integrate(
      [&](double z) { return heat_kernel_eval(t, x, z) * heat_kernel_eval(s, z, y); },
      0.0, kPi, 1e-13);
  CHECK(composed == doctest::Approx(heat_kernel_eval(t + s, x, y)).epsilon(1e-10));
}

TEST_CASE("heat kernel is symmetric and positive inside the rectangle") {
  CHECK(heat_kernel_eval(0.4, 0.9, 2.1) ==
        doctest::Approx(heat_kernel_eval(0.4, 2.1, 0.9)).epsilon(1e-14));
  CHECK(heat_kernel_eval(0.05, 1.5, 1.5) > 0.0);
  CHECK_THROWS_AS(heat_kernel_eval(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(heat_kernel_eval(0.1, -0.5, 1.0), std::domain_error);
}

TEST_CASE("heat_evolve matches pointwise kernel integration") {
  const SpectralField f = random_field(6, 5);
  const double t = 0.25;
  const SpectralField g = heat_evolve(f, t);
  for (double x : {0.4, 1.3, 2.8}) {
    const double byk = oracle::integrate(
        [&](double y) { return heat_kernel_eval(t, x, y) * f.eval(y); }, 0.0, kPi, 1e-13);
    CHECK(g.eval(x) == doctest::Approx(byk).epsilon(1e-10));
  }
  CHECK_THROWS_AS(heat_evolve(f, -0.1), std::domain_error);
}

TEST_CASE("heat_evolve semigroup composition is exact on coefficients") {
  const SpectralField f = random_field(16, 9);
  const SpectralField once = heat_evolve(f, 0.7);
  const SpectralField twice = heat_evolve(heat_evolve(f, 0.3), 0.4);
  for (int i = 0; i < 16; ++i) {
    CHECK(std::abs(once.coeffs[i] - twice.coeffs[i]) <= 1e-12);
  }
}

TEST_CASE("triple product coefficients match quadrature") {
  for (int j = 1; j <= 4; ++j) {
    for (int k = 1; k <= 4; ++k) {
      for (int l = 1; l <= 4; ++l) {
        const double byq = oracle::integrate(
            [&](double x) {
              return basis_eval(j, x) * basis_eval(k, x) * basis_eval(l, x);
            },
            0.0, kPi, 1e-14);
        if ((j + k + l) % 2 == 0) {
          CHECK(triple_coeff(j, k, l) == 0.0);  // parity: even total order integrates to 0
          CHECK(std::abs(byq) <= 1e-12);
        } else {
          CHECK(triple_coeff(j, k, l) == doctest::Approx(byq).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("triple product coefficients are fully symmetric") {
  CHECK(triple_coeff(2, 3, 4) == triple_coeff(4, 2, 3));
  CHECK(triple_coeff(2, 3, 4) == triple_coeff(3, 4, 2));
  CHECK(triple_coeff(1, 1, 1) ==
        doctest::Approx(std::pow(2.0 / kPi, 1.5) * 4.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("diagonal-kernel coefficients match quadrature") {
  for (int j = 1; j <= 3; ++j) {
    for (int l = 1; l <= 3; ++l) {
      for (int k : {1, 2, 5}) {
        const double byq = oracle::integrate(
            [&](double y) {
              const double sk = std::sin(k * y);
              return basis_eval(j, y) * (2.0 / kPi) * sk * sk * basis_eval(l, y);
            },
            0.0, kPi, 1e-14);
        CHECK(diag_coeff(j, k, l) == doctest::Approx(byq).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("diagonal-kernel coefficients flatten to the constant diagonal") {
  // Once 2k exceeds j + l the oscillatory parts integrate to zero exactly.
  CHECK(diag_coeff(1, 2, 1) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
  CHECK(diag_coeff(3, 25, 3) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
  CHECK(diag_coeff(1, 25, 2) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(diag_coeff(1, 1, 1) == doctest::Approx(3.0 / (2.0 * kPi)).epsilon(1e-15));
}

TEST_CASE("sobolev norm weights modes by k^gamma") {
  SpectralField f(5);
  f.coeffs[2] = 2.0;  // mode k = 3
  CHECK(sobolev_norm(f, 0.6) == doctest::Approx(std::pow(3.0, 0.6) * 2.0).epsilon(1e-14));
  const SpectralField g = random_field(5, 13);
  CHECK(sobolev_norm(g, 0.0) == doctest::Approx(g.l2_norm()).epsilon(1e-14));
}
