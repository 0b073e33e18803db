#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <vector>

#include "doctest.h"
#include "util.hpp"

using namespace pam;

TEST_CASE("gauss_legendre nodes and weights") {
  const QuadRule r = gauss_legendre(5);
  REQUIRE(r.nodes.size() == 5);
  double wsum = 0.0;
  for (double w : r.weights) wsum += w;
  CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
  // symmetry, center node pinned for odd n
  CHECK(r.nodes[2] == 0.0);
  CHECK(r.nodes[0] == doctest::Approx(-r.nodes[4]).epsilon(1e-15));
  CHECK(r.weights[0] == doctest::Approx(r.weights[4]).epsilon(1e-15));
}

TEST_CASE("gauss_legendre is exact through degree 2n - 1") {
  const QuadRule r = gauss_legendre(5);
  // x^8 over [-1, 1] -> 2/9
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    acc += r.weights[i] * std::pow(r.nodes[i], 8);
  }
  CHECK(acc == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("gauss_legendre handles smooth non-polynomials") {
  const QuadRule r = gauss_legendre(16);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    acc += r.weights[i] * std::cos(r.nodes[i]);
  }
  CHECK(acc == doctest::Approx(2.0 * std::sin(1.0)).epsilon(1e-15));
}

TEST_CASE("composite rule on [0, pi]") {
  const QuadRule r = composite_gauss_legendre(0.0, kPi, 64);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    s1 += r.weights[i] * std::sin(r.nodes[i]);
    s2 += r.weights[i] * std::sin(r.nodes[i]) * std::sin(r.nodes[i]);
  }
  CHECK(s1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s2 == doctest::Approx(kPi / 2.0).epsilon(1e-14));
}

TEST_CASE("pairwise_sum") {
  std::vector<double> ones(100000, 1.0);
  CHECK(pairwise_sum(ones) == 100000.0);

  // alternating large/small cancellation stays accurate
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) {
    xs.push_back(1.0e8);
    xs.push_back(1.0);
    xs.push_back(-1.0e8);
  }
  CHECK(pairwise_sum(xs) == doctest::Approx(1000.0).epsilon(1e-12));

  CHECK(pairwise_sum(std::span<const double>{}) == 0.0);
}

TEST_CASE("format_double round-trips bitwise") {
  const double values[] = {0.0,          1.0,       -1.0,        kPi,
                           0.1,          1.0 / 3.0, 1e-300,      -2.5e17,
                           6.02214076e23, 1e308,    5e-324,      -0.4375};
  for (double v : values) {
    const std::string s = format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("fnv1a64 known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("hello") != fnv1a64("hellp"));
}
