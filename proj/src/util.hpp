#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pam {

inline constexpr double kPi = 3.14159265358979323846;

/// Nodes and weights of a quadrature rule on some interval.
struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadRule gauss_legendre(int n);

/// Composite rule on [a, b] made of 16-point Gauss-Legendre panels, using at
/// least `total_points` nodes overall.
QuadRule composite_gauss_legendre(double a, double b, int total_points);

/// Deterministic pairwise (tree) reduction.  Returns 0 for an empty range.
double pairwise_sum(std::span<const double> xs);

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);

}  // namespace pam
