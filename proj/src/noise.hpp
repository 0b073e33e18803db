#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spectral.hpp"

namespace pam {

/// A frozen draw of the Gaussian mode amplitudes xi_1..xi_K.  The stream is
/// counter-based and keyed by (seed, k), so xi_k never depends on K: extending
/// a realization to more modes keeps the existing prefix bit-for-bit.
struct NoiseRealization {
  std::uint64_t seed = 0;
  std::vector<double> xi;

  int modes() const { return static_cast<int>(xi.size()); }
};

NoiseRealization sample(std::uint64_t seed, int K);

/// Truncated Brownian bridge-to-white-noise primitive
/// W_K(x) = sum_k xi_k sqrt(2/pi) (1 - cos(kx)) / k.  Requires x in [0, pi].
double brownian_eval(const NoiseRealization& nr, double x);

/// Truncated white-noise field V(x) = sum_k xi_k m_k(x).
double white_noise_eval(const NoiseRealization& nr, double x);

/// Probabilists' Hermite polynomial He_n via the three-term recurrence.
double hermite(int n, double x);

/// Multi-index over mode slots 1..K (entries[i] belongs to mode i+1).
struct MultiIndex {
  std::vector<int> entries;

  int order() const;
  bool operator==(const MultiIndex& other) const = default;
};

/// Canonical comparison: a precedes b when the rightmost nonzero entry of
/// a - b is negative (graded reverse lexicographic order, descending within a
/// fixed total order).
bool grevlex_before(const MultiIndex& a, const MultiIndex& b);

/// All multi-indices with K slots and total order n, in canonical order.
/// The count is C(n + K - 1, K - 1).
std::vector<MultiIndex> enumerate_multiindices(int K, int n);

/// Normalized Wick monomial prod_k He_{alpha_k}(xi_k) / sqrt(alpha_k!).
/// Throws std::out_of_range if alpha touches a mode beyond nr.
double xi_functional(const MultiIndex& alpha, const NoiseRealization& nr);

/// Serialization {"seed", "K", "xi"}; reconstructible bit-exactly.
std::string noise_to_json(const NoiseRealization& nr);
NoiseRealization noise_from_json(const std::string& text);

}  // namespace pam
