#pragma once

#include <functional>
#include <vector>

#include "util.hpp"

namespace pam {

/// Coefficients of a function on (0, pi) in the Dirichlet sine basis
/// m_k(x) = sqrt(2/pi) sin(k x), k = 1..K.  Values are immutable by
/// convention: every operation returns a new field.
struct SpectralField {
  std::vector<double> coeffs;

  SpectralField() = default;
  explicit SpectralField(int K) : coeffs(static_cast<std::size_t>(K), 0.0) {}
  explicit SpectralField(std::vector<double> c) : coeffs(std::move(c)) {}

  int modes() const { return static_cast<int>(coeffs.size()); }

  /// Pointwise value sum_k a_k m_k(x); exactly 0 at x = 0 and x = pi.
  double eval(double x) const;

  /// L2(0, pi) norm (the basis is orthonormal).
  double l2_norm() const;

  /// Max of |eval| over a uniform sample of [0, pi].
  double sup_norm(int samples = 2048) const;
};

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);
SpectralField& operator+=(SpectralField& a, const SpectralField& b);

/// m_k(x), k >= 1.  Endpoint values are pinned to exactly zero.
double basis_eval(int k, double x);

/// First K sine coefficients of f, by composite Gauss-Legendre quadrature.
/// quadrature_points <= 0 selects the default 4K + 16.  Non-finite samples of
/// f are rejected with the offending location in the message.
SpectralField project(const std::function<double(double)>& f, int K,
                      int quadrature_points = 0);

/// Dirichlet heat kernel p(t, x, y) = (2/pi) sum_k e^{-k^2 t} sin(kx) sin(ky),
/// truncated once the term bound (2/pi) e^{-k^2 t} drops below 1e-16.
/// Requires t > 0 and x, y in [0, pi].
double heat_kernel_eval(double t, double x, double y);

/// Heat semigroup: multiplies coefficient k by e^{-k^2 t}.  Requires t >= 0.
SpectralField heat_evolve(const SpectralField& f, double t);

/// Spectral Sobolev norm sqrt(sum_k k^{2 gamma} a_k^2).
double sobolev_norm(const SpectralField& f, double gamma);

/// Triple product integral of m_j m_k m_l over (0, pi), in closed form.
/// Fully symmetric; nonzero only when j + k + l is odd.
double triple_coeff(int j, int k, int l);

/// Diagonal-kernel weight (2/pi) * integral of m_j(y) sin^2(ky) m_l(y) dy,
/// in closed form.  Symmetric in (j, l).
double diag_coeff(int j, int k, int l);

}  // namespace pam
