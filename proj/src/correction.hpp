#pragma once

#include <vector>

#include "noise.hpp"
#include "spectral.hpp"
#include "wick.hpp"

namespace pam {

/// Iterated exponential convolution
///   integral_0^t integral_0^s e^{-a(t-s)} e^{-b(s-r)} e^{-c r} dr ds,
/// evaluated as the second divided difference of lambda -> e^{-lambda t} over
/// the nodes {a, b, c}.  Nodes are sorted internally, so the value is exactly
/// permutation invariant; a centered series branch takes over when the node
/// spread times t is small, where the direct form cancels.
/// Requires t >= 0 and a, b, c >= 0.
double triple_exp_convolution(double a, double b, double c, double t);

/// Deterministic second-order field with the closed-form diagonal weight:
///   coeff_j = sum_{k <= K_diag} sum_{l <= K_basis}
///             diag_coeff(j,k,l) * triple_exp_convolution(j^2,k^2,l^2,t) * phi_l.
/// This is the K_diag-truncated limit object; requires t > 0.
SpectralField correction_field(const SpectralField& phi, double t, int K_basis,
                               int K_diag);

/// Same contraction but with the diagonal weight assembled from the K-mode
/// model itself: D_{jkl} = sum_{m <= K} B(j,m,k) B(k,m,l).  This is the exact
/// second-order Stratonovich-minus-Wick gap of the K-mode system, and tends
/// to correction_field(K_basis=K, K_diag=K) as K grows.
SpectralField correction_field_discrete(const SpectralField& phi, double t, int K);

/// strat_series_term(2) - wick_series_term(2) for one realization; the table
/// must be built to order >= 2.  Realization independent up to rounding and
/// shared-grid quadrature error.
SpectralField second_order_gap(const PropagatorTable& table, const SpectralField& phi,
                               const NoiseRealization& nr, double t);

/// Ito-vs-Stratonovich trace for a first-order chaos integrand f = sum f_k xi_k:
/// sum_k <f_k, m_k>.  Noise independent.
double ws_integral_gap(const std::vector<SpectralField>& f_modes);

/// Power-law extrapolation from values at resolutions {K, 2K, 4K}, applied
/// per coefficient; falls back to the finest value where the differences do
/// not contract.
SpectralField richardson_extrapolate(const SpectralField& v1, const SpectralField& v2,
                                     const SpectralField& v4);

}  // namespace pam
