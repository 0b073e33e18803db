#pragma once

#include <Eigen/Dense>
#include <vector>

#include "noise.hpp"
#include "spectral.hpp"

namespace pam {

/// Galerkin system a' = (-D + eps M) a for the smooth-potential equation,
/// with D = diag(j^2) and M_{ji} = sum_k xi_k triple_coeff(j, k, i).
/// The flow is evaluated exactly in time through the symmetric
/// eigendecomposition of -D + eps M, computed once per instance.
class GalerkinSystem {
 public:
  GalerkinSystem(const NoiseRealization& nr, int K, double eps);

  int modes() const { return K_; }
  double eps() const { return eps_; }
  const Eigen::MatrixXd& interaction() const { return M_; }
  const Eigen::MatrixXd& generator() const { return A_; }

  /// exp(t A) phi.  Requires t >= 0 and phi with K modes.
  SpectralField flow(const SpectralField& phi, double t) const;

 private:
  int K_;
  double eps_;
  Eigen::MatrixXd M_;
  Eigen::MatrixXd A_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

/// Shared assembly of M (also used by the Dyson terms).
Eigen::MatrixXd interaction_matrix(const NoiseRealization& nr, int K);

/// Convenience wrapper: exp(t(-D + eps M)) applied to phi.
SpectralField strat_solution(const SpectralField& phi, const NoiseRealization& nr,
                             double eps, double t);

/// Dyson terms b^(0..N) of the expansion of the flow around eps0 (default 0):
///   b^(n)(t) = integral_0^t e^{(t-s) A(eps0)} M b^(n-1)(s) ds,
/// marched with the same exponential-trapezoidal substeps as the propagator
/// table so term-by-term comparisons share quadrature error.  Returns
/// [n][time index] on t_grid; t_grid must start at 0.
std::vector<std::vector<SpectralField>> strat_series_terms(
    const SpectralField& phi, const NoiseRealization& nr, int N,
    std::vector<double> t_grid, int steps_per_interval, double eps0 = 0.0);

/// Single Dyson term at one time (grid {0, t}).
SpectralField strat_series_term(const SpectralField& phi, const NoiseRealization& nr,
                                int n, double t, int steps_per_interval,
                                double eps0 = 0.0);

struct StratSeriesSolution {
  SpectralField field;
  double last_term_norm = 0.0;
};

/// Truncated Dyson series sum_n eps^n b^(n)(t) around eps0 = 0.
StratSeriesSolution strat_series_solution(const SpectralField& phi,
                                          const NoiseRealization& nr, double eps,
                                          double t, int N, int steps_per_interval);

/// Scale-invariant regularity monitor ||field||_gamma * t^{gamma/2} / ||phi||_0.
/// Requires gamma in (1/2, 1), t > 0, phi_l2 > 0.
double hgamma_diagnostic(const SpectralField& field, double gamma, double t,
                         double phi_l2);

}  // namespace pam
