#include "strat.hpp"

#include <cmath>
#include <stdexcept>

#include "etd.hpp"

namespace pam {

Eigen::MatrixXd interaction_matrix(const NoiseRealization& nr, int K) {
  if (nr.modes() < K) throw std::invalid_argument("interaction_matrix: realization too short");
  Eigen::MatrixXd M(K, K);
  for (int j = 1; j <= K; ++j) {
    for (int i = 1; i <= K; ++i) {
      double s = 0.0;
      for (int k = 1; k <= K; ++k) s += nr.xi[k - 1] * triple_coeff(j, k, i);
      M(j - 1, i - 1) = s;
    }
  }
  return M;
}

GalerkinSystem::GalerkinSystem(const NoiseRealization& nr, int K, double eps)
    : K_(K), eps_(eps), M_(interaction_matrix(nr, K)) {
  A_ = eps_ * M_;
  for (int j = 1; j <= K_; ++j) A_(j - 1, j - 1) -= static_cast<double>(j) * j;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("GalerkinSystem: eigendecomposition failed");
  }
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

SpectralField GalerkinSystem::flow(const SpectralField& phi, double t) const {
  if (t < 0.0) throw std::domain_error("GalerkinSystem::flow: requires t >= 0");
  if (phi.modes() != K_) throw std::invalid_argument("GalerkinSystem::flow: phi mode count");
  Eigen::Map<const Eigen::VectorXd> a0(phi.coeffs.data(), K_);
  Eigen::VectorXd c = eigenvectors_.transpose() * a0;
  for (int i = 0; i < K_; ++i) c(i) *= std::exp(eigenvalues_(i) * t);
  Eigen::VectorXd a = eigenvectors_ * c;
  SpectralField out(K_);
  for (int i = 0; i < K_; ++i) out.coeffs[i] = a(i);
  return out;
}

SpectralField strat_solution(const SpectralField& phi, const NoiseRealization& nr,
                             double eps, double t) {
  GalerkinSystem sys(nr, phi.modes(), eps);
  return sys.flow(phi, t);
}

std::vector<std::vector<SpectralField>> strat_series_terms(
    const SpectralField& phi, const NoiseRealization& nr, int N,
    std::vector<double> t_grid, int steps_per_interval, double eps0) {
  const int K = phi.modes();
  if (K < 1) throw std::invalid_argument("strat_series_terms: need at least one mode");
  if (N < 0) throw std::invalid_argument("strat_series_terms: order must be >= 0");
  if (steps_per_interval < 1) throw std::invalid_argument("strat_series_terms: need substeps");
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw std::invalid_argument("strat_series_terms: t_grid must start at 0");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("strat_series_terms: t_grid must be strictly increasing");
    }
  }

  const Eigen::MatrixXd M = interaction_matrix(nr, K);

  // Work in a basis where the expansion-point generator is diagonal.  At
  // eps0 = 0 that is the sine basis itself with rates j^2; otherwise the
  // eigenbasis of -D + eps0 M.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(K, K);
  std::vector<double> rates = detail::laplacian_rates(K);
  if (eps0 != 0.0) {
    Eigen::MatrixXd A = eps0 * M;
    for (int j = 1; j <= K; ++j) A(j - 1, j - 1) -= static_cast<double>(j) * j;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("strat_series_terms: eigendecomposition failed");
    }
    Q = es.eigenvectors();
    for (int i = 0; i < K; ++i) rates[i] = -es.eigenvalues()(i);
  }
  const Eigen::MatrixXd G = Q.transpose() * M * Q;

  Eigen::Map<const Eigen::VectorXd> a0(phi.coeffs.data(), K);
  std::vector<Eigen::VectorXd> cur(static_cast<std::size_t>(N) + 1,
                                   Eigen::VectorXd::Zero(K));
  std::vector<Eigen::VectorXd> src(static_cast<std::size_t>(N) + 1,
                                   Eigen::VectorXd::Zero(K));
  cur[0] = Q.transpose() * a0;
  for (int n = 1; n <= N; ++n) src[n] = G * cur[n - 1];

  std::vector<std::vector<SpectralField>> out(static_cast<std::size_t>(N) + 1);
  auto snapshot = [&]() {
    for (int n = 0; n <= N; ++n) {
      Eigen::VectorXd b = Q * cur[n];
      SpectralField f(K);
      for (int i = 0; i < K; ++i) f.coeffs[i] = b(i);
      out[n].push_back(std::move(f));
    }
  };
  snapshot();

  for (std::size_t seg = 0; seg + 1 < t_grid.size(); ++seg) {
    const double h = (t_grid[seg + 1] - t_grid[seg]) / steps_per_interval;
    const auto w = detail::etd_weights(rates, h);
    for (int step = 0; step < steps_per_interval; ++step) {
      for (int i = 0; i < K; ++i) cur[0](i) *= w.decay[i];
      for (int n = 1; n <= N; ++n) {
        Eigen::VectorXd f_new = G * cur[n - 1];
        for (int i = 0; i < K; ++i) {
          cur[n](i) = w.decay[i] * cur[n](i) + w.w_old[i] * src[n](i) + w.w_new[i] * f_new(i);
        }
        src[n] = std::move(f_new);
      }
    }
    snapshot();
  }
  return out;
}

SpectralField strat_series_term(const SpectralField& phi, const NoiseRealization& nr,
                                int n, double t, int steps_per_interval, double eps0) {
  if (t < 0.0) throw std::domain_error("strat_series_term: requires t >= 0");
  std::vector<double> grid = {0.0};
  if (t > 0.0) grid.push_back(t);
  const auto terms = strat_series_terms(phi, nr, n, grid, steps_per_interval, eps0);
  return terms[n].back();
}

StratSeriesSolution strat_series_solution(const SpectralField& phi,
                                          const NoiseRealization& nr, double eps,
                                          double t, int N, int steps_per_interval) {
  if (t < 0.0) throw std::domain_error("strat_series_solution: requires t >= 0");
  std::vector<double> grid = {0.0};
  if (t > 0.0) grid.push_back(t);
  const auto terms = strat_series_terms(phi, nr, N, grid, steps_per_interval, 0.0);
  StratSeriesSolution sol;
  sol.field = SpectralField(phi.modes());
  double scale = 1.0;
  for (int n = 0; n <= N; ++n) {
    sol.field += scale * terms[n].back();
    if (n < N) scale *= eps;
  }
  sol.last_term_norm = terms[N].back().l2_norm();
  return sol;
}

double hgamma_diagnostic(const SpectralField& field, double gamma, double t,
                         double phi_l2) {
  if (!(gamma > 0.5 && gamma < 1.0)) {
    throw std::domain_error("hgamma_diagnostic: gamma must lie in (1/2, 1)");
  }
  if (!(t > 0.0)) throw std::domain_error("hgamma_diagnostic: requires t > 0");
  if (!(phi_l2 > 0.0)) throw std::domain_error("hgamma_diagnostic: requires ||phi|| > 0");
  return sobolev_norm(field, gamma) * std::pow(t, gamma / 2.0) / phi_l2;
}

}  // namespace pam
