#include "spectral.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pam {

namespace {

const double kRoot2OverPi = std::sqrt(2.0 / kPi);

void check_same_size(const SpectralField& a, const SpectralField& b, const char* op) {
  if (a.modes() != b.modes()) {
    throw std::invalid_argument(std::string(op) + ": mode counts differ");
  }
}

}  // namespace

double SpectralField::eval(double x) const {
  double s = 0.0;
  for (int k = 1; k <= modes(); ++k) s += coeffs[k - 1] * basis_eval(k, x);
  return s;
}

double SpectralField::l2_norm() const {
  double s = 0.0;
  for (double c : coeffs) s += c * c;
  return std::sqrt(s);
}

double SpectralField::sup_norm(int samples) const {
  if (samples < 2) throw std::invalid_argument("sup_norm: need at least two samples");
  double best = 0.0;
  for (int i = 0; i <= samples; ++i) {
    double v = std::abs(eval(kPi * i / samples));
    if (v > best) best = v;
  }
  return best;
}

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
  check_same_size(a, b, "field add");
  SpectralField r = a;
  for (int i = 0; i < r.modes(); ++i) r.coeffs[i] += b.coeffs[i];
  return r;
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
  check_same_size(a, b, "field subtract");
  SpectralField r = a;
  for (int i = 0; i < r.modes(); ++i) r.coeffs[i] -= b.coeffs[i];
  return r;
}

SpectralField operator*(double s, const SpectralField& a) {
  SpectralField r = a;
  for (double& c : r.coeffs) c *= s;
  return r;
}

SpectralField& operator+=(SpectralField& a, const SpectralField& b) {
  check_same_size(a, b, "field add");
  for (int i = 0; i < a.modes(); ++i) a.coeffs[i] += b.coeffs[i];
  return a;
}

double basis_eval(int k, double x) {
  if (k < 1) throw std::invalid_argument("basis_eval: mode index must be >= 1");
  if (x == 0.0 || x == kPi) return 0.0;  // Dirichlet values held exactly
  return kRoot2OverPi * std::sin(k * x);
}

SpectralField project(const std::function<double(double)>& f, int K,
                      int quadrature_points) {
  if (K < 1) throw std::invalid_argument("project: need at least one mode");
  if (quadrature_points <= 0) quadrature_points = 4 * K + 16;
  const QuadRule rule = composite_gauss_legendre(0.0, kPi, quadrature_points);

  std::vector<double> samples(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    samples[i] = f(rule.nodes[i]);
    if (!std::isfinite(samples[i])) {
      std::ostringstream msg;
      msg << "project: non-finite sample at x = " << rule.nodes[i];
      throw std::domain_error(msg.str());
    }
  }

  SpectralField out(K);
  for (int k = 1; k <= K; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      s += rule.weights[i] * samples[i] * basis_eval(k, rule.nodes[i]);
    }
    out.coeffs[k - 1] = s;
  }
  return out;
}

double heat_kernel_eval(double t, double x, double y) {
  if (!(t > 0.0)) throw std::domain_error("heat_kernel_eval: requires t > 0");
  if (x < 0.0 || x > kPi || y < 0.0 || y > kPi) {
    throw std::domain_error("heat_kernel_eval: points must lie in [0, pi]");
  }
  const double scale = 2.0 / kPi;
  double s = 0.0;
  for (int k = 1;; ++k) {
    const double amp = scale * std::exp(-static_cast<double>(k) * k * t);
    if (amp < 1e-16) break;
    s += amp * std::sin(k * x) * std::sin(k * y);
  }
  return s;
}

SpectralField heat_evolve(const SpectralField& f, double t) {
  if (t < 0.0) throw std::domain_error("heat_evolve: requires t >= 0");
  SpectralField r = f;
  for (int k = 1; k <= r.modes(); ++k) {
    r.coeffs[k - 1] *= std::exp(-static_cast<double>(k) * k * t);
  }
  return r;
}

double sobolev_norm(const SpectralField& f, double gamma) {
  double s = 0.0;
  for (int k = 1; k <= f.modes(); ++k) {
    s += std::pow(static_cast<double>(k), 2.0 * gamma) * f.coeffs[k - 1] * f.coeffs[k - 1];
  }
  return std::sqrt(s);
}

double triple_coeff(int j, int k, int l) {
  if (j < 1 || k < 1 || l < 1) throw std::invalid_argument("triple_coeff: indices must be >= 1");
  if ((j + k + l) % 2 == 0) return 0.0;
  // integral of sin(jx) sin(kx) sin(lx) over (0, pi) via product-to-sum:
  //   1/2 [ I(l, |j-k|) - I(l, j+k) ],  I(l, m) = 2l / (l^2 - m^2) for odd l+m.
  // Parity of j+k+l odd rules out l = |j±k|, so no denominator vanishes.
  auto I = [](int a, int m) {
    return 2.0 * a / (static_cast<double>(a) * a - static_cast<double>(m) * m);
  };
  const double raw = 0.5 * (I(l, std::abs(j - k)) - I(l, j + k));
  return std::pow(2.0 / kPi, 1.5) * raw;
}

double diag_coeff(int j, int k, int l) {
  if (j < 1 || k < 1 || l < 1) throw std::invalid_argument("diag_coeff: indices must be >= 1");
  // (2/pi) integral m_j sin^2(k y) m_l dy
  //   = (2/pi^2) [ (pi/2) delta_jl - 1/2 ( J(|j-l|, 2k) - J(j+l, 2k) ) ],
  // with J(a, b) the cosine-product integral over (0, pi).
  auto J = [](int a, int b) {
    if (a == b) return (a == 0) ? kPi : kPi / 2.0;
    return 0.0;
  };
  double s = (j == l) ? kPi / 2.0 : 0.0;
  s -= 0.5 * (J(std::abs(j - l), 2 * k) - J(j + l, 2 * k));
  return (2.0 / (kPi * kPi)) * s;
}

}  // namespace pam
