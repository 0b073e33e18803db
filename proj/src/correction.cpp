#include "correction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "strat.hpp"

namespace pam {

namespace {

// First divided difference of e^{-lambda t} over {u, v}, stable for close
// nodes via expm1.
double exp_dd1(double u, double v, double t) {
  if (u == v) return -t * std::exp(-u * t);
  const double d = u - v;
  return std::exp(-v * t) * std::expm1(-d * t) / d;
}

}  // namespace

double triple_exp_convolution(double a, double b, double c, double t) {
  if (t < 0.0) throw std::domain_error("triple_exp_convolution: requires t >= 0");
  if (a < 0.0 || b < 0.0 || c < 0.0) {
    throw std::domain_error("triple_exp_convolution: rates must be >= 0");
  }
  double x0 = a, x1 = b, x2 = c;
  if (x0 > x1) std::swap(x0, x1);
  if (x1 > x2) std::swap(x1, x2);
  if (x0 > x1) std::swap(x0, x1);

  const double spread = x2 - x0;
  if (spread * t <= 0.1) {
    // Centered series: with mu the node mean and d_i = x_i - mu (sum 0),
    //   dd2 = e^{-mu t} sum_{m>=2} (-t)^m/m! h_{m-2}(d0,d1,d2),
    // h_j the complete homogeneous symmetric polynomials.  Their generating
    // function is 1/prod(1 - d_i z), so h_j = -e2 h_{j-2} + e3 h_{j-3}
    // (e1 = 0 by centering).
    const double mu = (x0 + x1 + x2) / 3.0;
    const double d0 = x0 - mu, d1 = x1 - mu, d2 = x2 - mu;
    const double e2 = d0 * d1 + d0 * d2 + d1 * d2;
    const double e3 = d0 * d1 * d2;
    double hm3 = 0.0, hm2 = 0.0, hm1 = 0.0, h = 1.0;  // rolls up from h_0
    double tm = t * t / 2.0;                           // t^m/m! at m = 2
    double sum = tm * h;
    double sign = 1.0;
    int tiny = 0;
    for (int m = 3; m <= 80; ++m) {
      hm3 = hm2;
      hm2 = hm1;
      hm1 = h;
      h = -e2 * hm2 + e3 * hm3;  // h_{m-2}
      tm *= t / m;
      sign = -sign;
      const double term = sign * tm * h;
      sum += term;
      // h_1 vanishes identically, so require two consecutive negligible terms
      if (std::abs(term) <= 1e-18 * std::abs(sum) + 1e-300) {
        if (++tiny == 2) break;
      } else {
        tiny = 0;
      }
    }
    return std::exp(-mu * t) * sum;
  }
  return (exp_dd1(x0, x1, t) - exp_dd1(x1, x2, t)) / (x0 - x2);
}

SpectralField correction_field(const SpectralField& phi, double t, int K_basis,
                               int K_diag) {
  if (!(t > 0.0)) throw std::domain_error("correction_field: requires t > 0");
  if (K_basis < 1 || K_diag < 1) {
    throw std::invalid_argument("correction_field: truncation levels must be >= 1");
  }
  if (phi.modes() < K_basis) {
    throw std::invalid_argument("correction_field: phi has fewer than K_basis modes");
  }
  // Straightforward triple loop; K_basis^2 * K_diag kernel evaluations.
  SpectralField out(K_basis);
  for (int j = 1; j <= K_basis; ++j) {
    double acc = 0.0;
    for (int l = 1; l <= K_basis; ++l) {
      const double pl = phi.coeffs[l - 1];
      if (pl == 0.0) continue;
      for (int k = 1; k <= K_diag; ++k) {
        acc += diag_coeff(j, k, l) *
               triple_exp_convolution(static_cast<double>(j) * j,
                                      static_cast<double>(k) * k,
                                      static_cast<double>(l) * l, t) *
               pl;
      }
    }
    out.coeffs[j - 1] = acc;
  }
  return out;
}

SpectralField correction_field_discrete(const SpectralField& phi, double t, int K) {
  if (!(t > 0.0)) throw std::domain_error("correction_field_discrete: requires t > 0");
  if (K < 1) throw std::invalid_argument("correction_field_discrete: K must be >= 1");
  if (phi.modes() < K) {
    throw std::invalid_argument("correction_field_discrete: phi has fewer than K modes");
  }
  // D_{jkl} = sum_{m<=K} B(j,m,k) B(k,m,l): the diagonal weight of the K-mode
  // model, whose m-sum the closed-form diag_coeff carries to infinity.
  SpectralField out(K);
  for (int j = 1; j <= K; ++j) {
    double acc = 0.0;
    for (int l = 1; l <= K; ++l) {
      const double pl = phi.coeffs[l - 1];
      if (pl == 0.0) continue;
      for (int k = 1; k <= K; ++k) {
        double d = 0.0;
        for (int m = 1; m <= K; ++m) d += triple_coeff(j, m, k) * triple_coeff(k, m, l);
        if (d == 0.0) continue;
        acc += d *
               triple_exp_convolution(static_cast<double>(j) * j,
                                      static_cast<double>(k) * k,
                                      static_cast<double>(l) * l, t) *
               pl;
      }
    }
    out.coeffs[j - 1] = acc;
  }
  return out;
}

SpectralField second_order_gap(const PropagatorTable& table, const SpectralField& phi,
                               const NoiseRealization& nr, double t) {
  if (table.N < 2) throw std::invalid_argument("second_order_gap: table order must be >= 2");
  const SpectralField wick2 = wick_series_term(table, 2, t, nr);
  const SpectralField strat2 =
      strat_series_term(phi, nr, 2, t, table.steps_per_interval, 0.0);
  return strat2 - wick2;
}

double ws_integral_gap(const std::vector<SpectralField>& f_modes) {
  double s = 0.0;
  for (std::size_t i = 0; i < f_modes.size(); ++i) {
    if (static_cast<int>(i) >= f_modes[i].modes()) {
      throw std::invalid_argument("ws_integral_gap: component field too short");
    }
    s += f_modes[i].coeffs[i];
  }
  return s;
}

SpectralField richardson_extrapolate(const SpectralField& v1, const SpectralField& v2,
                                     const SpectralField& v4) {
  if (v1.modes() != v2.modes() || v2.modes() != v4.modes()) {
    throw std::invalid_argument("richardson_extrapolate: mode counts differ");
  }
  SpectralField out(v4.modes());
  for (int i = 0; i < v4.modes(); ++i) {
    const double d1 = v2.coeffs[i] - v1.coeffs[i];
    const double d2 = v4.coeffs[i] - v2.coeffs[i];
    const double scale = std::max({std::abs(v1.coeffs[i]), std::abs(v2.coeffs[i]),
                                   std::abs(v4.coeffs[i]), 1e-30});
    if (std::abs(d2) < 1e-15 * scale || !(std::abs(d1) > std::abs(d2))) {
      out.coeffs[i] = v4.coeffs[i];  // converged or not contracting
      continue;
    }
    const double ratio = d1 / d2;  // ~2^p for an order-p tail
    out.coeffs[i] = v4.coeffs[i] + d2 / (ratio - 1.0);
  }
  return out;
}

}  // namespace pam
