#pragma once

#include <cmath>
#include <vector>

namespace pam::detail {

/// One step of the exponential trapezoidal rule for
///   da/dt = -rate * a + F(t):
///   a(t+h) = decay * a(t) + w_old * F(t) + w_new * F(t+h).
/// The homogeneous part is exact; F is modeled linearly on the step, so the
/// rule is exact for linear sources at any stiffness.
struct EtdWeights {
  std::vector<double> decay, w_old, w_new;
};

/// Stable evaluation of the step coefficients for a single rate (any sign).
inline void etd_scalar(double rate, double h, double& decay, double& w_old,
                       double& w_new) {
  const double z = rate * h;
  decay = std::exp(-z);
  if (std::abs(z) < 0.05) {
    // Series of (1 - (1+z)e^{-z})/z^2 and (z - 1 + e^{-z})/z^2; the direct
    // forms cancel catastrophically for small z.
    double co = 0.0, cn = 0.0, term_o, term_n;
    double zp = 1.0;     // z^j
    double fact = 2.0;   // (j+2)!
    for (int j = 0;; ++j) {
      term_n = zp / fact;
      term_o = (j + 1) * term_n;
      co += (j % 2 == 0) ? term_o : -term_o;
      cn += (j % 2 == 0) ? term_n : -term_n;
      if (std::abs(term_o) < 1e-20) break;
      zp *= z;
      fact *= (j + 3);
    }
    w_old = h * co;
    w_new = h * cn;
  } else {
    w_old = h * (1.0 - (1.0 + z) * decay) / (z * z);
    w_new = h * (z - 1.0 + decay) / (z * z);
  }
}

inline EtdWeights etd_weights(const std::vector<double>& rates, double h) {
  EtdWeights w;
  const std::size_t n = rates.size();
  w.decay.resize(n);
  w.w_old.resize(n);
  w.w_new.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    etd_scalar(rates[i], h, w.decay[i], w.w_old[i], w.w_new[i]);
  }
  return w;
}

/// Dirichlet Laplacian rates j^2 for modes 1..K.
inline std::vector<double> laplacian_rates(int K) {
  std::vector<double> r(static_cast<std::size_t>(K));
  for (int j = 1; j <= K; ++j) r[j - 1] = static_cast<double>(j) * j;
  return r;
}

}  // namespace pam::detail
