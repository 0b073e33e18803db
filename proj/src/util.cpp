#include "util.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace pam {

QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  QuadRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on P_n, starting from the Chebyshev-like estimate.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pn = 0.0, dpn = 0.0;
    for (int iter = 0; iter < 64; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * k + 1) * x * p1 - k * p2) / (k + 1);
      }
      pn = p0;
      dpn = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

QuadRule composite_gauss_legendre(double a, double b, int total_points) {
  if (!(b > a)) throw std::invalid_argument("composite_gauss_legendre: empty interval");
  if (total_points < 1) throw std::invalid_argument("composite_gauss_legendre: need nodes");
  constexpr int kPanelOrder = 16;
  const int panels = (total_points + kPanelOrder - 1) / kPanelOrder;
  static const QuadRule base = gauss_legendre(kPanelOrder);
  QuadRule r;
  r.nodes.reserve(panels * kPanelOrder);
  r.weights.reserve(panels * kPanelOrder);
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (int i = 0; i < kPanelOrder; ++i) {
      r.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
      r.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return r;
}

namespace {

double pairwise_sum_range(std::span<const double> xs, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += xs[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum_range(xs, lo, mid) + pairwise_sum_range(xs, mid, hi);
}

}  // namespace

double pairwise_sum(std::span<const double> xs) {
  return xs.empty() ? 0.0 : pairwise_sum_range(xs, 0, xs.size());
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace pam
