#include "noise.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include "json.hpp"
#include <numeric>
#include <stdexcept>

namespace pam {

namespace {

// SplitMix64 output function; the k-th value of the stream seeded at `seed`.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + k * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double gaussian_at(std::uint64_t seed, int k) {
  const std::uint64_t h = splitmix64_at(seed, static_cast<std::uint64_t>(k));
  // Uniform in the open interval (0, 1) with 2^-53 spacing.
  const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1p-53;
  static const boost::math::normal_distribution<double> unit_normal;
  return boost::math::quantile(unit_normal, u);
}

}  // namespace

NoiseRealization sample(std::uint64_t seed, int K) {
  if (K < 1) throw std::invalid_argument("sample: need at least one mode");
  NoiseRealization nr;
  nr.seed = seed;
  nr.xi.resize(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) nr.xi[k - 1] = gaussian_at(seed, k);
  return nr;
}

double brownian_eval(const NoiseRealization& nr, double x) {
  if (x < 0.0 || x > kPi) throw std::domain_error("brownian_eval: x must lie in [0, pi]");
  const double scale = std::sqrt(2.0 / kPi);
  double s = 0.0;
  for (int k = 1; k <= nr.modes(); ++k) {
    s += nr.xi[k - 1] * scale * (1.0 - std::cos(k * x)) / k;
  }
  return s;
}

double white_noise_eval(const NoiseRealization& nr, double x) {
  double s = 0.0;
  for (int k = 1; k <= nr.modes(); ++k) s += nr.xi[k - 1] * basis_eval(k, x);
  return s;
}

double hermite(int n, double x) {
  if (n < 0) throw std::invalid_argument("hermite: order must be >= 0");
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int m = 1; m < n; ++m) {
    double next = x * cur - m * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

int MultiIndex::order() const {
  return std::accumulate(entries.begin(), entries.end(), 0);
}

bool grevlex_before(const MultiIndex& a, const MultiIndex& b) {
  if (a.entries.size() != b.entries.size()) {
    throw std::invalid_argument("grevlex_before: slot counts differ");
  }
  for (std::size_t i = a.entries.size(); i-- > 0;) {
    const int d = a.entries[i] - b.entries[i];
    if (d != 0) return d < 0;
  }
  return false;
}

namespace {

void compositions(int remaining, int slot, MultiIndex& work, std::vector<MultiIndex>& out) {
  const int K = static_cast<int>(work.entries.size());
  if (slot == K - 1) {
    work.entries[slot] = remaining;
    out.push_back(work);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    work.entries[slot] = v;
    compositions(remaining - v, slot + 1, work, out);
  }
  work.entries[slot] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_multiindices(int K, int n) {
  if (K < 1) throw std::invalid_argument("enumerate_multiindices: need at least one slot");
  if (n < 0) throw std::invalid_argument("enumerate_multiindices: order must be >= 0");
  std::vector<MultiIndex> out;
  MultiIndex work;
  work.entries.assign(static_cast<std::size_t>(K), 0);
  compositions(n, 0, work, out);
  std::sort(out.begin(), out.end(), grevlex_before);
  return out;
}

double xi_functional(const MultiIndex& alpha, const NoiseRealization& nr) {
  double prod = 1.0;
  for (std::size_t i = 0; i < alpha.entries.size(); ++i) {
    const int a = alpha.entries[i];
    if (a == 0) continue;
    if (static_cast<int>(i) >= nr.modes()) {
      throw std::out_of_range("xi_functional: multi-index support exceeds realization modes");
    }
    double fact = 1.0;
    for (int m = 2; m <= a; ++m) fact *= m;
    prod *= hermite(a, nr.xi[i]) / std::sqrt(fact);
  }
  return prod;
}

std::string noise_to_json(const NoiseRealization& nr) {
  nlohmann::json j;
  j["seed"] = nr.seed;
  j["K"] = nr.modes();
  j["xi"] = nr.xi;
  return j.dump();
}

NoiseRealization noise_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  NoiseRealization nr;
  nr.seed = j.at("seed").get<std::uint64_t>();
  nr.xi = j.at("xi").get<std::vector<double>>();
  if (j.at("K").get<int>() != nr.modes()) {
    throw std::invalid_argument("noise_from_json: K does not match xi length");
  }
  return nr;
}

}  // namespace pam
