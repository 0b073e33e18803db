#include "wick.hpp"

#include <cmath>
#include <map>
#include "json.hpp"
#include <stdexcept>

#include "etd.hpp"

namespace pam {

namespace {

// Dense coupling matrices B^(k), (B^(k))_{ji} = triple_coeff(j, k, i).
std::vector<std::vector<double>> coupling_matrices(int K) {
  std::vector<std::vector<double>> B(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    auto& m = B[k - 1];
    m.resize(static_cast<std::size_t>(K) * K);
    for (int j = 1; j <= K; ++j) {
      for (int i = 1; i <= K; ++i) {
        m[static_cast<std::size_t>(j - 1) * K + (i - 1)] = triple_coeff(j, k, i);
      }
    }
  }
  return B;
}

struct Parent {
  int k;            // lowered mode
  double weight;    // sqrt(alpha_k)
  int prev_index;   // position of alpha - e(k) one level down
};

}  // namespace

int PropagatorTable::time_index(double t) const {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (std::abs(t_grid[i] - t) <= 1e-12) return static_cast<int>(i);
  }
  throw std::invalid_argument("time_index: requested time is not on the table grid");
}

PropagatorTable build_table(const SpectralField& phi, int K, int N,
                            std::vector<double> t_grid, int steps_per_interval,
                            double eps) {
  if (K < 1) throw std::invalid_argument("build_table: need at least one mode");
  if (N < 0) throw std::invalid_argument("build_table: order must be >= 0");
  if (steps_per_interval < 1) throw std::invalid_argument("build_table: need substeps");
  if (phi.modes() != K) throw std::invalid_argument("build_table: phi mode count != K");
  if (t_grid.empty() || t_grid.front() != 0.0) {
    throw std::invalid_argument("build_table: t_grid must start at 0");
  }
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) {
      throw std::invalid_argument("build_table: t_grid must be strictly increasing");
    }
  }

  PropagatorTable table;
  table.K = K;
  table.N = N;
  table.steps_per_interval = steps_per_interval;
  table.eps = eps;
  table.t_grid = t_grid;
  table.phi = phi;

  table.level_indices.resize(static_cast<std::size_t>(N) + 1);
  std::vector<std::map<std::vector<int>, int>> position(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    table.level_indices[n] = enumerate_multiindices(K, n);
    for (std::size_t i = 0; i < table.level_indices[n].size(); ++i) {
      position[n][table.level_indices[n][i].entries] = static_cast<int>(i);
    }
  }

  // Parent links alpha -> alpha - e(k), fixed per level.
  std::vector<std::vector<std::vector<Parent>>> parents(static_cast<std::size_t>(N) + 1);
  for (int n = 1; n <= N; ++n) {
    parents[n].resize(table.level_indices[n].size());
    for (std::size_t idx = 0; idx < table.level_indices[n].size(); ++idx) {
      const auto& alpha = table.level_indices[n][idx].entries;
      for (int k = 1; k <= K; ++k) {
        if (alpha[k - 1] == 0) continue;
        std::vector<int> lowered = alpha;
        lowered[k - 1] -= 1;
        parents[n][idx].push_back(
            {k, std::sqrt(static_cast<double>(alpha[k - 1])), position[n - 1].at(lowered)});
      }
    }
  }

  const auto B = coupling_matrices(K);
  const auto rates = detail::laplacian_rates(K);

  // Working state: current fields per entry plus the source evaluated at the
  // current time (level n source depends on level n-1 at the same time).
  std::vector<std::vector<std::vector<double>>> cur(static_cast<std::size_t>(N) + 1);
  std::vector<std::vector<std::vector<double>>> src(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) {
    cur[n].assign(table.level_indices[n].size(), std::vector<double>(K, 0.0));
    src[n].assign(table.level_indices[n].size(), std::vector<double>(K, 0.0));
  }
  cur[0][0] = phi.coeffs;

  auto eval_source = [&](int n, std::size_t idx, std::vector<double>& out) {
    for (int j = 0; j < K; ++j) out[j] = 0.0;
    for (const Parent& p : parents[n][idx]) {
      const auto& u = cur[n - 1][p.prev_index];
      const auto& m = B[p.k - 1];
      for (int j = 0; j < K; ++j) {
        double s = 0.0;
        for (int i = 0; i < K; ++i) s += m[static_cast<std::size_t>(j) * K + i] * u[i];
        out[j] += p.weight * s;
      }
    }
    for (int j = 0; j < K; ++j) out[j] *= eps;
  };

  for (int n = 1; n <= N; ++n) {
    for (std::size_t idx = 0; idx < cur[n].size(); ++idx) eval_source(n, idx, src[n][idx]);
  }

  table.entries.resize(static_cast<std::size_t>(N) + 1);
  auto snapshot = [&]() {
    for (int n = 0; n <= N; ++n) {
      for (std::size_t idx = 0; idx < cur[n].size(); ++idx) {
        table.entries[n][idx].emplace_back(cur[n][idx]);
      }
    }
  };
  for (int n = 0; n <= N; ++n) {
    table.entries[n].resize(table.level_indices[n].size());
  }
  snapshot();  // t = 0

  std::vector<double> f_new(static_cast<std::size_t>(K));
  for (std::size_t seg = 0; seg + 1 < t_grid.size(); ++seg) {
    const double h = (t_grid[seg + 1] - t_grid[seg]) / steps_per_interval;
    const auto w = detail::etd_weights(rates, h);
    for (int step = 0; step < steps_per_interval; ++step) {
      for (int j = 0; j < K; ++j) cur[0][0][j] *= w.decay[j];
      for (int n = 1; n <= N; ++n) {
        for (std::size_t idx = 0; idx < cur[n].size(); ++idx) {
          eval_source(n, idx, f_new);
          auto& u = cur[n][idx];
          auto& f_old = src[n][idx];
          for (int j = 0; j < K; ++j) {
            u[j] = w.decay[j] * u[j] + w.w_old[j] * f_old[j] + w.w_new[j] * f_new[j];
          }
          f_old = f_new;
        }
      }
    }
    snapshot();
  }
  return table;
}

SpectralField wick_series_term(const PropagatorTable& table, int n, double t,
                               const NoiseRealization& nr) {
  if (n < 0 || n > table.N) throw std::invalid_argument("wick_series_term: order outside table");
  const int ti = table.time_index(t);
  const auto& idxs = table.level_indices[n];
  const auto& vals = table.entries[n];
  std::vector<double> weights(idxs.size());
  for (std::size_t i = 0; i < idxs.size(); ++i) weights[i] = xi_functional(idxs[i], nr);

  SpectralField out(table.K);
  std::vector<double> scratch(idxs.size());
  for (int j = 0; j < table.K; ++j) {
    for (std::size_t i = 0; i < idxs.size(); ++i) {
      scratch[i] = weights[i] * vals[i][ti].coeffs[j];
    }
    out.coeffs[j] = pairwise_sum(scratch);
  }
  return out;
}

std::vector<SpectralField> wick_series_terms(const PropagatorTable& table, double t,
                                             const NoiseRealization& nr) {
  std::vector<SpectralField> terms;
  terms.reserve(static_cast<std::size_t>(table.N) + 1);
  for (int n = 0; n <= table.N; ++n) terms.push_back(wick_series_term(table, n, t, nr));
  return terms;
}

WickSolution wick_solution(const PropagatorTable& table, double eps, double t,
                           const NoiseRealization& nr) {
  // Tables carry eps^n inside their entries already; evaluating at a third
  // intensity would silently double-scale.
  double ratio = eps;
  if (table.eps != 1.0) {
    if (eps != table.eps) {
      throw std::invalid_argument(
          "wick_solution: table was built at a different intensity");
    }
    ratio = 1.0;
  }
  const auto terms = wick_series_terms(table, t, nr);
  WickSolution sol;
  sol.field = SpectralField(table.K);
  double scale = 1.0;
  for (int n = 0; n <= table.N; ++n) {
    sol.field += scale * terms[n];
    if (n < table.N) scale *= ratio;
  }
  sol.last_term_norm = terms[table.N].l2_norm();
  return sol;
}

DecayDiagnostic series_decay_diagnostic(const PropagatorTable& table,
                                        const NoiseRealization& nr, double t) {
  DecayDiagnostic d;
  const auto terms = wick_series_terms(table, t, nr);
  for (const auto& term : terms) d.norms.push_back(term.l2_norm());
  double c = 0.0;
  for (int n = 1; n <= table.N; ++n) {
    if (d.norms[n] <= 0.0) continue;
    // smallest C with norm_n <= C^n n^{-n/4}
    const double candidate = std::pow(d.norms[n], 1.0 / n) * std::pow(n, 0.25);
    if (candidate > c) c = candidate;
  }
  d.effective_constant = c;
  for (int n = 1; n <= table.N; ++n) {
    const double envelope = (c > 0.0) ? std::pow(c, n) * std::pow(n, -0.25 * n) : 0.0;
    d.envelope_ratio.push_back(envelope > 0.0 ? d.norms[n] / envelope : 0.0);
  }
  return d;
}

std::string table_to_json(const PropagatorTable& table) {
  nlohmann::json j;
  j["K"] = table.K;
  j["N"] = table.N;
  j["steps_per_interval"] = table.steps_per_interval;
  j["eps"] = table.eps;
  j["t_grid"] = table.t_grid;
  j["phi"] = table.phi.coeffs;
  nlohmann::json levels = nlohmann::json::array();
  for (int n = 0; n <= table.N; ++n) {
    nlohmann::json level = nlohmann::json::array();
    for (std::size_t idx = 0; idx < table.level_indices[n].size(); ++idx) {
      nlohmann::json entry;
      entry["alpha"] = table.level_indices[n][idx].entries;
      nlohmann::json values = nlohmann::json::array();
      for (const auto& field : table.entries[n][idx]) values.push_back(field.coeffs);
      entry["values"] = values;
      level.push_back(entry);
    }
    levels.push_back(level);
  }
  j["levels"] = levels;
  return j.dump();
}

PropagatorTable table_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  PropagatorTable table;
  table.K = j.at("K").get<int>();
  table.N = j.at("N").get<int>();
  table.steps_per_interval = j.at("steps_per_interval").get<int>();
  table.eps = j.at("eps").get<double>();
  table.t_grid = j.at("t_grid").get<std::vector<double>>();
  table.phi = SpectralField(j.at("phi").get<std::vector<double>>());
  const auto& levels = j.at("levels");
  if (static_cast<int>(levels.size()) != table.N + 1) {
    throw std::invalid_argument("table_from_json: level count does not match N");
  }
  table.level_indices.resize(levels.size());
  table.entries.resize(levels.size());
  for (std::size_t n = 0; n < levels.size(); ++n) {
    for (const auto& entry : levels[n]) {
      MultiIndex alpha;
      alpha.entries = entry.at("alpha").get<std::vector<int>>();
      table.level_indices[n].push_back(alpha);
      std::vector<SpectralField> values;
      for (const auto& v : entry.at("values")) {
        values.emplace_back(v.get<std::vector<double>>());
      }
      table.entries[n].push_back(std::move(values));
    }
  }
  return table;
}

}  // namespace pam
