#pragma once

#include <string>
#include <vector>

#include "noise.hpp"
#include "spectral.hpp"

namespace pam {

/// Noise-independent propagator coefficients u_alpha of the chaos hierarchy,
/// tabulated on a coarse time grid.  Built once per (phi, K, N, grid); every
/// realization is evaluated against the same table.
struct PropagatorTable {
  int K = 0;
  int N = 0;
  int steps_per_interval = 1;
  double eps = 1.0;
  std::vector<double> t_grid;                            // starts at 0
  SpectralField phi;
  std::vector<std::vector<MultiIndex>> level_indices;    // [n], canonical order
  std::vector<std::vector<std::vector<SpectralField>>> entries;  // [n][idx][ti]

  /// Index of t in t_grid (within 1e-12 absolute); throws if t is off-grid.
  int time_index(double t) const;
};

/// Advances the full hierarchy through order N over t_grid, splitting each
/// interval into steps_per_interval exponential-trapezoidal substeps.  The
/// intensity eps is folded into the recursion (entry at order n scales as
/// eps^n).  Requires t_grid strictly increasing with t_grid[0] == 0.
PropagatorTable build_table(const SpectralField& phi, int K, int N,
                            std::vector<double> t_grid, int steps_per_interval,
                            double eps = 1.0);

/// Chaos term of order n at a grid time: sum over |alpha| = n of
/// xi_alpha(nr) * u_alpha(t), accumulated pairwise in canonical order.
SpectralField wick_series_term(const PropagatorTable& table, int n, double t,
                               const NoiseRealization& nr);

/// All terms 0..N at once (shares the xi evaluations).
std::vector<SpectralField> wick_series_terms(const PropagatorTable& table,
                                             double t, const NoiseRealization& nr);

struct WickSolution {
  SpectralField field;
  double last_term_norm = 0.0;  // L2 norm of the order-N term, truncation hint
};

/// Truncated chaos solution sum_n eps^n u^(n)(t).
WickSolution wick_solution(const PropagatorTable& table, double eps, double t,
                           const NoiseRealization& nr);

struct DecayDiagnostic {
  std::vector<double> norms;           // L2 norm per order 0..N
  double effective_constant = 0.0;     // smallest C with norms_n <= C^n n^{-n/4}
  std::vector<double> envelope_ratio;  // norms_n / (C^n n^{-n/4}), n >= 1
};

DecayDiagnostic series_decay_diagnostic(const PropagatorTable& table,
                                        const NoiseRealization& nr, double t);

/// JSON dump {K, N, steps_per_interval, eps, t_grid, phi, levels} with entries
/// in canonical order; round-trips bit-exactly through table_from_json.
std::string table_to_json(const PropagatorTable& table);
PropagatorTable table_from_json(const std::string& text);

}  // namespace pam
