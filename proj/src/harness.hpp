#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "correction.hpp"
#include "noise.hpp"
#include "spectral.hpp"
#include "strat.hpp"
#include "wick.hpp"

namespace pam {

inline constexpr const char* kVersionString = "0.1.0";

/// Invalid or inconsistent experiment configuration (maps to exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failure while emitting a report.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PhiSpec {
  enum class Kind { Sin, Bump, Coeffs };
  Kind kind = Kind::Sin;
  std::vector<double> coeffs;  // Kind::Coeffs only
};

struct ExperimentConfig {
  int modes = 8;
  int diag_modes = 32;
  int chaos_order = 4;
  double horizon = 0.5;
  std::vector<double> t_report;   // defaults to {horizon}
  std::vector<double> x_grid;     // defaults to 9 uniform interior points
  std::vector<double> eps_ladder = {0.2, 0.1, 0.05, 0.025};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  PhiSpec phi;
  int steps_per_interval = 64;
  double gamma = 0.6;
  // Runtime knob only: excluded from the canonical serialization and hash so
  // reports are byte-identical across thread counts.
  int threads = 1;

  static ExperimentConfig defaults();
  static ExperimentConfig from_json_text(const std::string& text);

  /// Sorted-key JSON without runtime knobs; input to the config hash.
  std::string canonical_json() const;
  std::string hash() const;
  void validate() const;

  /// Initial condition at truncation level K.
  SpectralField phi_field(int K) const;
};

struct LadderCell {
  std::uint64_t seed = 0;
  double t = 0, x = 0, eps = 0;
  double u_wick = 0, u_strat = 0, gap = 0, scaled_gap = 0;
  double correction_ref = 0, noise_floor = 0;
  bool failed = false;
  std::string error;
};

struct SlopeFit {
  std::uint64_t seed = 0;
  double t = 0, x = 0;
  bool present = false;
  double slope = 0;
  int points_used = 0;
};

struct SpreadRow {
  double t = 0, x = 0, eps = 0;
  double spread = 0;  // max - min of scaled_gap across seeds
};

struct HgammaRow {
  std::uint64_t seed = 0;
  double t = 0, ratio = 0;
};

struct LadderReport {
  std::vector<LadderCell> cells;
  std::vector<SlopeFit> slopes;
  std::vector<SpreadRow> spreads;
  std::vector<HgammaRow> hgamma;
};

struct FirstOrderRow {
  std::uint64_t seed = 0;
  double t = 0, x = 0;
  double u_wick1 = 0, u_strat1 = 0, u_direct = 0;
  double spread = 0;  // max pairwise absolute difference
};

struct FirstOrderReport {
  std::vector<FirstOrderRow> rows;
  double max_spread = 0;
};

struct KConvRow {
  std::uint64_t seed = 0;
  double eps = 0, t = 0;
  int modes_coarse = 0, modes_fine = 0;
  double sup_diff = 0;  // over the x grid
};

struct KConvReport {
  std::vector<KConvRow> rows;
  bool decreasing = true;
};

struct CorrectionRow {
  double t = 0, x = 0;
  double value = 0;         // at diag_modes
  double value_2k = 0;      // at 2 * diag_modes
  double value_4k = 0;      // at 4 * diag_modes
  double extrapolated = 0;  // Richardson estimate of the diag tail limit
  double order_estimate = 0;
};

struct CorrectionReport {
  std::vector<CorrectionRow> rows;
};

struct Report {
  enum class Kind { Ladder, FirstOrder, KConvergence, Correction };
  Kind kind = Kind::Ladder;
  ExperimentConfig config;
  std::string config_hash;
  std::string version;
  int failed_cells = 0;
  std::variant<LadderReport, FirstOrderReport, KConvReport, CorrectionReport> body;
};

Report run_ladder(const ExperimentConfig& cfg);
Report run_first_order_check(const ExperimentConfig& cfg);
Report run_k_convergence(const ExperimentConfig& cfg);
Report run_correction(const ExperimentConfig& cfg);

/// format is "csv" or "json"; floats are emitted in shortest round-trip form.
std::string report_to_string(const Report& report, const std::string& format);

/// path "-" writes to stdout.
void report_write(const Report& report, const std::string& format,
                  const std::string& path);

/// Short human-readable digest (one line per headline quantity).
std::string report_summary(const Report& report);

/// First-order term by direct quadrature, independent of the table and Dyson
/// integrators: s-integral over graded Gauss-Legendre panels of the
/// heat-evolved pointwise product u(s, .) V(.).
SpectralField first_order_direct(const SpectralField& phi, const NoiseRealization& nr,
                                 double t);

}  // namespace pam
