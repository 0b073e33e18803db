#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "etd.hpp"
#include "json.hpp"
#include "util.hpp"

namespace pam {

namespace {

using nlohmann::json;

double bump_profile(double x) {
  const double s = (x - kPi / 2.0) / (kPi / 4.0);
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

std::vector<double> uniform_interior(int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) xs[i - 1] = kPi * i / (n + 1);
  return xs;
}

void run_indexed(int threads, std::size_t n, const std::function<void(std::size_t)>& work) {
  const int T = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (T == 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

SpectralField assemble_series(const std::vector<SpectralField>& terms, double eps) {
  SpectralField out(terms.front().modes());
  double scale = 1.0;
  for (std::size_t n = 0; n < terms.size(); ++n) {
    out += scale * terms[n];
    scale *= eps;
  }
  return out;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.t_report = {cfg.horizon};
  cfg.x_grid = uniform_interior(9);
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> allowed = {
      "modes", "diag_modes", "chaos_order", "horizon", "t_report", "x_grid",
      "eps",   "seeds",      "phi",         "steps",   "gamma",    "threads"};
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("unknown config key: " + item.key());
    }
  }

  ExperimentConfig cfg = defaults();
  try {
    if (j.contains("modes")) cfg.modes = j["modes"].get<int>();
    if (j.contains("diag_modes")) cfg.diag_modes = j["diag_modes"].get<int>();
    if (j.contains("chaos_order")) cfg.chaos_order = j["chaos_order"].get<int>();
    if (j.contains("horizon")) cfg.horizon = j["horizon"].get<double>();
    if (j.contains("t_report")) {
      cfg.t_report = j["t_report"].get<std::vector<double>>();
    } else {
      cfg.t_report = {cfg.horizon};
    }
    if (j.contains("x_grid")) {
      if (j["x_grid"].is_number_integer()) {
        const int n = j["x_grid"].get<int>();
        if (n < 1) throw ConfigError("x_grid count must be >= 1");
        cfg.x_grid = uniform_interior(n);
      } else {
        cfg.x_grid = j["x_grid"].get<std::vector<double>>();
      }
    }
    if (j.contains("eps")) cfg.eps_ladder = j["eps"].get<std::vector<double>>();
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("phi")) {
      const auto& p = j["phi"];
      if (p.is_string()) {
        const std::string name = p.get<std::string>();
        if (name == "sin") {
          cfg.phi.kind = PhiSpec::Kind::Sin;
        } else if (name == "bump") {
          cfg.phi.kind = PhiSpec::Kind::Bump;
        } else {
          throw ConfigError("unknown phi preset: " + name);
        }
      } else if (p.is_object() && p.contains("coeffs")) {
        cfg.phi.kind = PhiSpec::Kind::Coeffs;
        cfg.phi.coeffs = p["coeffs"].get<std::vector<double>>();
      } else {
        throw ConfigError("phi must be \"sin\", \"bump\", or {\"coeffs\": [...]}");
      }
    }
    if (j.contains("steps")) cfg.steps_per_interval = j["steps"].get<int>();
    if (j.contains("gamma")) cfg.gamma = j["gamma"].get<double>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has wrong type: ") + e.what());
  }
  return cfg;
}

std::string ExperimentConfig::canonical_json() const {
  json j;
  j["modes"] = modes;
  j["diag_modes"] = diag_modes;
  j["chaos_order"] = chaos_order;
  j["horizon"] = horizon;
  j["t_report"] = t_report;
  j["x_grid"] = x_grid;
  j["eps"] = eps_ladder;
  j["seeds"] = seeds;
  switch (phi.kind) {
    case PhiSpec::Kind::Sin:
      j["phi"] = "sin";
      break;
    case PhiSpec::Kind::Bump:
      j["phi"] = "bump";
      break;
    case PhiSpec::Kind::Coeffs:
      j["phi"] = json{{"coeffs", phi.coeffs}};
      break;
  }
  j["steps"] = steps_per_interval;
  j["gamma"] = gamma;
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(canonical_json());
  return out.str();
}

void ExperimentConfig::validate() const {
  if (modes < 1) throw ConfigError("modes must be >= 1");
  if (diag_modes < 1) throw ConfigError("diag_modes must be >= 1");
  if (chaos_order < 2) throw ConfigError("chaos_order must be >= 2");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be positive");
  if (t_report.empty()) throw ConfigError("t_report must not be empty");
  double prev_t = 0.0;
  for (double t : t_report) {
    if (!std::isfinite(t) || !(t > 0.0)) throw ConfigError("reporting times must be positive");
    if (!(t > prev_t)) throw ConfigError("reporting times must be strictly increasing");
    if (t > horizon * (1.0 + 1e-12)) throw ConfigError("reporting times must not exceed the horizon");
    prev_t = t;
  }
  if (x_grid.empty()) throw ConfigError("x_grid must not be empty");
  for (double x : x_grid) {
    if (!std::isfinite(x) || x < 0.0 || x > kPi) {
      throw ConfigError("x_grid points must lie in [0, pi]");
    }
  }
  if (eps_ladder.empty()) throw ConfigError("eps ladder must not be empty");
  double prev_eps = std::numeric_limits<double>::infinity();
  for (double e : eps_ladder) {
    if (!std::isfinite(e) || !(e > 0.0)) throw ConfigError("eps entries must be positive");
    if (!(e < prev_eps)) throw ConfigError("eps ladder must be strictly decreasing");
    prev_eps = e;
  }
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  if (steps_per_interval < 1) throw ConfigError("steps must be >= 1");
  if (!(gamma > 0.5 && gamma < 1.0)) throw ConfigError("gamma must lie in (1/2, 1)");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (phi.kind == PhiSpec::Kind::Coeffs) {
    if (phi.coeffs.empty()) throw ConfigError("phi coefficients must not be empty");
    for (double c : phi.coeffs) {
      if (!std::isfinite(c)) throw ConfigError("phi coefficients must be finite");
    }
    if (static_cast<int>(phi.coeffs.size()) > modes) {
      throw ConfigError("phi has more coefficients than modes");
    }
  }
}

SpectralField ExperimentConfig::phi_field(int K) const {
  if (K < 1) throw ConfigError("phi_field: need at least one mode");
  switch (phi.kind) {
    case PhiSpec::Kind::Sin: {
      SpectralField f(K);
      f.coeffs[0] = std::sqrt(kPi / 2.0);  // sin(x) = sqrt(pi/2) m_1(x)
      return f;
    }
    case PhiSpec::Kind::Bump:
      return project(bump_profile, K, 8 * K + 32);
    case PhiSpec::Kind::Coeffs: {
      if (static_cast<int>(phi.coeffs.size()) > K) {
        throw ConfigError("phi has more coefficients than modes");
      }
      SpectralField f(K);
      std::copy(phi.coeffs.begin(), phi.coeffs.end(), f.coeffs.begin());
      return f;
    }
  }
  throw ConfigError("phi_field: unreachable");
}

// ---------------------------------------------------------------------------
// ladder

Report run_ladder(const ExperimentConfig& cfg) {
  cfg.validate();
  Report rep;
  rep.kind = Report::Kind::Ladder;
  rep.config = cfg;
  rep.config_hash = cfg.hash();
  rep.version = kVersionString;

  const int K = cfg.modes;
  const int N = cfg.chaos_order;
  const int S = cfg.steps_per_interval;
  const SpectralField phi = cfg.phi_field(K);
  const double phi_l2 = phi.l2_norm();
  const std::size_t nt = cfg.t_report.size();
  const std::size_t nx = cfg.x_grid.size();
  const std::size_t ne = cfg.eps_ladder.size();

  std::vector<double> grid = {0.0};
  grid.insert(grid.end(), cfg.t_report.begin(), cfg.t_report.end());

  // Seed-independent second-order reference on the evaluation grid.
  std::vector<std::vector<double>> ref(nt, std::vector<double>(nx));
  for (std::size_t ti = 0; ti < nt; ++ti) {
    const SpectralField c = correction_field_discrete(phi, cfg.t_report[ti], K);
    for (std::size_t xi = 0; xi < nx; ++xi) ref[ti][xi] = c.eval(cfg.x_grid[xi]);
  }

  struct SeedOut {
    std::vector<LadderCell> cells;
    std::vector<SlopeFit> slopes;
    std::vector<HgammaRow> hgamma;
    int failed = 0;
  };
  std::vector<SeedOut> outs(cfg.seeds.size());

  auto work = [&](std::size_t si) {
    SeedOut& out = outs[si];
    const std::uint64_t seed = cfg.seeds[si];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      const NoiseRealization nr = sample(seed, K);
      const PropagatorTable table = build_table(phi, K, N, grid, S);
      // Doubled-resolution rerun at the largest eps estimates the quadrature
      // noise floor per (t, x).
      const PropagatorTable table_fine = build_table(phi, K, N, grid, 2 * S);
      const double eps_max = cfg.eps_ladder.front();

      std::vector<GalerkinSystem> systems;
      systems.reserve(ne);
      for (double eps : cfg.eps_ladder) systems.emplace_back(nr, K, eps);

      std::vector<std::vector<std::vector<double>>> uw(
          nt, std::vector<std::vector<double>>(ne, std::vector<double>(nx)));
      auto us = uw;
      std::vector<std::vector<double>> floor_tx(nt, std::vector<double>(nx));

      for (std::size_t ti = 0; ti < nt; ++ti) {
        const double t = cfg.t_report[ti];
        const auto terms = wick_series_terms(table, t, nr);
        const auto terms_fine = wick_series_terms(table_fine, t, nr);
        for (std::size_t ei = 0; ei < ne; ++ei) {
          const SpectralField wf = assemble_series(terms, cfg.eps_ladder[ei]);
          const SpectralField sf = systems[ei].flow(phi, t);
          for (std::size_t xi = 0; xi < nx; ++xi) {
            uw[ti][ei][xi] = wf.eval(cfg.x_grid[xi]);
            us[ti][ei][xi] = sf.eval(cfg.x_grid[xi]);
          }
        }
        const SpectralField wf_fine = assemble_series(terms_fine, eps_max);
        for (std::size_t xi = 0; xi < nx; ++xi) {
          const double drift = std::abs(uw[ti][0][xi] - wf_fine.eval(cfg.x_grid[xi]));
          floor_tx[ti][xi] = std::max(drift, 1e-15 * (1.0 + std::abs(uw[ti][0][xi])));
        }
        out.hgamma.push_back(
            {seed, t, hgamma_diagnostic(systems[0].flow(phi, t), cfg.gamma, t, phi_l2)});
      }

      for (std::size_t ti = 0; ti < nt; ++ti) {
        for (std::size_t xi = 0; xi < nx; ++xi) {
          for (std::size_t ei = 0; ei < ne; ++ei) {
            LadderCell c;
            c.seed = seed;
            c.t = cfg.t_report[ti];
            c.x = cfg.x_grid[xi];
            c.eps = cfg.eps_ladder[ei];
            c.u_wick = uw[ti][ei][xi];
            c.u_strat = us[ti][ei][xi];
            c.gap = c.u_strat - c.u_wick;
            c.scaled_gap = c.gap / (c.eps * c.eps);
            c.correction_ref = ref[ti][xi];
            c.noise_floor = floor_tx[ti][xi];
            if (!std::isfinite(c.u_wick) || !std::isfinite(c.u_strat)) {
              c.failed = true;
              c.error = "non-finite solution value";
              ++out.failed;
            }
            out.cells.push_back(std::move(c));
          }

          SlopeFit fit;
          fit.seed = seed;
          fit.t = cfg.t_report[ti];
          fit.x = cfg.x_grid[xi];
          std::vector<double> lx, ly;
          for (std::size_t ei = 0; ei < ne; ++ei) {
            const double gap = us[ti][ei][xi] - uw[ti][ei][xi];
            if (!std::isfinite(gap)) continue;
            if (!(std::abs(gap) > 100.0 * floor_tx[ti][xi])) continue;
            lx.push_back(std::log(cfg.eps_ladder[ei]));
            ly.push_back(std::log(std::abs(gap)));
          }
          if (lx.size() >= 2) {
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
              mx += lx[i];
              my += ly[i];
            }
            mx /= lx.size();
            my /= ly.size();
            double sxy = 0, sxx = 0;
            for (std::size_t i = 0; i < lx.size(); ++i) {
              sxy += (lx[i] - mx) * (ly[i] - my);
              sxx += (lx[i] - mx) * (lx[i] - mx);
            }
            fit.present = true;
            fit.slope = sxy / sxx;
            fit.points_used = static_cast<int>(lx.size());
          }
          out.slopes.push_back(std::move(fit));
        }
      }
    } catch (const std::exception& e) {
      out.cells.clear();
      out.slopes.clear();
      out.hgamma.clear();
      out.failed = 0;
      for (std::size_t ti = 0; ti < nt; ++ti) {
        for (std::size_t xi = 0; xi < nx; ++xi) {
          for (std::size_t ei = 0; ei < ne; ++ei) {
            LadderCell c;
            c.seed = seed;
            c.t = cfg.t_report[ti];
            c.x = cfg.x_grid[xi];
            c.eps = cfg.eps_ladder[ei];
            c.u_wick = c.u_strat = c.gap = c.scaled_gap = nan;
            c.correction_ref = ref[ti][xi];
            c.noise_floor = nan;
            c.failed = true;
            c.error = e.what();
            ++out.failed;
            out.cells.push_back(std::move(c));
          }
          SlopeFit fit;
          fit.seed = seed;
          fit.t = cfg.t_report[ti];
          fit.x = cfg.x_grid[xi];
          out.slopes.push_back(std::move(fit));
        }
      }
    }
  };

  run_indexed(cfg.threads, cfg.seeds.size(), work);

  LadderReport lr;
  for (const auto& out : outs) {
    lr.cells.insert(lr.cells.end(), out.cells.begin(), out.cells.end());
    lr.slopes.insert(lr.slopes.end(), out.slopes.begin(), out.slopes.end());
    lr.hgamma.insert(lr.hgamma.end(), out.hgamma.begin(), out.hgamma.end());
    rep.failed_cells += out.failed;
  }

  // Cross-seed spread of the scaled gap, in fixed (t, x, eps) order.
  for (std::size_t ti = 0; ti < nt; ++ti) {
    for (std::size_t xi = 0; xi < nx; ++xi) {
      for (std::size_t ei = 0; ei < ne; ++ei) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        bool any = false;
        for (std::size_t si = 0; si < outs.size(); ++si) {
          const std::size_t cell = (ti * nx + xi) * ne + ei;
          if (cell >= outs[si].cells.size()) continue;
          const LadderCell& c = outs[si].cells[cell];
          if (c.failed) continue;
          lo = std::min(lo, c.scaled_gap);
          hi = std::max(hi, c.scaled_gap);
          any = true;
        }
        SpreadRow row;
        row.t = cfg.t_report[ti];
        row.x = cfg.x_grid[xi];
        row.eps = cfg.eps_ladder[ei];
        row.spread = any ? hi - lo : std::numeric_limits<double>::quiet_NaN();
        lr.spreads.push_back(row);
      }
    }
  }

  rep.body = std::move(lr);
  return rep;
}

// ---------------------------------------------------------------------------
// first order

SpectralField first_order_direct(const SpectralField& phi, const NoiseRealization& nr,
                                 double t) {
  const int K = phi.modes();
  if (nr.modes() < K) throw std::invalid_argument("first_order_direct: realization too short");
  if (t < 0.0) throw std::domain_error("first_order_direct: requires t >= 0");
  SpectralField out(K);
  if (t == 0.0) return out;

  const QuadRule yrule = composite_gauss_legendre(0.0, kPi, 8 * K + 32);
  const std::size_t Q = yrule.nodes.size();
  std::vector<double> basis(static_cast<std::size_t>(K) * Q);
  for (int k = 1; k <= K; ++k) {
    for (std::size_t i = 0; i < Q; ++i) {
      basis[static_cast<std::size_t>(k - 1) * Q + i] = basis_eval(k, yrule.nodes[i]);
    }
  }
  std::vector<double> v(Q, 0.0);  // potential truncated to the model's K modes
  for (int k = 1; k <= K; ++k) {
    for (std::size_t i = 0; i < Q; ++i) {
      v[i] += nr.xi[k - 1] * basis[static_cast<std::size_t>(k - 1) * Q + i];
    }
  }

  // Panels refined geometrically toward s = t resolve every semigroup scale
  // e^{-j^2 (t-s)} down to the finest mode.
  std::vector<double> bounds = {0.0};
  constexpr int kLevels = 14;
  for (int m = 1; m <= kLevels; ++m) bounds.push_back(t * (1.0 - std::pow(2.0, -m)));
  bounds.push_back(t);
  static const QuadRule base = gauss_legendre(16);

  std::vector<double> u(Q), prod(Q);
  for (std::size_t p = 0; p + 1 < bounds.size(); ++p) {
    const double lo = bounds[p], hi = bounds[p + 1];
    for (std::size_t g = 0; g < base.nodes.size(); ++g) {
      const double s = lo + 0.5 * (hi - lo) * (base.nodes[g] + 1.0);
      const double ws = 0.5 * (hi - lo) * base.weights[g];
      for (std::size_t i = 0; i < Q; ++i) u[i] = 0.0;
      for (int k = 1; k <= K; ++k) {
        const double amp = phi.coeffs[k - 1] * std::exp(-static_cast<double>(k) * k * s);
        if (amp == 0.0) continue;
        for (std::size_t i = 0; i < Q; ++i) {
          u[i] += amp * basis[static_cast<std::size_t>(k - 1) * Q + i];
        }
      }
      for (std::size_t i = 0; i < Q; ++i) prod[i] = u[i] * v[i];
      for (int j = 1; j <= K; ++j) {
        double cj = 0.0;
        for (std::size_t i = 0; i < Q; ++i) {
          cj += yrule.weights[i] * prod[i] * basis[static_cast<std::size_t>(j - 1) * Q + i];
        }
        out.coeffs[j - 1] += ws * std::exp(-static_cast<double>(j) * j * (t - s)) * cj;
      }
    }
  }
  return out;
}

Report run_first_order_check(const ExperimentConfig& cfg) {
  cfg.validate();
  Report rep;
  rep.kind = Report::Kind::FirstOrder;
  rep.config = cfg;
  rep.config_hash = cfg.hash();
  rep.version = kVersionString;

  const int K = cfg.modes;
  const int S = cfg.steps_per_interval;
  const SpectralField phi = cfg.phi_field(K);
  std::vector<double> grid = {0.0};
  grid.insert(grid.end(), cfg.t_report.begin(), cfg.t_report.end());

  FirstOrderReport fo;
  for (const std::uint64_t seed : cfg.seeds) {
    const NoiseRealization nr = sample(seed, K);
    const PropagatorTable table = build_table(phi, K, 1, grid, S);
    const auto dyson = strat_series_terms(phi, nr, 1, grid, S);
    for (std::size_t ti = 0; ti < cfg.t_report.size(); ++ti) {
      const double t = cfg.t_report[ti];
      const SpectralField w1 = wick_series_term(table, 1, t, nr);
      const SpectralField s1 = dyson[1][ti + 1];
      const SpectralField d1 = first_order_direct(phi, nr, t);
      for (double x : cfg.x_grid) {
        FirstOrderRow row;
        row.seed = seed;
        row.t = t;
        row.x = x;
        row.u_wick1 = w1.eval(x);
        row.u_strat1 = s1.eval(x);
        row.u_direct = d1.eval(x);
        row.spread = std::max({std::abs(row.u_wick1 - row.u_strat1),
                               std::abs(row.u_wick1 - row.u_direct),
                               std::abs(row.u_strat1 - row.u_direct)});
        fo.max_spread = std::max(fo.max_spread, row.spread);
        fo.rows.push_back(row);
      }
    }
  }
  rep.body = std::move(fo);
  return rep;
}

// ---------------------------------------------------------------------------
// K refinement

Report run_k_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  Report rep;
  rep.kind = Report::Kind::KConvergence;
  rep.config = cfg;
  rep.config_hash = cfg.hash();
  rep.version = kVersionString;

  const int K = cfg.modes;
  const std::array<int, 3> levels = {K, 2 * K, 4 * K};
  KConvReport kc;
  for (const std::uint64_t seed : cfg.seeds) {
    const NoiseRealization full = sample(seed, 4 * K);
    for (const double eps : cfg.eps_ladder) {
      // values[level][ti][xi]
      std::vector<std::vector<std::vector<double>>> values;
      for (const int kl : levels) {
        NoiseRealization nr;
        nr.seed = seed;
        nr.xi.assign(full.xi.begin(), full.xi.begin() + kl);
        const SpectralField phi_k = cfg.phi_field(kl);
        const GalerkinSystem sys(nr, kl, eps);
        std::vector<std::vector<double>> per_t;
        for (const double t : cfg.t_report) {
          const SpectralField f = sys.flow(phi_k, t);
          std::vector<double> row;
          row.reserve(cfg.x_grid.size());
          for (double x : cfg.x_grid) row.push_back(f.eval(x));
          per_t.push_back(std::move(row));
        }
        values.push_back(std::move(per_t));
      }
      for (std::size_t ti = 0; ti < cfg.t_report.size(); ++ti) {
        double prev_diff = std::numeric_limits<double>::infinity();
        for (std::size_t pair = 0; pair + 1 < levels.size(); ++pair) {
          double sup = 0.0;
          for (std::size_t xi = 0; xi < cfg.x_grid.size(); ++xi) {
            sup = std::max(sup, std::abs(values[pair + 1][ti][xi] - values[pair][ti][xi]));
          }
          KConvRow row;
          row.seed = seed;
          row.eps = eps;
          row.t = cfg.t_report[ti];
          row.modes_coarse = levels[pair];
          row.modes_fine = levels[pair + 1];
          row.sup_diff = sup;
          kc.rows.push_back(row);
          if (pair > 0 && sup > prev_diff) kc.decreasing = false;
          prev_diff = sup;
        }
      }
    }
  }
  rep.body = std::move(kc);
  return rep;
}

// ---------------------------------------------------------------------------
// correction scan

Report run_correction(const ExperimentConfig& cfg) {
  cfg.validate();
  Report rep;
  rep.kind = Report::Kind::Correction;
  rep.config = cfg;
  rep.config_hash = cfg.hash();
  rep.version = kVersionString;

  const SpectralField phi = cfg.phi_field(cfg.modes);
  CorrectionReport cr;
  for (const double t : cfg.t_report) {
    const SpectralField v1 = correction_field(phi, t, cfg.modes, cfg.diag_modes);
    const SpectralField v2 = correction_field(phi, t, cfg.modes, 2 * cfg.diag_modes);
    const SpectralField v4 = correction_field(phi, t, cfg.modes, 4 * cfg.diag_modes);
    const SpectralField ex = richardson_extrapolate(v1, v2, v4);
    for (const double x : cfg.x_grid) {
      CorrectionRow row;
      row.t = t;
      row.x = x;
      row.value = v1.eval(x);
      row.value_2k = v2.eval(x);
      row.value_4k = v4.eval(x);
      row.extrapolated = ex.eval(x);
      const double d1 = row.value_2k - row.value;
      const double d2 = row.value_4k - row.value_2k;
      row.order_estimate =
          (d2 != 0.0 && std::abs(d1) > std::abs(d2)) ? std::log2(std::abs(d1 / d2)) : 0.0;
      cr.rows.push_back(row);
    }
  }
  rep.body = std::move(cr);
  return rep;
}

// ---------------------------------------------------------------------------
// emission

namespace {

json config_as_json(const ExperimentConfig& cfg) { return json::parse(cfg.canonical_json()); }

std::string ladder_csv(const Report& rep) {
  const auto& lr = std::get<LadderReport>(rep.body);
  std::ostringstream out;
  out << "seed,t,x,eps,u_wick,u_strat,gap,scaled_gap,correction_ref,noise_floor\n";
  for (const auto& c : lr.cells) {
    out << c.seed << ',' << format_double(c.t) << ',' << format_double(c.x) << ','
        << format_double(c.eps) << ',' << format_double(c.u_wick) << ','
        << format_double(c.u_strat) << ',' << format_double(c.gap) << ','
        << format_double(c.scaled_gap) << ',' << format_double(c.correction_ref) << ','
        << format_double(c.noise_floor) << '\n';
  }
  return out.str();
}

std::string first_order_csv(const Report& rep) {
  const auto& fo = std::get<FirstOrderReport>(rep.body);
  std::ostringstream out;
  out << "seed,t,x,u_wick1,u_strat1,u_direct,spread\n";
  for (const auto& r : fo.rows) {
    out << r.seed << ',' << format_double(r.t) << ',' << format_double(r.x) << ','
        << format_double(r.u_wick1) << ',' << format_double(r.u_strat1) << ','
        << format_double(r.u_direct) << ',' << format_double(r.spread) << '\n';
  }
  return out.str();
}

std::string k_convergence_csv(const Report& rep) {
  const auto& kc = std::get<KConvReport>(rep.body);
  std::ostringstream out;
  out << "seed,eps,t,modes_coarse,modes_fine,sup_diff\n";
  for (const auto& r : kc.rows) {
    out << r.seed << ',' << format_double(r.eps) << ',' << format_double(r.t) << ','
        << r.modes_coarse << ',' << r.modes_fine << ',' << format_double(r.sup_diff)
        << '\n';
  }
  return out.str();
}

std::string correction_csv(const Report& rep) {
  const auto& cr = std::get<CorrectionReport>(rep.body);
  const double t_last = rep.config.t_report.back();
  std::ostringstream out;
  out << "x,value\n";
  for (const auto& r : cr.rows) {
    if (r.t != t_last) continue;  // CSV carries the final reporting time only
    out << format_double(r.x) << ',' << format_double(r.value) << '\n';
  }
  return out.str();
}

json ladder_json(const Report& rep) {
  const auto& lr = std::get<LadderReport>(rep.body);
  json j;
  json cells = json::array();
  for (const auto& c : lr.cells) {
    json jc;
    jc["seed"] = c.seed;
    jc["t"] = c.t;
    jc["x"] = c.x;
    jc["eps"] = c.eps;
    jc["u_wick"] = c.u_wick;
    jc["u_strat"] = c.u_strat;
    jc["gap"] = c.gap;
    jc["scaled_gap"] = c.scaled_gap;
    jc["correction_ref"] = c.correction_ref;
    jc["noise_floor"] = c.noise_floor;
    if (c.failed) {
      jc["failed"] = true;
      jc["error"] = c.error;
    }
    cells.push_back(std::move(jc));
  }
  j["cells"] = std::move(cells);
  json slopes = json::array();
  for (const auto& s : lr.slopes) {
    json js;
    js["seed"] = s.seed;
    js["t"] = s.t;
    js["x"] = s.x;
    if (s.present) {
      js["slope"] = s.slope;
      js["points_used"] = s.points_used;
    } else {
      js["slope"] = nullptr;
    }
    slopes.push_back(std::move(js));
  }
  j["slope_fits"] = std::move(slopes);
  json spreads = json::array();
  for (const auto& s : lr.spreads) {
    spreads.push_back({{"t", s.t}, {"x", s.x}, {"eps", s.eps}, {"spread", s.spread}});
  }
  j["cross_seed_spread"] = std::move(spreads);
  json hg = json::array();
  for (const auto& h : lr.hgamma) {
    hg.push_back({{"seed", h.seed}, {"t", h.t}, {"ratio", h.ratio}});
  }
  j["hgamma"] = std::move(hg);
  return j;
}

json first_order_json(const Report& rep) {
  const auto& fo = std::get<FirstOrderReport>(rep.body);
  json j;
  json rows = json::array();
  for (const auto& r : fo.rows) {
    rows.push_back({{"seed", r.seed},
                    {"t", r.t},
                    {"x", r.x},
                    {"u_wick1", r.u_wick1},
                    {"u_strat1", r.u_strat1},
                    {"u_direct", r.u_direct},
                    {"spread", r.spread}});
  }
  j["rows"] = std::move(rows);
  j["max_spread"] = fo.max_spread;
  return j;
}

json k_convergence_json(const Report& rep) {
  const auto& kc = std::get<KConvReport>(rep.body);
  json j;
  json rows = json::array();
  for (const auto& r : kc.rows) {
    rows.push_back({{"seed", r.seed},
                    {"eps", r.eps},
                    {"t", r.t},
                    {"modes_coarse", r.modes_coarse},
                    {"modes_fine", r.modes_fine},
                    {"sup_diff", r.sup_diff}});
  }
  j["rows"] = std::move(rows);
  j["decreasing"] = kc.decreasing;
  return j;
}

json correction_json(const Report& rep) {
  const auto& cr = std::get<CorrectionReport>(rep.body);
  json j;
  json rows = json::array();
  for (const auto& r : cr.rows) {
    rows.push_back({{"t", r.t},
                    {"x", r.x},
                    {"value", r.value},
                    {"value_2k", r.value_2k},
                    {"value_4k", r.value_4k},
                    {"extrapolated", r.extrapolated},
                    {"order_estimate", r.order_estimate}});
  }
  j["rows"] = std::move(rows);
  return j;
}

const char* kind_name(Report::Kind kind) {
  switch (kind) {
    case Report::Kind::Ladder:
      return "ladder";
    case Report::Kind::FirstOrder:
      return "first_order";
    case Report::Kind::KConvergence:
      return "k_convergence";
    case Report::Kind::Correction:
      return "correction";
  }
  return "unknown";
}

}  // namespace

std::string report_to_string(const Report& report, const std::string& format) {
  if (format == "csv") {
    switch (report.kind) {
      case Report::Kind::Ladder:
        return ladder_csv(report);
      case Report::Kind::FirstOrder:
        return first_order_csv(report);
      case Report::Kind::KConvergence:
        return k_convergence_csv(report);
      case Report::Kind::Correction:
        return correction_csv(report);
    }
  }
  if (format == "json") {
    json j;
    j["kind"] = kind_name(report.kind);
    j["version"] = report.version;
    j["config"] = config_as_json(report.config);
    j["config_hash"] = report.config_hash;
    j["failed_cells"] = report.failed_cells;
    json body;
    switch (report.kind) {
      case Report::Kind::Ladder:
        body = ladder_json(report);
        break;
      case Report::Kind::FirstOrder:
        body = first_order_json(report);
        break;
      case Report::Kind::KConvergence:
        body = k_convergence_json(report);
        break;
      case Report::Kind::Correction:
        body = correction_json(report);
        break;
    }
    for (auto& item : body.items()) j[item.key()] = std::move(item.value());
    return j.dump(2) + "\n";
  }
  throw ConfigError("unknown output format: " + format + " (expected csv or json)");
}

void report_write(const Report& report, const std::string& format,
                  const std::string& path) {
  const std::string text = report_to_string(report, format);
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::string report_summary(const Report& report) {
  std::ostringstream out;
  switch (report.kind) {
    case Report::Kind::Ladder: {
      const auto& lr = std::get<LadderReport>(report.body);
      out << "ladder: " << lr.cells.size() << " cells, " << report.failed_cells
          << " failed, config " << report.config_hash << "\n";
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      int present = 0, absent = 0;
      for (const auto& s : lr.slopes) {
        if (!s.present) {
          ++absent;
          continue;
        }
        ++present;
        lo = std::min(lo, s.slope);
        hi = std::max(hi, s.slope);
      }
      if (present > 0) {
        out << "slope fits: " << present << " (absent: " << absent << "), range ["
            << format_double(lo) << ", " << format_double(hi) << "]\n";
      } else {
        out << "slope fits: none (absent: " << absent << ")\n";
      }
      if (!report.config.eps_ladder.empty()) {
        const double eps_min = report.config.eps_ladder.back();
        double worst = 0.0, scale = 0.0;
        for (const auto& c : lr.cells) {
          if (c.failed || c.eps != eps_min) continue;
          worst = std::max(worst, std::abs(c.scaled_gap - c.correction_ref));
          scale = std::max(scale, std::abs(c.correction_ref));
        }
        out << "scaled gap vs reference at eps=" << format_double(eps_min) << ": max |diff| "
            << format_double(worst);
        if (scale > 0.0) out << " (rel " << format_double(worst / scale) << ")";
        out << "\n";
      }
      break;
    }
    case Report::Kind::FirstOrder: {
      const auto& fo = std::get<FirstOrderReport>(report.body);
      out << "first-order check: " << fo.rows.size() << " rows, max three-way spread "
          << format_double(fo.max_spread) << "\n";
      break;
    }
    case Report::Kind::KConvergence: {
      const auto& kc = std::get<KConvReport>(report.body);
      out << "k-convergence: " << kc.rows.size() << " rows, refinement differences "
          << (kc.decreasing ? "decreasing" : "NOT decreasing") << "\n";
      break;
    }
    case Report::Kind::Correction: {
      const auto& cr = std::get<CorrectionReport>(report.body);
      double worst = 0.0;
      for (const auto& r : cr.rows) {
        worst = std::max(worst, std::abs(r.value_4k - r.extrapolated));
      }
      out << "correction scan: " << cr.rows.size() << " rows, max |4K - extrapolated| "
          << format_double(worst) << "\n";
      break;
    }
  }
  return out.str();
}

}  // namespace pam
