// Command line front end.  Talks to the library exclusively through the C
// interface so it doubles as a smoke test of the shared object.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pamcomp/pamcomp.h"

namespace {

using nlohmann::json;

struct Options {
  std::string config_path;
  std::string phi;
  std::string x_grid;
  std::string eps;
  std::string seeds;
  std::string t_report;
  std::string format = "csv";
  std::string out = "-";
  int modes = 0;
  int diag_modes = 0;
  int chaos_order = 0;
  int steps = 0;
  int threads = 0;
  double time = 0.0;
  double gamma = 0.0;
};

int fail(pamc_status rc) {
  std::cerr << "error: " << pamc_last_error() << "\n";
  return static_cast<int>(rc);
}

int usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return static_cast<int>(PAMC_ERR_CONFIG);
}

bool parse_double_list(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out.empty();
}

bool parse_seed_list(const std::string& text, std::vector<std::uint64_t>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stoull(item, &pos));
      if (pos != item.size()) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return !out.empty();
}

bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

// Merges the config file (if any) with explicit flag overrides into one JSON
// object; the library does all validation.
int assemble_config(const CLI::App& sub, const Options& o, std::string& out_text) {
  json j = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in) return usage_error("cannot read config file: " + o.config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
      return usage_error(o.config_path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) return usage_error(o.config_path + ": config must be a JSON object");
  }

  if (sub.count("--modes")) j["modes"] = o.modes;
  if (sub.count("--diag-modes")) j["diag_modes"] = o.diag_modes;
  if (sub.count("--chaos-order")) j["chaos_order"] = o.chaos_order;
  if (sub.count("--time")) {
    j["horizon"] = o.time;
    // A bare --time also moves the default reporting time.
    if (!sub.count("--t-report") && !j.contains("t_report")) j["t_report"] = {o.time};
  }
  if (sub.count("--t-report")) {
    std::vector<double> ts;
    if (!parse_double_list(o.t_report, ts)) return usage_error("--t-report expects t1,t2,...");
    j["t_report"] = ts;
  }
  if (sub.count("--x-grid")) {
    if (is_integer_literal(o.x_grid)) {
      j["x_grid"] = std::stoi(o.x_grid);
    } else {
      std::vector<double> xs;
      if (!parse_double_list(o.x_grid, xs)) {
        return usage_error("--x-grid expects a point count or x1,x2,...");
      }
      j["x_grid"] = xs;
    }
  }
  if (sub.count("--eps")) {
    std::vector<double> es;
    if (!parse_double_list(o.eps, es)) return usage_error("--eps expects e1,e2,...");
    j["eps"] = es;
  }
  if (sub.count("--seeds")) {
    std::vector<std::uint64_t> ss;
    if (!parse_seed_list(o.seeds, ss)) return usage_error("--seeds expects s1,s2,...");
    j["seeds"] = ss;
  }
  if (sub.count("--phi")) {
    if (o.phi == "sin" || o.phi == "bump") {
      j["phi"] = o.phi;
    } else {
      std::vector<double> cs;
      if (!parse_double_list(o.phi, cs)) {
        return usage_error("--phi expects sin, bump, or c1,c2,...");
      }
      j["phi"] = json{{"coeffs", cs}};
    }
  }
  if (sub.count("--steps")) j["steps"] = o.steps;
  if (sub.count("--gamma")) j["gamma"] = o.gamma;
  if (sub.count("--threads")) j["threads"] = o.threads;

  out_text = j.dump();
  return 0;
}

void add_common_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config_path, "JSON config file; flags override its fields");
  sub->add_option("--modes", o.modes, "Spectral truncation level K");
  sub->add_option("--diag-modes", o.diag_modes, "Base resolution of the correction tail sum");
  sub->add_option("--chaos-order", o.chaos_order, "Truncation order of the chaos series");
  sub->add_option("--time", o.time, "Time horizon");
  sub->add_option("--t-report", o.t_report, "Reporting times t1,t2,... (default: horizon)");
  sub->add_option("--x-grid", o.x_grid, "Interior point count or explicit x1,x2,...");
  sub->add_option("--eps", o.eps, "Intensity ladder e1,e2,... (strictly decreasing)");
  sub->add_option("--seeds", o.seeds, "Noise seeds s1,s2,...");
  sub->add_option("--phi", o.phi, "Initial condition: sin, bump, or coefficients c1,c2,...");
  sub->add_option("--steps", o.steps, "Integrator substeps per reporting interval");
  sub->add_option("--gamma", o.gamma, "Holder exponent for the norm diagnostic");
  sub->add_option("--format", o.format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out, "Output path, - for stdout");
  sub->add_option("--threads", o.threads, "Worker threads for per-seed runs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("Wick vs geometric solutions of the spectrally truncated "
                           "parabolic Anderson model (library ") +
               pamc_version() + ")"};
  app.require_subcommand(1);
  Options o;

  CLI::App* ladder = app.add_subcommand(
      "ladder", "Scaled solution gap across an intensity ladder, with slope fits");
  CLI::App* first_order = app.add_subcommand(
      "first-order", "Cross-check the three first-order computations against each other");
  CLI::App* k_convergence = app.add_subcommand(
      "k-convergence", "Geometric solution under spectral refinement K, 2K, 4K");
  CLI::App* correction = app.add_subcommand(
      "correction", "Second-order correction profile with tail extrapolation");
  for (CLI::App* sub : {ladder, first_order, k_convergence, correction}) {
    add_common_options(sub, o);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(PAMC_ERR_CONFIG);
  }

  CLI::App* sub = app.get_subcommands().front();
  std::string config_text;
  if (int rc = assemble_config(*sub, o, config_text); rc != 0) return rc;

  pamc_config* cfg = nullptr;
  if (pamc_status rc = pamc_config_parse(config_text.c_str(), &cfg); rc != PAMC_OK) {
    return fail(rc);
  }

  pamc_status (*run)(const pamc_config*, pamc_report**) = nullptr;
  if (sub == ladder) run = pamc_run_ladder;
  if (sub == first_order) run = pamc_run_first_order;
  if (sub == k_convergence) run = pamc_run_k_convergence;
  if (sub == correction) run = pamc_run_correction;

  pamc_report* rep = nullptr;
  if (pamc_status rc = run(cfg, &rep); rc != PAMC_OK) {
    pamc_config_free(cfg);
    return fail(rc);
  }

  if (pamc_status rc = pamc_report_write(rep, o.format.c_str(), o.out.c_str());
      rc != PAMC_OK) {
    pamc_report_free(rep);
    pamc_config_free(cfg);
    return fail(rc);
  }

  // When the report goes to a file, the digest goes to the terminal.
  if (o.out != "-") {
    char* summary = nullptr;
    if (pamc_report_summary(rep, &summary) == PAMC_OK) {
      std::cout << summary;
      pamc_string_free(summary);
    }
  }

  int failed_cells = 0;
  pamc_report_failed_cells(rep, &failed_cells);
  if (failed_cells > 0) {
    std::cerr << "warning: " << failed_cells << " cells failed; see the report\n";
  }

  pamc_report_free(rep);
  pamc_config_free(cfg);
  return failed_cells > 0 ? static_cast<int>(PAMC_ERR_NUMERIC) : 0;
}
