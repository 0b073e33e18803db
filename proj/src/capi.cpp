#include "pamcomp/pamcomp.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <string>

#include "harness.hpp"

struct pamc_config {
  pam::ExperimentConfig cfg;
};
struct pamc_report {
  pam::Report rep;
};
struct pamc_noise {
  pam::NoiseRealization nr;
};
struct pamc_table {
  pam::PropagatorTable table;
};

namespace {

thread_local std::string g_last_error;

pamc_status fail(pamc_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename F>
pamc_status guarded(F&& body) {
  try {
    return body();
  } catch (const pam::ConfigError& e) {
    return fail(PAMC_ERR_CONFIG, e.what());
  } catch (const pam::IoError& e) {
    return fail(PAMC_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(PAMC_ERR_CONFIG, e.what());
  } catch (const std::domain_error& e) {
    return fail(PAMC_ERR_CONFIG, e.what());
  } catch (const std::out_of_range& e) {
    return fail(PAMC_ERR_CONFIG, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PAMC_ERR_NUMERIC, "out of memory");
  } catch (const std::exception& e) {
    return fail(PAMC_ERR_NUMERIC, e.what());
  }
}

pamc_status require(bool ok, const char* what) {
  return ok ? PAMC_OK : fail(PAMC_ERR_CONFIG, what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* pamc_version(void) { return pam::kVersionString; }

const char* pamc_last_error(void) { return g_last_error.c_str(); }

void pamc_string_free(char* s) { std::free(s); }

pamc_status pamc_config_default(pamc_config** out) {
  if (require(out != nullptr, "null output pointer") != PAMC_OK) return PAMC_ERR_CONFIG;
  return guarded([&] {
    *out = new pamc_config{pam::ExperimentConfig::defaults()};
    return PAMC_OK;
  });
}

pamc_status pamc_config_parse(const char* json_text, pamc_config** out) {
  if (require(json_text != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    pam::ExperimentConfig cfg = pam::ExperimentConfig::from_json_text(json_text);
    cfg.validate();
    *out = new pamc_config{std::move(cfg)};
    return PAMC_OK;
  });
}

void pamc_config_free(pamc_config* cfg) { delete cfg; }

pamc_status pamc_config_to_json(const pamc_config* cfg, char** out) {
  if (require(cfg != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = dup_string(cfg->cfg.canonical_json());
    return PAMC_OK;
  });
}

pamc_status pamc_config_hash(const pamc_config* cfg, char** out) {
  if (require(cfg != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = dup_string(cfg->cfg.hash());
    return PAMC_OK;
  });
}

pamc_status pamc_config_set_threads(pamc_config* cfg, int threads) {
  if (require(cfg != nullptr, "null argument") != PAMC_OK) return PAMC_ERR_CONFIG;
  if (require(threads >= 1, "threads must be >= 1") != PAMC_OK) return PAMC_ERR_CONFIG;
  cfg->cfg.threads = threads;
  return PAMC_OK;
}

static pamc_status run_common(pam::Report (*run)(const pam::ExperimentConfig&),
                              const pamc_config* cfg, pamc_report** out) {
  if (require(cfg != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = new pamc_report{run(cfg->cfg)};
    return PAMC_OK;
  });
}

pamc_status pamc_run_ladder(const pamc_config* cfg, pamc_report** out) {
  return run_common(pam::run_ladder, cfg, out);
}

pamc_status pamc_run_first_order(const pamc_config* cfg, pamc_report** out) {
  return run_common(pam::run_first_order_check, cfg, out);
}

pamc_status pamc_run_k_convergence(const pamc_config* cfg, pamc_report** out) {
  return run_common(pam::run_k_convergence, cfg, out);
}

pamc_status pamc_run_correction(const pamc_config* cfg, pamc_report** out) {
  return run_common(pam::run_correction, cfg, out);
}

pamc_status pamc_report_to_string(const pamc_report* rep, const char* format,
                                  char** out) {
  if (require(rep != nullptr && format != nullptr && out != nullptr, "null argument") !=
      PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = dup_string(pam::report_to_string(rep->rep, format));
    return PAMC_OK;
  });
}

pamc_status pamc_report_write(const pamc_report* rep, const char* format,
                              const char* path) {
  if (require(rep != nullptr && format != nullptr && path != nullptr, "null argument") !=
      PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    pam::report_write(rep->rep, format, path);
    return PAMC_OK;
  });
}

pamc_status pamc_report_summary(const pamc_report* rep, char** out) {
  if (require(rep != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = dup_string(pam::report_summary(rep->rep));
    return PAMC_OK;
  });
}

pamc_status pamc_report_failed_cells(const pamc_report* rep, int* out) {
  if (require(rep != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  *out = rep->rep.failed_cells;
  return PAMC_OK;
}

void pamc_report_free(pamc_report* rep) { delete rep; }

pamc_status pamc_noise_sample(uint64_t seed, int modes, pamc_noise** out) {
  if (require(out != nullptr, "null output pointer") != PAMC_OK) return PAMC_ERR_CONFIG;
  return guarded([&] {
    *out = new pamc_noise{pam::sample(seed, modes)};
    return PAMC_OK;
  });
}

pamc_status pamc_noise_to_json(const pamc_noise* nr, char** out) {
  if (require(nr != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = dup_string(pam::noise_to_json(nr->nr));
    return PAMC_OK;
  });
}

pamc_status pamc_noise_coefficient(const pamc_noise* nr, int k, double* out) {
  if (require(nr != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  if (require(k >= 1 && k <= nr->nr.modes(), "mode index out of range") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  *out = nr->nr.xi[static_cast<std::size_t>(k - 1)];
  return PAMC_OK;
}

pamc_status pamc_noise_brownian_eval(const pamc_noise* nr, double x, double* out) {
  if (require(nr != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = pam::brownian_eval(nr->nr, x);
    return PAMC_OK;
  });
}

pamc_status pamc_noise_white_eval(const pamc_noise* nr, double x, double* out) {
  if (require(nr != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = pam::white_noise_eval(nr->nr, x);
    return PAMC_OK;
  });
}

void pamc_noise_free(pamc_noise* nr) { delete nr; }

pamc_status pamc_table_build(const pamc_config* cfg, pamc_table** out) {
  if (require(cfg != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    const pam::ExperimentConfig& c = cfg->cfg;
    c.validate();
    std::vector<double> grid = {0.0};
    grid.insert(grid.end(), c.t_report.begin(), c.t_report.end());
    *out = new pamc_table{pam::build_table(c.phi_field(c.modes), c.modes, c.chaos_order,
                                           grid, c.steps_per_interval)};
    return PAMC_OK;
  });
}

pamc_status pamc_table_to_json(const pamc_table* table, char** out) {
  if (require(table != nullptr && out != nullptr, "null argument") != PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = dup_string(pam::table_to_json(table->table));
    return PAMC_OK;
  });
}

void pamc_table_free(pamc_table* table) { delete table; }

pamc_status pamc_wick_eval(const pamc_table* table, const pamc_noise* nr, double eps,
                           double t, double x, double* out) {
  if (require(table != nullptr && nr != nullptr && out != nullptr, "null argument") !=
      PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    *out = pam::wick_solution(table->table, eps, t, nr->nr).field.eval(x);
    return PAMC_OK;
  });
}

pamc_status pamc_strat_eval(const pamc_config* cfg, const pamc_noise* nr, double eps,
                            double t, double x, double* out) {
  if (require(cfg != nullptr && nr != nullptr && out != nullptr, "null argument") !=
      PAMC_OK) {
    return PAMC_ERR_CONFIG;
  }
  return guarded([&] {
    const pam::ExperimentConfig& c = cfg->cfg;
    const pam::SpectralField phi = c.phi_field(c.modes);
    *out = pam::strat_solution(phi, nr->nr, eps, t).eval(x);
    return PAMC_OK;
  });
}

}  // extern "C"
