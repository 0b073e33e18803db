/* C interface to the parabolic Anderson comparison library.
 *
 * All functions return a pamc_status; on failure pamc_last_error() describes
 * the problem for the calling thread.  Objects returned through ** out
 * parameters are owned by the caller and released with the matching _free
 * function; strings returned through char** are released with
 * pamc_string_free.  Handles are not thread-safe individually, but distinct
 * handles may be used from distinct threads.
 */
#ifndef PAMCOMP_H
#define PAMCOMP_H

#include <stdint.h>

#if defined(_WIN32)
#if defined(PAMC_BUILD)
#define PAMC_API __declspec(dllexport)
#else
#define PAMC_API __declspec(dllimport)
#endif
#else
#define PAMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pamc_status {
  PAMC_OK = 0,
  PAMC_ERR_CONFIG = 2,  /* invalid configuration or argument */
  PAMC_ERR_NUMERIC = 3, /* numerical failure during a run */
  PAMC_ERR_IO = 4       /* filesystem failure */
} pamc_status;

typedef struct pamc_config pamc_config;
typedef struct pamc_report pamc_report;
typedef struct pamc_noise pamc_noise;
typedef struct pamc_table pamc_table;

PAMC_API const char* pamc_version(void);

/* Message from the most recent failing call on this thread; never NULL. */
PAMC_API const char* pamc_last_error(void);

PAMC_API void pamc_string_free(char* s);

/* -- configuration -------------------------------------------------------- */

PAMC_API pamc_status pamc_config_default(pamc_config** out);
PAMC_API pamc_status pamc_config_parse(const char* json_text, pamc_config** out);
PAMC_API void pamc_config_free(pamc_config* cfg);

/* Canonical JSON form (sorted keys, runtime knobs stripped). */
PAMC_API pamc_status pamc_config_to_json(const pamc_config* cfg, char** out);
PAMC_API pamc_status pamc_config_hash(const pamc_config* cfg, char** out);
PAMC_API pamc_status pamc_config_set_threads(pamc_config* cfg, int threads);

/* -- experiment runs ------------------------------------------------------ */

PAMC_API pamc_status pamc_run_ladder(const pamc_config* cfg, pamc_report** out);
PAMC_API pamc_status pamc_run_first_order(const pamc_config* cfg, pamc_report** out);
PAMC_API pamc_status pamc_run_k_convergence(const pamc_config* cfg, pamc_report** out);
PAMC_API pamc_status pamc_run_correction(const pamc_config* cfg, pamc_report** out);

/* format is "csv" or "json". */
PAMC_API pamc_status pamc_report_to_string(const pamc_report* rep, const char* format,
                                           char** out);

/* path "-" writes to stdout. */
PAMC_API pamc_status pamc_report_write(const pamc_report* rep, const char* format,
                                       const char* path);
PAMC_API pamc_status pamc_report_summary(const pamc_report* rep, char** out);
PAMC_API pamc_status pamc_report_failed_cells(const pamc_report* rep, int* out);
PAMC_API void pamc_report_free(pamc_report* rep);

/* -- noise realizations --------------------------------------------------- */

PAMC_API pamc_status pamc_noise_sample(uint64_t seed, int modes, pamc_noise** out);
PAMC_API pamc_status pamc_noise_to_json(const pamc_noise* nr, char** out);
PAMC_API pamc_status pamc_noise_coefficient(const pamc_noise* nr, int k, double* out);
PAMC_API pamc_status pamc_noise_brownian_eval(const pamc_noise* nr, double x, double* out);
PAMC_API pamc_status pamc_noise_white_eval(const pamc_noise* nr, double x, double* out);
PAMC_API void pamc_noise_free(pamc_noise* nr);

/* -- chaos propagator tables ---------------------------------------------- */

/* Builds the table for the config's initial condition on the grid
 * {0} + t_report, at the config's modes / chaos_order / steps. */
PAMC_API pamc_status pamc_table_build(const pamc_config* cfg, pamc_table** out);
PAMC_API pamc_status pamc_table_to_json(const pamc_table* table, char** out);
PAMC_API void pamc_table_free(pamc_table* table);

/* Point values of the two solutions for one realization.  For the chaos side
 * t must be a grid point of the table (a reporting time or 0); the geometric
 * side uses the config's modes and initial condition and any t >= 0. */
PAMC_API pamc_status pamc_wick_eval(const pamc_table* table, const pamc_noise* nr,
                                    double eps, double t, double x, double* out);
PAMC_API pamc_status pamc_strat_eval(const pamc_config* cfg, const pamc_noise* nr,
                                     double eps, double t, double x, double* out);

#ifdef __cplusplus
}
#endif

#endif /* PAMCOMP_H */
