/* C interface to the factorial randomization-inference library.
 * Every call that can fail returns hfl_status; on failure hfl_last_error()
 * describes the problem for the calling thread. Paths equal to "-" mean stdout. */
#ifndef HFL_H
#define HFL_H

#include <stddef.h>

#if defined(_WIN32)
#define HFL_API __declspec(dllexport)
#elif defined(__GNUC__)
#define HFL_API __attribute__((visibility("default")))
#else
#define HFL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hfl_status {
  HFL_OK = 0,
  HFL_ERR_INVALID_ARGUMENT = 1,
  HFL_ERR_DIMENSION_MISMATCH = 2,
  HFL_ERR_UNAVAILABLE = 3,
  HFL_ERR_ACCEPTANCE_FAILURE = 4,
  HFL_ERR_TOO_LARGE = 5,
  HFL_ERR_EMPTY_EVENT = 6,
  HFL_ERR_IO = 7,
  HFL_ERR_CONFIG = 8,
  HFL_ERR_INTERNAL = 9
} hfl_status;

typedef enum hfl_estimator { HFL_THETA_A1 = 0, HFL_THETA_A2 = 1 } hfl_estimator;
typedef enum hfl_var_method { HFL_VAR_NEYMAN_I = 0, HFL_VAR_CONDITIONAL_II = 1, HFL_VAR_PLUGIN_II = 2 } hfl_var_method;
typedef enum hfl_situation { HFL_SITUATION_I = 1, HFL_SITUATION_II = 2 } hfl_situation;

HFL_API const char* hfl_last_error(void);
HFL_API const char* hfl_status_name(hfl_status status);

/* Potential-outcome table: N rows of four cells in order (-,-), (+,-), (-,+), (+,+). */
typedef struct hfl_table hfl_table;

HFL_API hfl_status hfl_table_create(const double* values, size_t n_units, hfl_table** out);
HFL_API hfl_status hfl_table_read_csv(const char* path, hfl_table** out);
HFL_API hfl_status hfl_table_write_csv(const hfl_table* table, const char* path);
HFL_API size_t hfl_table_size(const hfl_table* table);
HFL_API void hfl_table_destroy(hfl_table* table);

typedef struct hfl_estimands {
  double cell_means[4];
  double theta_a;
  double theta_ab;
  double theta_a_given_b[2]; /* [-1_B, +1_B] */
  double theta_b_given_a[2]; /* [-1_A, +1_A] */
} hfl_estimands;

HFL_API hfl_status hfl_table_estimands(const hfl_table* table, hfl_estimands* out);

typedef struct hfl_theory {
  double theta_a;
  double e_theta1;
  double bias_theta1;
  double var_theta1;
  double varest_bias_theta1;
  double e_theta2;
  double var_theta2; /* NaN when the arms cannot hold min_cell per cell */
  size_t min_cell;
} hfl_theory;

HFL_API hfl_status hfl_theory_moments(const hfl_table* table, size_t n_plus, double pi_b, size_t min_cell,
                                      hfl_theory* out);
/* Header plus one row of closed-form moments. */
HFL_API hfl_status hfl_theory_write_csv(const hfl_table* table, size_t n_plus, double pi_b, size_t min_cell,
                                        const char* path);

typedef struct hfl_exact_moments {
  double mean;
  double variance;
  double mean_varhat;        /* NaN when undefined */
  double mean_varhat_plugin; /* theta_A_2 with min_cell >= 2 only */
  size_t min_cell;
  double event_probability;
  size_t support_size;
} hfl_exact_moments;

HFL_API hfl_status hfl_oracle_theta1(const hfl_table* table, size_t n_plus, double pi_b, unsigned threads,
                                     hfl_exact_moments* out);
HFL_API hfl_status hfl_oracle_theta2(const hfl_table* table, size_t n_plus, double pi_b, size_t min_cell,
                                     unsigned threads, hfl_exact_moments* out);
HFL_API hfl_status hfl_oracle_coverage(const hfl_table* table, size_t n_plus, double pi_b, hfl_estimator estimator,
                                       size_t min_cell, double alpha, unsigned threads, double* out);
/* Header plus one row for theta_A_1 (unconditional) and one for theta_A_2 at min_cell. */
HFL_API hfl_status hfl_oracle_write_csv(const hfl_table* table, size_t n_plus, double pi_b, size_t min_cell,
                                        unsigned threads, const char* path);

typedef struct hfl_estimate_report {
  double point;
  double variance_estimate;
  double ci_low;
  double ci_high;
  double alpha;
} hfl_estimate_report;

/* w_b may be NULL for HFL_VAR_NEYMAN_I with HFL_THETA_A1 (B hidden).
 * design_n_plus and design_pi_b are read only by HFL_VAR_PLUGIN_II. */
HFL_API hfl_status hfl_estimate(const double* y, const unsigned char* w_a, const unsigned char* w_b, size_t n_units,
                                hfl_estimator estimator, hfl_var_method method, double alpha, double design_pi_b,
                                hfl_estimate_report* out);

/* Monte Carlo sweeps driven by a JSON config (one object or an array). */
typedef struct hfl_sweep hfl_sweep;

typedef struct hfl_sweep_row {
  const char* model; /* owned by the sweep */
  hfl_situation situation;
  double pi_b;
  double coverage;
  double mean_width;
  double mse;
  double rel_bias;
  double varest_rel_bias;
  double exact_bias;
  double exact_var;
  double acceptance_rate;
} hfl_sweep_row;

HFL_API hfl_status hfl_sweep_run_config_file(const char* path, unsigned threads, hfl_sweep** out);
HFL_API hfl_status hfl_sweep_run_config_json(const char* json, unsigned threads, hfl_sweep** out);
HFL_API hfl_status hfl_sweep_write_csv(const hfl_sweep* sweep, const char* path);
/* metric: coverage, mean_width, mse, rel_bias, varest_rel_bias, exact_bias, exact_var, acceptance_rate */
HFL_API hfl_status hfl_sweep_write_svg(const hfl_sweep* sweep, const char* metric, const char* path);
HFL_API size_t hfl_sweep_row_count(const hfl_sweep* sweep);
HFL_API hfl_status hfl_sweep_row_at(const hfl_sweep* sweep, size_t index, hfl_sweep_row* out);
HFL_API void hfl_sweep_destroy(hfl_sweep* sweep);

#ifdef __cplusplus
}
#endif

#endif
