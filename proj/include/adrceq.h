/* adrceq — controller synthesis and closed-loop simulation library.
 *
 * C API over opaque handles. Every function returns an adrceq_status; on
 * failure adrceq_last_error() gives a thread-local message. Out-parameters
 * are written only on ADRCEQ_OK. Handles are freed with their matching
 * _free function; passing NULL to a _free function is a no-op.
 *
 * Thread safety: handles are immutable after creation except
 * adrceq_discrete (stateful stepper) and adrceq_audit (appending log);
 * use one of those per thread.
 */
#ifndef ADRCEQ_H
#define ADRCEQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADRCEQ_API __declspec(dllexport)
#else
#define ADRCEQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum adrceq_status {
    ADRCEQ_OK = 0,
    ADRCEQ_ERR_INVALID_ARGUMENT = 1,
    ADRCEQ_ERR_DOMAIN_MISMATCH = 2,
    ADRCEQ_ERR_ALGEBRAIC_LOOP = 3,
    ADRCEQ_ERR_ZERO_NUMERATOR = 4,
    ADRCEQ_ERR_HAS_DELAY = 5,
    ADRCEQ_ERR_NYQUIST_EXCEEDED = 6,
    ADRCEQ_ERR_INDETERMINATE = 7,
    ADRCEQ_ERR_UNSUPPORTED_ORDER = 8,
    ADRCEQ_ERR_IMPROPER_RESULT = 9,
    ADRCEQ_ERR_WRONG_FILTER_KIND = 10,
    ADRCEQ_ERR_OVERFLOW = 11,
    ADRCEQ_ERR_UNSTABLE_EVALUATION = 12,
    ADRCEQ_ERR_NONFINITE_STATE = 13,
    ADRCEQ_ERR_EMPTY_TRACE = 14,
    ADRCEQ_ERR_DUPLICATE_LABEL = 15,
    ADRCEQ_ERR_CONFIG = 16,
    ADRCEQ_ERR_INTERNAL = 17
} adrceq_status;

ADRCEQ_API const char* adrceq_last_error(void);
ADRCEQ_API const char* adrceq_version(void);

/* ------------------------------------------------------------------ *
 * Transfer functions. Coefficients are ascending-degree arrays.
 * ------------------------------------------------------------------ */
typedef struct adrceq_tf adrceq_tf;

ADRCEQ_API adrceq_status adrceq_tf_create_continuous(const double* num, size_t num_len,
                                                     const double* den, size_t den_len,
                                                     double delay_s, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_tf_create_discrete(const double* num, size_t num_len,
                                                   const double* den, size_t den_len,
                                                   double ts_s, adrceq_tf** out);
ADRCEQ_API void adrceq_tf_free(adrceq_tf* tf);
ADRCEQ_API adrceq_status adrceq_tf_clone(const adrceq_tf* tf, adrceq_tf** out);

/* Query: writes the coefficient count to *len; copies up to cap values. */
ADRCEQ_API adrceq_status adrceq_tf_num(const adrceq_tf* tf, double* buf, size_t cap, size_t* len);
ADRCEQ_API adrceq_status adrceq_tf_den(const adrceq_tf* tf, double* buf, size_t cap, size_t* len);
ADRCEQ_API adrceq_status adrceq_tf_delay(const adrceq_tf* tf, double* delay_s);
ADRCEQ_API adrceq_status adrceq_tf_sample_time(const adrceq_tf* tf, double* ts_s);

ADRCEQ_API adrceq_status adrceq_tf_series(const adrceq_tf* g, const adrceq_tf* h, adrceq_tf** out);
/* g/(1+g*h); fails with ADRCEQ_ERR_HAS_DELAY when g carries a transport
 * delay (the closed loop is not rational then; use adrceq_channel_*). */
ADRCEQ_API adrceq_status adrceq_tf_feedback(const adrceq_tf* g, const adrceq_tf* h,
                                            adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_tf_inverse(const adrceq_tf* g, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_tf_freq_eval(const adrceq_tf* g, const double* omegas, size_t n,
                                             double* re, double* im);
/* *is_inf is set when the gain diverges at DC (s=0 or z=1). */
ADRCEQ_API adrceq_status adrceq_tf_dc_gain(const adrceq_tf* g, double* value, int* is_inf);
ADRCEQ_API adrceq_status adrceq_tf_to_string(const adrceq_tf* g, char* buf, size_t cap,
                                             size_t* len);

/* ------------------------------------------------------------------ *
 * Controller synthesis.
 * ------------------------------------------------------------------ */
typedef struct adrceq_gains {
    int n;       /* plant order, 1 or 2 */
    double k[2]; /* controller gains k_1..k_n */
    double l[3]; /* observer gains l_1..l_{n+1} */
    double b0;   /* input-gain estimate */
} adrceq_gains;

typedef enum adrceq_filter_kind {
    ADRCEQ_FILTER_UNITY = 0,
    ADRCEQ_FILTER_FIRST_ORDER = 1,
    ADRCEQ_FILTER_SECOND_ORDER = 2
} adrceq_filter_kind;

typedef struct adrceq_filter {
    adrceq_filter_kind kind;
    double T;  /* first order */
    double a2; /* second order */
    double a1;
} adrceq_filter;

typedef struct adrceq_pid {
    double kp, ki, kd;
    double beta;
    adrceq_filter fy;
    adrceq_filter fr;
} adrceq_pid;

ADRCEQ_API adrceq_status adrceq_bandwidth_tune(int n, double omega_cl_rad_s, double k_eso,
                                               double b0, adrceq_gains* out);
ADRCEQ_API adrceq_status adrceq_pid_from_adrc(const adrceq_gains* g, adrceq_pid* out);
ADRCEQ_API adrceq_status adrceq_build_pid_fb(const adrceq_pid* p, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_build_pid_pf(const adrceq_pid* p, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_build_eadrc_fb(const adrceq_gains* g, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_build_eadrc_fb_general(const adrceq_gains* g, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_build_ceq(const adrceq_gains* g, const adrceq_filter* fy,
                                          adrceq_tf** out);

typedef enum adrceq_controller_kind {
    ADRCEQ_CONTROLLER_PI = 0,
    ADRCEQ_CONTROLLER_PID = 1,
    ADRCEQ_CONTROLLER_EADRC = 2
} adrceq_controller_kind;

typedef struct adrceq_controller adrceq_controller; /* prefilter/feedback pair */

ADRCEQ_API adrceq_status adrceq_make_controller(adrceq_controller_kind kind, int dof,
                                                const adrceq_gains* gains_or_null,
                                                const adrceq_pid* pid_or_null,
                                                adrceq_controller** out);
ADRCEQ_API void adrceq_controller_free(adrceq_controller* c);
ADRCEQ_API adrceq_status adrceq_controller_prefilter(const adrceq_controller* c, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_controller_feedback(const adrceq_controller* c, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_controller_label(const adrceq_controller* c, char* buf, size_t cap,
                                                 size_t* len);

/* Column-aligned text table / JSON document of all four structures for the
 * given order. The returned string is heap-allocated; release with
 * adrceq_string_free. */
ADRCEQ_API adrceq_status adrceq_crib_sheet_text(const adrceq_gains* g, const adrceq_pid* pid,
                                                char** out);
ADRCEQ_API adrceq_status adrceq_crib_sheet_json(const adrceq_gains* g, const adrceq_pid* pid,
                                                char** out);
ADRCEQ_API void adrceq_string_free(char* s);

/* ------------------------------------------------------------------ *
 * Frequency-domain analysis.
 * ------------------------------------------------------------------ */
typedef struct adrceq_response adrceq_response; /* labeled frequency evaluable */

typedef enum adrceq_channel_kind {
    ADRCEQ_CHANNEL_YD = 0, /* disturbance -> output */
    ADRCEQ_CHANNEL_UN = 1, /* measurement noise -> control */
    ADRCEQ_CHANNEL_ER = 2  /* reference -> tracking error */
} adrceq_channel_kind;

ADRCEQ_API adrceq_status adrceq_response_from_tf(const char* label, const adrceq_tf* tf,
                                                 adrceq_response** out);
ADRCEQ_API adrceq_status adrceq_response_from_channel(const char* label, const adrceq_tf* plant,
                                                      const adrceq_controller* controller,
                                                      adrceq_channel_kind kind,
                                                      adrceq_response** out);
ADRCEQ_API void adrceq_response_free(adrceq_response* r);
ADRCEQ_API adrceq_status adrceq_response_eval(const adrceq_response* r, const double* omegas,
                                              size_t n, double* re, double* im);

/* Peak of |1/(1+C_FB G_P)| over [lo, hi] rad/s with local refinement. */
ADRCEQ_API adrceq_status adrceq_ms_index(const adrceq_tf* plant, const adrceq_controller* controller,
                                         double lo_rad_s, double hi_rad_s, double* ms,
                                         double* omega_peak);

/* CSV dataset: header omega_rad_s,<label>_mag_db,<label>_phase_deg,... */
ADRCEQ_API adrceq_status adrceq_bode_csv(const adrceq_response* const* responses, size_t n,
                                         double lo_rad_s, double hi_rad_s, int n_points,
                                         char** out_csv);

/* ------------------------------------------------------------------ *
 * Discretization.
 * ------------------------------------------------------------------ */
typedef struct adrceq_discrete adrceq_discrete; /* stateful stepper */
typedef struct adrceq_audit adrceq_audit;       /* verbatim-vs-oracle log */

ADRCEQ_API adrceq_status adrceq_audit_create(adrceq_audit** out);
ADRCEQ_API void adrceq_audit_free(adrceq_audit* a);
ADRCEQ_API adrceq_status adrceq_audit_text(const adrceq_audit* a, char** out);
ADRCEQ_API adrceq_status adrceq_audit_write_file(const adrceq_audit* a, const char* path);

ADRCEQ_API adrceq_status adrceq_euler_discretize(const adrceq_tf* g, double ts_s, adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_discrete_from_tf(const adrceq_tf* tf, adrceq_discrete** out);
ADRCEQ_API adrceq_status adrceq_pid_z(const adrceq_pid* p, double ts_s, adrceq_audit* audit_or_null,
                                      adrceq_discrete** out);
ADRCEQ_API adrceq_status adrceq_eadrc_fb_z(const adrceq_gains* g, double ts_s,
                                           adrceq_audit* audit_or_null, adrceq_discrete** out);
ADRCEQ_API adrceq_status adrceq_ceq2_z(const adrceq_gains* g, double tf_s, double ts_s,
                                       adrceq_audit* audit_or_null, adrceq_discrete** out);
ADRCEQ_API adrceq_status adrceq_eadrc_pf_z(const adrceq_gains* g, const adrceq_pid* pid,
                                           double beta, double tr_s, double ts_s,
                                           adrceq_audit* audit_or_null, adrceq_discrete** out);
ADRCEQ_API void adrceq_discrete_free(adrceq_discrete* d);
ADRCEQ_API adrceq_status adrceq_discrete_step(adrceq_discrete* d, double input, double* output);
ADRCEQ_API adrceq_status adrceq_discrete_reset(adrceq_discrete* d);
ADRCEQ_API adrceq_status adrceq_discrete_tf(const adrceq_discrete* d, adrceq_tf** out);
/* 64-bit fixed point with frac_bits in [8, 56]; fails with
 * ADRCEQ_ERR_OVERFLOW if a coefficient saturates. */
ADRCEQ_API adrceq_status adrceq_quantize(const adrceq_discrete* d, int frac_bits,
                                         adrceq_discrete** out);

/* ------------------------------------------------------------------ *
 * Closed-loop simulation.
 * ------------------------------------------------------------------ */
typedef struct adrceq_scenario adrceq_scenario;
typedef struct adrceq_trace adrceq_trace;

typedef enum adrceq_scn1_variant {
    ADRCEQ_SCN1_PID = 0,
    ADRCEQ_SCN1_EADRC = 1,
    ADRCEQ_SCN1_PID_PLUS_CEQ2 = 2
} adrceq_scn1_variant;

typedef enum adrceq_scn2_variant {
    ADRCEQ_SCN2_EADRC_1DOF = 0,
    ADRCEQ_SCN2_EADRC_2DOF = 1
} adrceq_scn2_variant;

ADRCEQ_API adrceq_status adrceq_scenario_one(adrceq_scn1_variant variant, double tf_s,
                                             uint64_t seed, adrceq_scenario** out);
ADRCEQ_API adrceq_status adrceq_scenario_two(adrceq_scn2_variant variant, double tr_s,
                                             uint64_t seed, adrceq_scenario** out);
/* Step-reference transient benches on the two generic plants.
 * kind: 0 = PI/PID, 1 = error-driven. */
ADRCEQ_API adrceq_status adrceq_scenario_transient(int n, int kind, int dof, double beta,
                                                   uint64_t seed, adrceq_scenario** out);
ADRCEQ_API void adrceq_scenario_free(adrceq_scenario* s);
ADRCEQ_API adrceq_status adrceq_scenario_set_t_end(adrceq_scenario* s, double t_end_s);
ADRCEQ_API adrceq_status adrceq_scenario_set_substeps(adrceq_scenario* s, int substeps);
ADRCEQ_API adrceq_status adrceq_scenario_set_noise_enabled(adrceq_scenario* s, int enabled);
ADRCEQ_API adrceq_status adrceq_scenario_set_seed(adrceq_scenario* s, uint64_t seed);
ADRCEQ_API adrceq_status adrceq_scenario_clear_disturbance(adrceq_scenario* s);
ADRCEQ_API adrceq_status adrceq_scenario_add_step_disturbance(adrceq_scenario* s, double t_s,
                                                              double level);
ADRCEQ_API adrceq_status adrceq_scenario_add_sine_disturbance(adrceq_scenario* s, double t_s,
                                                              double amp, double freq_hz);
ADRCEQ_API adrceq_status adrceq_scenario_label(const adrceq_scenario* s, char* buf, size_t cap,
                                               size_t* len);
/* Disturbance-free reference-tracking phase of the scenario, for metrics. */
ADRCEQ_API adrceq_status adrceq_scenario_reference_window(const adrceq_scenario* s, double* t0_s,
                                                          double* t1_s);
/* Verbatim-vs-oracle records from the discrete builders this scenario used;
 * empty string when none apply. Release with adrceq_string_free. */
ADRCEQ_API adrceq_status adrceq_scenario_audit_text(const adrceq_scenario* s, char** out);

ADRCEQ_API adrceq_status adrceq_run(const adrceq_scenario* s, adrceq_trace** out);
ADRCEQ_API void adrceq_trace_free(adrceq_trace* t);
ADRCEQ_API adrceq_status adrceq_trace_len(const adrceq_trace* t, size_t* len);

typedef enum adrceq_trace_col {
    ADRCEQ_COL_T = 0,
    ADRCEQ_COL_R = 1,
    ADRCEQ_COL_Y = 2,
    ADRCEQ_COL_Y_MEAS = 3,
    ADRCEQ_COL_U = 4,
    ADRCEQ_COL_E = 5,
    ADRCEQ_COL_D = 6
} adrceq_trace_col;

ADRCEQ_API adrceq_status adrceq_trace_col_copy(const adrceq_trace* t, adrceq_trace_col col,
                                               double* buf, size_t cap, size_t* len);
ADRCEQ_API adrceq_status adrceq_trace_csv(const adrceq_trace* t, char** out);
ADRCEQ_API adrceq_status adrceq_trace_svg(const adrceq_trace* t, const char* title, char** out);

typedef struct adrceq_metrics {
    double iae;
    double overshoot_pct;
    double u_peak;
    double steady_state_error;
    double rise_time_s;
} adrceq_metrics;

ADRCEQ_API adrceq_status adrceq_compute_metrics(const adrceq_trace* t, double window_t0_s,
                                                double window_t1_s, adrceq_metrics* out);

/* Generic plants used by the analysis presets. */
ADRCEQ_API adrceq_status adrceq_plant_gp1(adrceq_tf** out);
ADRCEQ_API adrceq_status adrceq_plant_gp2(adrceq_tf** out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ADRCEQ_H */
