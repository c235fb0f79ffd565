// Copyright 2026 The vbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VBQC_VBQC_H
#define VBQC_VBQC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VBQC_API __declspec(dllexport)
#else
#define VBQC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure a message describing the
 * error is available from vbqc_last_error() on the same thread. */
typedef enum vbqc_status {
    VBQC_OK = 0,
    VBQC_ERR_INPUT = 1,
    VBQC_ERR_CAPACITY = 2,
    VBQC_ERR_PROTOCOL_ORDER = 3,
    VBQC_ERR_DOMAIN = 4,
    VBQC_ERR_INFEASIBLE = 5,
    VBQC_ERR_FRAMING = 6,
    VBQC_ERR_VERSION = 7,
    VBQC_ERR_SESSION = 8,
    VBQC_ERR_SCRIPT = 9,
    VBQC_ERR_UNSUPPORTED_MODEL = 10,
    VBQC_ERR_IO = 11,
    VBQC_ERR_PARSE = 12,
    VBQC_ERR_NULL_ARGUMENT = 13,
    VBQC_ERR_INTERNAL = 100
} vbqc_status;

VBQC_API const char *vbqc_version(void);
VBQC_API const char *vbqc_status_name(vbqc_status status);
/* Message of the last failed call on this thread; "" after a success. */
VBQC_API const char *vbqc_last_error(void);
/* Frees any char* returned through an out-parameter. */
VBQC_API void vbqc_string_free(char *s);

/* ---- patterns ---- */

typedef struct vbqc_pattern vbqc_pattern;

/* name: identity | wire | line | rotation (angle index `k`, ignored otherwise). */
VBQC_API vbqc_status vbqc_pattern_builtin(const char *name, int k, vbqc_pattern **out);
VBQC_API vbqc_status vbqc_pattern_parse(const char *text, vbqc_pattern **out);
VBQC_API vbqc_status vbqc_pattern_load(const char *path, vbqc_pattern **out);
VBQC_API void vbqc_pattern_free(vbqc_pattern *pattern);
VBQC_API size_t vbqc_pattern_vertex_count(const vbqc_pattern *pattern);
VBQC_API size_t vbqc_pattern_colour_count(const vbqc_pattern *pattern);
/* Copy of `pattern` with measurement angles angles[v] * pi/4. */
VBQC_API vbqc_status vbqc_pattern_with_angles(const vbqc_pattern *pattern, const uint8_t *angles, size_t count,
                                              vbqc_pattern **out);
VBQC_API vbqc_status vbqc_pattern_format(const vbqc_pattern *pattern, char **out_text);
/* Greedy colouring of the pattern's graph plus validation of both it and the
 * stored colouring, as JSON {"k", "classes", "valid", "stored": {...}}. */
VBQC_API vbqc_status vbqc_pattern_colour(const vbqc_pattern *pattern, char **out_json);

/* ---- bounds ---- */

typedef struct vbqc_params {
    uint32_t d, t, w, k;
    double p, p_min, p_max;
} vbqc_params;

VBQC_API vbqc_status vbqc_threshold_region(uint32_t k, double p, double *lo, double *hi);

/* One point of the verifiability bound: JSON with eps_ver, its four log
 * terms and eps_sec. */
VBQC_API vbqc_status vbqc_bound_evaluate(double n, double delta, double tau, uint32_t k, double p, double phi,
                                         double eps1, double eps2, double eps3, char **out_json);

/* Minimised eps_ver and the composed eps_rej/eps_cor/eps_sec at omega
 * (NaN: w/t of `params`). */
VBQC_API vbqc_status vbqc_bound_minimize(const vbqc_params *params, double omega, char **out_json);

/* CSV sweep over `variable` ("n" or "omega") from `from` to `to` in `steps`
 * points (geometric for n, linear for omega); other quantities from `shape`. */
VBQC_API vbqc_status vbqc_bound_sweep(const vbqc_params *shape, const char *variable, double from, double to,
                                      uint32_t steps, char **out_csv);

/* Smallest n reaching both targets with delta, tau, omega from `shape`. */
VBQC_API vbqc_status vbqc_tune_n(const vbqc_params *shape, double target_sec, double target_cor, double p_max,
                                 char **out_json);

/* ---- experiments ---- */

typedef struct vbqc_experiment vbqc_experiment;
typedef struct vbqc_report vbqc_report;

typedef enum vbqc_transport { VBQC_TRANSPORT_INPROC = 0, VBQC_TRANSPORT_TCP = 1 } vbqc_transport;

VBQC_API vbqc_status vbqc_experiment_parse(const char *text, const char *base_dir, vbqc_experiment **out);
VBQC_API vbqc_status vbqc_experiment_load(const char *path, vbqc_experiment **out);
VBQC_API void vbqc_experiment_free(vbqc_experiment *experiment);
VBQC_API vbqc_status vbqc_experiment_set_seed(vbqc_experiment *experiment, uint64_t seed);
VBQC_API vbqc_status vbqc_experiment_set_trials(vbqc_experiment *experiment, uint64_t trials);
VBQC_API vbqc_status vbqc_experiment_set_threads(vbqc_experiment *experiment, unsigned threads);
/* address: "host:port" for TCP, or NULL/"" for a loopback server in-process. */
VBQC_API vbqc_status vbqc_experiment_set_transport(vbqc_experiment *experiment, vbqc_transport transport,
                                                   const char *address);

VBQC_API vbqc_status vbqc_experiment_run(const vbqc_experiment *experiment, vbqc_report **out);

typedef void (*vbqc_ready_fn)(uint16_t port, void *user);
/* Serves the experiment's sessions over TCP on 127.0.0.1:port (0 = any). */
VBQC_API vbqc_status vbqc_experiment_serve(const vbqc_experiment *experiment, uint16_t port, vbqc_ready_fn ready,
                                           void *user);

typedef struct vbqc_counts {
    uint64_t trials, accepted, accepted_but_wrong, aborted;
    uint64_t test_rounds, failed_test_rounds;
} vbqc_counts;

VBQC_API void vbqc_report_free(vbqc_report *report);
VBQC_API vbqc_status vbqc_report_counts(const vbqc_report *report, vbqc_counts *out);
/* 1 if any bound comparison is a VIOLATION, 0 otherwise. */
VBQC_API int vbqc_report_violation(const vbqc_report *report);
/* 1 if an honest noiseless run aborted or accepted a wrong output. */
VBQC_API int vbqc_report_anomaly(const vbqc_report *report);
VBQC_API vbqc_status vbqc_report_json(const vbqc_report *report, char **out_json);
VBQC_API vbqc_status vbqc_report_csv(const vbqc_report *report, char **out_csv);
VBQC_API vbqc_status vbqc_report_summary(const vbqc_report *report, char **out_text);
/* Writes report, CSV and capture files named by the experiment. */
VBQC_API vbqc_status vbqc_report_write(const vbqc_report *report, const vbqc_experiment *experiment);

/* ---- exact enumeration ---- */

typedef struct vbqc_distribution vbqc_distribution;

typedef enum vbqc_round_kind { VBQC_ROUND_COMPUTATION = 0, VBQC_ROUND_TEST = 1 } vbqc_round_kind;

/* deviation: threat-file "on" lines with fixed vertices (may be NULL).
 * trap_colour < 0 averages over colours. */
VBQC_API vbqc_status vbqc_enumerate(const vbqc_pattern *pattern, vbqc_round_kind kind, const uint8_t *input_bits,
                                    size_t input_count, const char *deviation, int trap_colour,
                                    vbqc_distribution **out);
VBQC_API void vbqc_distribution_free(vbqc_distribution *distribution);
VBQC_API vbqc_status vbqc_distribution_json(const vbqc_distribution *distribution, char **out_json);
/* Total variation distance between the delta marginals, exact ("a + b*sqrt2")
 * and as a double. Either out-parameter may be NULL. */
VBQC_API vbqc_status vbqc_distribution_tv(const vbqc_distribution *a, const vbqc_distribution *b, char **out_exact,
                                          double *out_value);

/* ---- replay ---- */

/* Rebuilds the server view from a wire log and re-verifies against the
 * client view. *matches is 1 when the verdict (and server view, if given)
 * reproduce byte for byte. */
VBQC_API vbqc_status vbqc_replay(const char *wire_log, const char *client_view, const char *server_view,
                                 int *matches, char **out_json);

#ifdef __cplusplus
}
#endif

#endif
