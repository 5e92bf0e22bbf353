/* C API for the weingarten surface-reconstruction library.
 *
 * All functions that can fail return a wg_status; WG_OK (0) means success.
 * On failure, wg_last_error_message() returns a thread-local description
 * valid until the next failing call on the same thread. Objects returned
 * through out-parameters are owned by the caller and released with the
 * matching *_destroy function; strings returned through out-parameters are
 * released with wg_string_free.
 */
#ifndef WEINGARTEN_H
#define WEINGARTEN_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wg_status {
  WG_OK = 0,
  WG_GRID_TOO_SMALL = 1,
  WG_GRID_MISMATCH = 2,
  WG_TOO_FEW_SAMPLES = 3,
  WG_OUT_OF_DOMAIN = 4,
  WG_ORIENTATION_VIOLATION = 5,
  WG_STRONG_REGULARITY_VIOLATION = 6,
  WG_VANISHING_CURVATURE = 7,
  WG_BAD_INITIAL_FRAME = 8,
  WG_ADMISSIBILITY_FAILURE = 9,
  WG_DEGENERATE_ALIGNMENT = 10,
  WG_PAIR_DOMAIN_VIOLATION = 11,
  WG_DOMAIN_VIOLATION = 12,
  WG_NO_CONVERGENCE = 13,
  WG_LINE_SEARCH_FAILURE = 14,
  WG_CFL_VIOLATION = 15,
  WG_BLOW_UP = 16,
  WG_ZERO_GRADIENT = 17,
  WG_NON_MONOTONE = 18,
  WG_INVALID_BASE_POINT = 19,
  WG_DEGENERATE_CURVE = 20,
  WG_SMOOTHNESS_VIOLATION = 21,
  WG_CHARACTERISTIC_DEGENERATE = 22,
  WG_DEGENERATE_IMMERSION = 23,
  WG_EMPTY_MESH = 24,
  WG_UNKNOWN_KEY = 25,
  WG_TYPE_MISMATCH = 26,
  WG_MISSING_REQUIRED = 27,
  WG_IO = 28,
  WG_INVALID_ARGUMENT = 29,
  WG_INTERNAL = 30
} wg_status;

/* Stable name of a status value ("Ok", "EmptyMesh", ...). */
const char* wg_status_name(wg_status s);

/* Thread-local message describing the most recent failure on this thread. */
const char* wg_last_error_message(void);

/* Opaque handles. */
typedef struct wg_field wg_field;
typedef struct wg_mask wg_mask;
typedef struct wg_quadruple wg_quadruple;
typedef struct wg_surface wg_surface;

/* --- scalar fields on a uniform grid ----------------------------------- */

/* values: nu*nv doubles, row-major with index j*nu + i (NULL for zeros). */
wg_status wg_field_create(int nu, int nv, double u0, double v0, double du,
                          double dv, const double* values, wg_field** out);
wg_status wg_field_read(const char* path, wg_field** out);
wg_status wg_field_write(const wg_field* f, const char* path);
wg_status wg_field_dims(const wg_field* f, int* nu, int* nv, double* u0,
                        double* v0, double* du, double* dv);
/* Copies all nu*nv values; buffer_len must be at least nu*nv. */
wg_status wg_field_values(const wg_field* f, double* buffer,
                          size_t buffer_len);
void wg_field_destroy(wg_field* f);

/* --- node masks --------------------------------------------------------- */

/* on: nu*nv flags row-major (zero = excluded), NULL for all-on. */
wg_status wg_mask_create(int nu, int nv, double u0, double v0, double du,
                         double dv, const unsigned char* on, wg_mask** out);
wg_status wg_mask_read(const char* path, wg_mask** out);
wg_status wg_mask_write(const wg_mask* m, const char* path);
wg_status wg_mask_count(const wg_mask* m, size_t* nodes_on);
void wg_mask_destroy(wg_mask* m);

/* --- invariant quadruples ----------------------------------------------- */

/* All four fields must share one grid; mask NULL means every node valid. */
wg_status wg_quadruple_create(const wg_field* nu1, const wg_field* nu2,
                              const wg_field* g1, const wg_field* g2,
                              const wg_mask* mask, wg_quadruple** out);
/* Reads/writes <base>.nu1 .nu2 .g1 .g2 .mask. */
wg_status wg_quadruple_read(const char* base_path, wg_quadruple** out);
wg_status wg_quadruple_write(const wg_quadruple* q, const char* base_path);
void wg_quadruple_destroy(wg_quadruple* q);

/* Nodes where (nu1 - nu2) gamma1 gamma2 != 0 and nu1 - nu2 > 0. */
wg_status wg_strong_regularity_mask(const wg_quadruple* q, double tol,
                                    wg_mask** out);

/* Compatibility gate. tol <= 0 selects the default 10*max(du,dv)^2.
 * On success *pass is 1/0; when it is 0 and failed_condition is non-NULL,
 * *failed_condition names the first failed condition (wg_string_free). */
wg_status wg_quadruple_admissible(const wg_quadruple* q, double tol,
                                  int* pass, char** failed_condition);

/* --- reconstruction ------------------------------------------------------ */

/* frame9: initial frame rows (X, Y, l), row-major, NULL for identity.
 * x0: initial position (3 doubles), NULL for the origin. The surface is
 * built on the largest strongly regular rectangle of the input. */
wg_status wg_reconstruct(const wg_quadruple* q, const double* frame9,
                         const double* x0, wg_surface** out);
wg_status wg_surface_dims(const wg_surface* s, int* nu, int* nv);
/* Copies nu*nv node positions as x y z triples; len >= 3*nu*nv. */
wg_status wg_surface_positions(const wg_surface* s, double* xyz, size_t len);
wg_status wg_surface_write_obj(const wg_surface* s, const char* path);
/* Any output pointer may be NULL. */
wg_status wg_surface_diagnostics(const wg_surface* s,
                                 double* integrability_max,
                                 double* loop_defect, double* ortho_drift,
                                 double* det_drift, double* sweep_difference);
void wg_surface_destroy(wg_surface* s);

/* --- rigid alignment ----------------------------------------------------- */

/* Least-squares proper motion q ~ R p + t over n_points >= 3 points given
 * as x y z triples; rotation9 (row-major), translation3 and rms may each be
 * NULL when not wanted. */
wg_status wg_rigid_align(const double* p_xyz, const double* q_xyz,
                         size_t n_points, double* rotation9,
                         double* translation3, double* rms);

/* --- config-driven runs (the CLI entry point) ---------------------------- */

/* Executes one subcommand (fixture | analyze | solve-pde | reparam |
 * reconstruct | gamma) with the given config file, writing artifacts and
 * <command>_report.json into out_dir (NULL or "" for the current
 * directory). Returns the process exit code: 0 complete and all verdicts
 * passed, 2 a verdict failed, 1 error (see wg_last_error_message). */
int wg_run_config(const char* command, const char* config_path,
                  const char* out_dir);

void wg_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* WEINGARTEN_H */
