/* Copyright 2026 The srlasso Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the srlasso library. Objects are opaque handles released
 * with the matching *_free function. Every call returns a status code; the
 * message of the last failure on the calling thread is kept by
 * srl_last_error().
 */

#ifndef SRLASSO_SRLASSO_H_
#define SRLASSO_SRLASSO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SRLASSO_BUILDING_LIBRARY)
#define SRL_API __attribute__((visibility("default")))
#else
#define SRL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srl_status {
  SRL_OK = 0,
  SRL_INVALID_PARAM = 1,
  SRL_DIM_MISMATCH = 2,
  SRL_ZERO_GROUP = 3,
  SRL_DEGENERATE_DERIVATIVE = 4,
  SRL_NOT_CONVERGED = 5,
  SRL_OFF_GRID_TOO_FAR = 6,
  SRL_SINGULAR_GRAM = 7,
  SRL_DEGENERATE_SIGN = 8,
  SRL_DIM_UNSUPPORTED = 9,
  SRL_SPEC_PARSE = 10,
  SRL_IO = 11,
  SRL_INTERNAL = 99
} srl_status;

typedef struct srl_operator srl_operator;
typedef struct srl_design srl_design;
typedef struct srl_solution srl_solution;

SRL_API const char* srl_version(void);
SRL_API const char* srl_last_error(void);
SRL_API const char* srl_status_name(srl_status status);

/* Operators. */
SRL_API srl_status srl_operator_fourier(int fc, srl_operator** out);
/* point_spread != 0 selects exp(-u^2 / (2 sigma^2)), else exp(-u^2 / sigma^2). */
SRL_API srl_status srl_operator_gaussian(double sigma, const double* samples, size_t n_samples,
                                         int point_spread, srl_operator** out);
SRL_API srl_status srl_operator_gauss_laplace(double sigma, const double* lateral,
                                              size_t n_lateral, const double* depth,
                                              size_t n_depth, srl_operator** out);
SRL_API void srl_operator_free(srl_operator* op);
SRL_API int srl_operator_dims(const srl_operator* op);
SRL_API int srl_operator_measurement_dim(const srl_operator* op);
/* out receives measurement_dim values. */
SRL_API srl_status srl_operator_feature(const srl_operator* op, const double* x, double* out);
/* Atoms are given as n positions (row-major n x dims) and n amplitudes. */
SRL_API srl_status srl_operator_forward(const srl_operator* op, const double* positions,
                                        const double* amplitudes, size_t n, double* out);

/* Super-resolved design on a regular grid; points, origin, extent and tau
 * hold one value per operator axis. */
SRL_API srl_status srl_design_build(const srl_operator* op, const int* points,
                                    const double* origin, const double* extent,
                                    const double* tau, srl_design** out);
SRL_API void srl_design_free(srl_design* design);
SRL_API int srl_design_num_groups(const srl_design* design);
SRL_API int srl_design_group_size(const srl_design* design);

/* Solves the grouped problem for data y (measurement_dim values). On
 * SRL_NOT_CONVERGED the best iterate is still returned through out. */
SRL_API srl_status srl_design_solve(const srl_design* design, const double* y, double lambda,
                                    int max_iters, double gap_tol, srl_solution** out);
SRL_API void srl_solution_free(srl_solution* sol);
SRL_API int srl_solution_iterations(const srl_solution* sol);
SRL_API double srl_solution_gap(const srl_solution* sol);
/* Copies the q*G coefficients. */
SRL_API srl_status srl_solution_coefficients(const srl_solution* sol, double* out, size_t n);
/* Recovered spikes: first call with positions = amplitudes = NULL to get the
 * count, then with buffers of count*dims and count values. */
SRL_API srl_status srl_solution_measure(const srl_solution* sol, double support_tol,
                                        double* positions, double* amplitudes, size_t* count);

/* Kernel distance between two measures in `dims` dimensions. */
SRL_API srl_status srl_mmd(int dims, const double* pos_a, const double* amp_a, size_t n_a,
                           const double* pos_b, const double* amp_b, size_t n_b, double* out);

/* Runs an experiment spec file and writes its artifacts into out_dir.
 * exit_code receives 0, or 2 when some cell did not converge. seed is used
 * only when use_seed is nonzero. */
SRL_API srl_status srl_experiment_run(const char* spec_path, const char* out_dir, int threads,
                                      int use_seed, uint64_t seed, int* exit_code);
SRL_API srl_status srl_certificate_run(const char* spec_path, const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* SRLASSO_SRLASSO_H_ */
