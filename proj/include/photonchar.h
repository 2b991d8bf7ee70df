/* Copyright 2026 photonchar contributors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the photonchar shared library.
 *
 * Conventions:
 *  - Every fallible call returns pc_status; PC_OK is zero. On failure
 *    pc_last_error() returns a thread-local message.
 *  - Complex matrices travel as interleaved doubles, row major:
 *    re(0,0), im(0,0), re(0,1), ...  (2*dim*dim values).
 *  - Opaque handles are freed with their matching pc_*_free call; freeing
 *    NULL is a no-op.
 *  - Overlap parameters are passed as double[4]: x12, x13, x23,
 *    triad_phase. Full model parameters as double[8]: x12, x13, x23,
 *    triad_phase, t1, t2, t3, alpha.
 *  - Splitting-ratio conventions match the library: mesh ratios are
 *    cross-coupling probabilities, protocol ratios (pc_unitary_fig1,
 *    pc_unitary_cascade, pc_optimal_second_ratio) are straight-through
 *    probabilities.
 *  - All randomness is seeded and bit-reproducible across platforms.
 */

#ifndef PHOTONCHAR_H
#define PHOTONCHAR_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pc_status {
    PC_OK = 0,
    PC_ERR_INVALID_ARGUMENT = 1,
    PC_ERR_PHYSICS = 2,
    PC_ERR_LIMIT = 3,
    PC_ERR_CONVERGENCE = 4,
    PC_ERR_INTERNAL = 5
} pc_status;

const char* pc_status_name(pc_status status);

/* Thread-local message describing the most recent failure. */
const char* pc_last_error(void);

/* Worker threads for multi-start searches; results are independent of the
 * setting. */
void pc_set_max_threads(int n);

typedef struct pc_unitary pc_unitary;
typedef struct pc_smatrix pc_smatrix;
typedef struct pc_pmf pc_pmf;
typedef struct pc_counts pc_counts;
typedef struct pc_design pc_design;
typedef struct pc_design_result pc_design_result;
typedef struct pc_fim pc_fim;
typedef struct pc_fit_result pc_fit_result;

/* ---- canonical outcome enumeration ---- */

int64_t pc_outcome_count(int n_photons, int n_modes);
/* occupation_out must hold n_modes ints. */
pc_status pc_outcome_at(int n_photons, int n_modes, int64_t index, int* occupation_out);

/* ---- scattering matrices ---- */

pc_status pc_unitary_from_entries(int dim, const double* entries_reim, pc_unitary** out);
pc_status pc_unitary_mesh(int n_modes, const double* ratios, int n_ratios, const double* phases,
                          int n_phases, pc_unitary** out);
pc_status pc_unitary_fig1(double second_splitting_ratio, pc_unitary** out);
pc_status pc_unitary_cascade(int n_photons, const double* splitting_ratios, int n_ratios,
                             pc_unitary** out);
/* Second-layer couplers as (mode_a, mode_b) pairs with cross ratios. */
pc_status pc_unitary_layered(int n_photons, const int* pair_modes, const double* ratios,
                             int n_couplers, pc_unitary** out);
pc_status pc_unitary_permute_rows(const pc_unitary* u, const int* perm, int n, pc_unitary** out);
int pc_unitary_dim(const pc_unitary* u);
pc_status pc_unitary_entries(const pc_unitary* u, double* entries_reim_out);
pc_status pc_unitary_fidelity(const pc_unitary* target, const pc_unitary* set, double* out);
void pc_unitary_free(pc_unitary* u);

/* ---- distinguishability matrices ---- */

pc_status pc_smatrix_from_entries(int dim, const double* entries_reim, pc_smatrix** out);
pc_status pc_smatrix_from_overlaps(const double overlaps4[4], pc_smatrix** out);
int pc_smatrix_dim(const pc_smatrix* s);
pc_status pc_smatrix_entries(const pc_smatrix* s, double* entries_reim_out);
void pc_smatrix_free(pc_smatrix* s);

/* ---- output distributions ---- */

pc_status pc_pmf_compute(const pc_unitary* u, const int* input_occupation, int n_modes,
                         const pc_smatrix* s, pc_pmf** out);
/* Independent Fock-space evaluation of the same distribution. */
pc_status pc_pmf_compute_oracle(const pc_unitary* u, const int* input_occupation, int n_modes,
                                const pc_smatrix* s, pc_pmf** out);
int64_t pc_pmf_size(const pc_pmf* p);
int pc_pmf_n_modes(const pc_pmf* p);
int pc_pmf_n_photons(const pc_pmf* p);
pc_status pc_pmf_probabilities(const pc_pmf* p, double* out);
pc_status pc_pmf_tvd(const pc_pmf* p, const pc_pmf* q, double* out);
/* Bunched/anti-bunched masses of a two-photon pmf for the coupler on
 * modes (mode_a, mode_a + 1). out2 = {anti_bunched, bunched}. */
pc_status pc_pmf_coarse_grain(const pc_pmf* p, int mode_a, int mode_b, double out2[2]);
void pc_pmf_free(pc_pmf* p);

/* ---- sampling and counts ---- */

pc_status pc_pmf_sample(const pc_pmf* p, int64_t n_samples, uint64_t seed, pc_counts** out);
/* Chronological outcome indices; stream_out must hold n_samples ints. */
pc_status pc_pmf_sample_stream(const pc_pmf* p, int64_t n_samples, uint64_t seed, int* stream_out);
pc_status pc_counts_create(int n_photons, int n_modes, const int64_t* counts, int64_t n_outcomes,
                           pc_counts** out);
int64_t pc_counts_total(const pc_counts* c);
int64_t pc_counts_size(const pc_counts* c);
pc_status pc_counts_values(const pc_counts* c, int64_t* out);
pc_status pc_counts_tvd(const pc_counts* c, const pc_pmf* model, double* out);
void pc_counts_free(pc_counts* c);

/* ---- experiment designs ---- */

/* Configurations describe a 3-mode mesh (3 cross ratios + 1 phase), a
 * single-occupancy input, and the photon routing permutation. */
pc_status pc_design_create(int n_configs, pc_design** out);
pc_status pc_design_set_config(pc_design* d, int index, const double* ratios, int n_ratios,
                               const double* phases, int n_phases, const int* input, int n_modes,
                               const int* permutation, int n_photons, double weight);
int pc_design_n_configs(const pc_design* d);
pc_status pc_design_get_config(const pc_design* d, int index, double* ratios_out,
                               double* phases_out, int* input_out, int* permutation_out,
                               double* weight_out);
/* The scattering matrix realized by configuration `index` (mesh with its
 * input permutation applied). */
pc_status pc_design_config_unitary(const pc_design* d, int index, pc_unitary** out);
/* Model pmf of configuration `index` under the 8-parameter model. */
pc_status pc_design_config_pmf(const pc_design* d, int index, const double params8[8],
                               pc_pmf** out);
void pc_design_free(pc_design* d);

/* Three permuted instances of the protocol circuit, equally weighted. */
pc_status pc_design_permuted_fig1(double second_splitting_ratio, pc_design** out);

/* ---- Fisher information ---- */

/* method: 0 = hessian form, 1 = score form. */
pc_status pc_design_fim(const pc_design* d, const double overlaps4[4], int method, pc_fim** out);
pc_status pc_design_config_fim(const pc_design* d, int index, const double overlaps4[4],
                               int method, pc_fim** out);
pc_status pc_fim_hom_baseline(const double overlaps4[4], pc_fim** out);
int pc_fim_dim(const pc_fim* f);
pc_status pc_fim_entries(const pc_fim* f, double* out);
pc_status pc_fim_d_optimality(const pc_fim* f, double* out);
/* Infinite sentinels when the matrix is singular. */
pc_status pc_fim_inverse_metrics(const pc_fim* f, double* det_inv, double* trace_inv,
                                 double* max_eig_inv);
void pc_fim_free(pc_fim* f);

/* ---- design search ---- */

pc_status pc_optimal_second_ratio(double equal_overlap, int grid_points, double* ratio_out);
pc_status pc_design_optimize(const double overlaps4[4], int restarts, uint64_t seed,
                             pc_design_result** out);
pc_status pc_design_result_design(const pc_design_result* r, pc_design** out);
double pc_design_result_score(const pc_design_result* r);
int pc_design_result_converged(const pc_design_result* r);
pc_status pc_design_result_fim(const pc_design_result* r, pc_fim** out);
int64_t pc_design_result_trace_size(const pc_design_result* r);
pc_status pc_design_result_trace(const pc_design_result* r, int64_t* evaluations_out,
                                 double* scores_out);
void pc_design_result_free(pc_design_result* r);

/* ---- maximum-likelihood estimation ---- */

/* Data: one pc_counts per design configuration, canonical outcome order. */
pc_status pc_log_likelihood(const pc_design* d, const pc_counts* const* counts, int n_configs,
                            const double params8[8], double* out);
pc_status pc_fit(const pc_design* d, const pc_counts* const* counts, int n_configs,
                 const double init8[8], int restarts, uint64_t seed, pc_fit_result** out);
pc_status pc_fit_result_estimate(const pc_fit_result* r, double params8_out[8]);
double pc_fit_result_log_likelihood(const pc_fit_result* r);
int pc_fit_result_converged(const pc_fit_result* r);
double pc_fit_result_identifiability(const pc_fit_result* r);
pc_status pc_fit_result_tvd(const pc_fit_result* r, double* tvd_out, int n_configs);
pc_status pc_fit_result_observed_fim(const pc_fit_result* r, pc_fim** out);
void pc_fit_result_free(pc_fit_result* r);

pc_status pc_observed_fim(const pc_design* d, const pc_counts* const* counts, int n_configs,
                          const double params8[8], pc_fim** out);

/* ---- convergence study ---- */

/* streams: n_configs pointers to chronological outcome-index streams of
 * length stream_length each, drawn from the truth model. mode: 0 = hold
 * the truth parameters, 1 = refit at every checkpoint. rows_out holds
 * n_checkpoints * 10 doubles: n, observed (det_inv, trace_inv,
 * max_eig_inv), pairwise-baseline triple, ideal-design triple. */
pc_status pc_convergence_study(const pc_design* d, const double truth8[8],
                               const int* const* streams, int64_t stream_length,
                               const int64_t* checkpoints, int n_checkpoints, int mode,
                               int refit_restarts, uint64_t seed, double* rows_out);

#ifdef __cplusplus
}
#endif

#endif /* PHOTONCHAR_H */
