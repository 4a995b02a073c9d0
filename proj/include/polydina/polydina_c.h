#ifndef POLYDINA_C_H
#define POLYDINA_C_H

/*
 * C interface to the polydina library.
 *
 * Conventions:
 *   - Every function returns a status code (POLYDINA_OK on success); outputs
 *     are written through out-parameters.
 *   - On failure, polydina_last_error() returns a thread-local description of
 *     the most recent failing call on this thread.
 *   - Strings returned through `char**` out-parameters are heap-allocated and
 *     must be released with polydina_string_free().
 *   - Structured inputs and outputs are JSON or CSV text; the schemas/ folder
 *     documents the JSON shapes.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* status codes (stable) */
#define POLYDINA_OK 0
#define POLYDINA_ERR_INVALID_ARGUMENT 1
#define POLYDINA_ERR_PARSE 2
#define POLYDINA_ERR_SIZE_CAP 3
#define POLYDINA_ERR_PRECONDITION 4
#define POLYDINA_ERR_NUMERIC 5
#define POLYDINA_ERR_NOT_CONVERGED 6
#define POLYDINA_ERR_IO 7

/* check verdicts (stable) */
#define POLYDINA_VERDICT_IDENTIFIABLE 0
#define POLYDINA_VERDICT_NOT_IDENTIFIABLE 1
#define POLYDINA_VERDICT_UNDETERMINED 2

typedef struct polydina_q polydina_q; /* opaque parsed Q-matrix */

const char* polydina_version(void);

/* Thread-local message describing the last failure on this thread. */
const char* polydina_last_error(void);

void polydina_string_free(char* text);

/* ------------------------------------------------------------------ Q-matrix
 * model is "gpdina" (item-level) or "seq" (category-level); csv accepts the
 * prefixed "item,category,q1..qK" / "item,ncat,q1..qK" layout or the bare
 * one-row-per-item binary layout. */
int polydina_q_parse(const char* csv, const char* model, polydina_q** out);
void polydina_q_free(polydina_q* q);
int polydina_q_info(const polydina_q* q, int* K, int* J);

/* ------------------------------------------------------------- diagnostics
 * Identifiability report as JSON; verdict receives one of the
 * POLYDINA_VERDICT_* codes (pass NULL to skip). */
int polydina_check(const polydina_q* q, char** json_out, int* verdict);

/* Marginal-probability matrix (T for the item-level model, T^s for the
 * sequential model) as CSV with a pattern key column. */
int polydina_tmatrix_csv(const polydina_q* q, const char* params_json, char** csv_out);

/* ------------------------------------------------------------- parameters */
int polydina_random_params(const polydina_q* q, const char* model, uint64_t seed,
                           char** json_out);

/* Maps a parameter set across the item-level/sequential equivalence on an
 * unrestricted Q-matrix (direction decided by the input's "model" field). */
int polydina_convert(const polydina_q* q, const char* params_json, char** json_out);

/* -------------------------------------------------------------- simulation */
int polydina_simulate_csv(const polydina_q* q, const char* params_json, size_t n,
                          uint64_t seed, char** csv_out);

/* -------------------------------------------------------------- estimation
 * init_json selects the starting point; pass NULL to draw a random interior
 * start from `seed`. data_csv holds one respondent per row. */
int polydina_fit(const polydina_q* q, const char* data_csv, const char* init_json,
                 uint64_t seed, int max_iter, double tol, char** json_out);

int polydina_probe(const polydina_q* q, const char* data_csv, int n_starts, uint64_t seed,
                   int max_iter, double tol, char** json_out);

/* Log-likelihood of a parameter set on a dataset (JSON:
 * {"loglik": ..., "offending_row": ...}). */
int polydina_loglik(const polydina_q* q, const char* params_json, const char* data_csv,
                    char** json_out);

/* --------------------------------------------------- identifiability lab
 * kind is one of C1, C2, C3, S1_zero_guess, NotId1, NotId2, S2star, S3star;
 * base_json may be NULL to use kind-appropriate random interior parameters
 * drawn from `seed`. The emitted JSON embeds the verification report. */
int polydina_counterexample(const polydina_q* q, const char* kind, double eps,
                            const char* base_json, uint64_t seed, char** json_out);

/* params_json may be NULL to test at random interior parameters of the
 * Q-matrix's model drawn from `seed`. */
int polydina_rank(const polydina_q* q, const char* params_json, uint64_t seed,
                  char** json_out);

/* ---------------------------------------------------------------- datasets
 * name is "pisa2000" or "timss2007"; returns the bundled Q-matrix CSV. */
int polydina_dataset(const char* name, char** csv_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* POLYDINA_C_H */
