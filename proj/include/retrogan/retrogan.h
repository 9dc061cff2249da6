/* Copyright 2026 The RetroGAN Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to libretrogan.
 *
 * Every fallible call returns an rg_status. On failure the message is
 * available from rg_last_error() on the calling thread until the next call
 * into the library from that thread. Objects are opaque handles released
 * with their *_free function; passing NULL to a *_free function is a no-op.
 * Strings returned through char** are owned by the caller and released
 * with rg_string_free().
 */

#ifndef RETROGAN_H_
#define RETROGAN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RETROGAN_BUILDING_LIBRARY)
#define RG_API __declspec(dllexport)
#else
#define RG_API __declspec(dllimport)
#endif
#else
#define RG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rg_status {
  RG_OK = 0,
  RG_ERR_INVALID_ARGUMENT = 1,
  RG_ERR_SHAPE = 2,
  RG_ERR_DEGENERATE_VECTOR = 3,
  RG_ERR_PARSE = 4,
  RG_ERR_DIMENSION = 5,
  RG_ERR_EMPTY = 6,
  RG_ERR_IO = 7,
  RG_ERR_CONFIG = 8,
  RG_ERR_CONFIG_MISMATCH = 9,
  RG_ERR_CHECKPOINT = 10,
  RG_ERR_DATA = 11,
  RG_ERR_ALIGNMENT = 12,
  RG_ERR_VOCABULARY = 13,
  RG_ERR_UNDEFINED_CORRELATION = 14,
  RG_ERR_INSUFFICIENT_CONFOUNDERS = 15,
  RG_ERR_DOMAIN = 16,
  RG_ERR_INVALID_STATE = 17,
  RG_ERR_INTERNAL = 18
} rg_status;

typedef struct rg_config rg_config;
typedef struct rg_table rg_table;
typedef struct rg_model rg_model;
typedef struct rg_dataset rg_dataset;

RG_API const char* rg_version(void);
RG_API const char* rg_last_error(void);
/* "ok", "invalid argument", "parse error", ... */
RG_API const char* rg_status_name(rg_status status);
RG_API void rg_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

/* preset: "paper-default", "tuned" or "desk"; NULL means "paper-default". */
RG_API rg_status rg_config_create(const char* preset, rg_config** out);
/* JSON run configuration applied on top of paper-default. */
RG_API rg_status rg_config_load_file(const char* path, rg_config** out);
/* key is "section.name", e.g. "train.batch_size"; value is JSON or a bare string. */
RG_API rg_status rg_config_set(rg_config* config, const char* key, const char* value);
RG_API rg_status rg_config_to_json(const rg_config* config, char** out_json);
/* Static text listing every key and its default. */
RG_API const char* rg_config_reference(void);
RG_API void rg_config_free(rg_config* config);

/* ---- embedding tables ------------------------------------------------- */

/* expected_dim 0 accepts any width. */
RG_API rg_status rg_table_load(const char* path, size_t expected_dim, rg_table** out);
RG_API rg_status rg_table_save(const rg_table* table, const char* path);
/* Row-L2-normalized copy. */
RG_API rg_status rg_table_preprocess(const rg_table* table, rg_table** out);
RG_API size_t rg_table_size(const rg_table* table);
RG_API size_t rg_table_dim(const rg_table* table);
/* Pointers stay valid while the table lives. */
RG_API rg_status rg_table_word(const rg_table* table, size_t index, const char** out_word);
RG_API rg_status rg_table_vector(const rg_table* table, size_t index, const double** out_values);
/* Top-k by cosine. words and cosines must each hold k entries. */
RG_API rg_status rg_table_neighbors(const rg_table* table, const char* word, size_t k,
                                    const char** words, double* cosines);
RG_API void rg_table_free(rg_table* table);

/* ---- models ----------------------------------------------------------- */

RG_API rg_status rg_model_load(const char* checkpoint_path, rg_model** out);
RG_API rg_status rg_model_save(const rg_model* model, const char* checkpoint_path);
RG_API size_t rg_model_dim(const rg_model* model);
RG_API uint64_t rg_model_step(const rg_model* model);
RG_API size_t rg_model_parameter_count(const rg_model* model);
/* Applies G to every row of `input`; the input is used as given. */
RG_API rg_status rg_model_postspecialize(const rg_model* model, const rg_table* input,
                                         rg_table** out);
RG_API void rg_model_free(rg_model* model);

/* ---- benchmarks ------------------------------------------------------- */

/* format: "simlex", "simverb", "card660", "tsv" or "w1,w2,score,header".
 * name may be NULL (file stem). */
RG_API rg_status rg_dataset_load(const char* path, const char* format, const char* name,
                                 rg_dataset** out);
RG_API size_t rg_dataset_size(const rg_dataset* dataset);
RG_API void rg_dataset_free(rg_dataset* dataset);

typedef struct rg_report {
  double rho;
  size_t evaluated;
  size_t skipped;
} rg_report;

/* mode: "all", "disjoint" or "full"; missing_policy: "skip" or "zero".
 * constraints_path may be NULL (no constrained words). out_json, if not
 * NULL, receives the report as one JSON object. */
RG_API rg_status rg_evaluate(const rg_table* table, const rg_dataset* dataset,
                             const char* constraints_path, const char* mode,
                             const char* missing_policy, rg_report* out, char** out_json);

/* ---- jobs ------------------------------------------------------------- */

/* Jobs write their artifacts into out_dir. out_summary_json may be NULL.
 * verbose != 0 prints progress to standard error. */
RG_API rg_status rg_train_run(const rg_config* config, const char* out_dir, int verbose,
                              char** out_summary_json);
RG_API rg_status rg_postspecialize_file(const char* checkpoint_path, const char* input_path,
                                        const char* output_path);
RG_API rg_status rg_ook_run(const rg_config* config, const double* fractions, size_t n_fractions,
                            const char* out_dir, size_t jobs, int verbose,
                            char** out_summary_json);
/* mode: "toggle" or "one_by_one". */
RG_API rg_status rg_ablate_run(const rg_config* config, const char* mode, const char* out_dir,
                               size_t jobs, int verbose, char** out_summary_json);

typedef struct rg_synthetic_options {
  uint64_t seed;
  size_t vocab_size;
  size_t dim;
  size_t n_clusters;
  double collapse_strength;
  double antonym_fraction;
  double spread;
  size_t n_pairs;
  double constraint_coverage;
} rg_synthetic_options;

RG_API void rg_synthetic_options_default(rg_synthetic_options* options);
/* Writes x.vec, y.vec, constraints.txt, benchmark.tsv and options.json. */
RG_API rg_status rg_synthetic_generate(const rg_synthetic_options* options, const char* out_dir);
/* Generates a corpus (dim taken from the config) into dir and points the
 * config's data section at it. */
RG_API rg_status rg_synthetic_attach(rg_config* config, const rg_synthetic_options* options,
                                     const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* RETROGAN_H_ */
