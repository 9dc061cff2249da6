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

/* C API tests. Written in C and linked against libretrogan only. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "retrogan/retrogan.h"

static int failures = 0;

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: CHECK(%s) failed; last error: %s\n",     \
              __FILE__, __LINE__, #cond, rg_last_error());             \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static char dir_buf[512];

static const char* path_in(const char* name) {
  static char buf[4][768];
  static int slot = 0;
  slot = (slot + 1) % 4;
  snprintf(buf[slot], sizeof buf[slot], "%s/%s", dir_buf, name);
  return buf[slot];
}

static void test_status_names(void) {
  CHECK(strcmp(rg_status_name(RG_OK), "ok") == 0);
  CHECK(strcmp(rg_status_name(RG_ERR_PARSE), "parse error") == 0);
  CHECK(strlen(rg_version()) > 0);
  rg_string_free(NULL);
  rg_config_free(NULL);
  rg_table_free(NULL);
  rg_model_free(NULL);
  rg_dataset_free(NULL);
}

static void test_config(void) {
  rg_config* cfg = NULL;
  char* json = NULL;
  CHECK(rg_config_create("desk", &cfg) == RG_OK);
  CHECK(rg_config_set(cfg, "train.batch_size", "16") == RG_OK);
  CHECK(rg_config_set(cfg, "train.nope", "1") == RG_ERR_CONFIG);
  CHECK(strstr(rg_last_error(), "train.nope") != NULL);
  CHECK(rg_config_to_json(cfg, &json) == RG_OK);
  CHECK(json != NULL && strstr(json, "\"batch_size\": 16") != NULL);
  rg_string_free(json);
  rg_config_free(cfg);
  cfg = NULL;
  CHECK(rg_config_create("huge", &cfg) == RG_ERR_CONFIG);
  CHECK(cfg == NULL);
  CHECK(rg_config_create(NULL, NULL) == RG_ERR_INVALID_ARGUMENT);
  CHECK(rg_config_load_file("/nonexistent/config.json", &cfg) == RG_ERR_IO);
  CHECK(strstr(rg_config_reference(), "train.g_lr") != NULL);
}

static void test_tables(void) {
  FILE* f = fopen(path_in("t.vec"), "w");
  fputs("3 2\nalpha 1 0\nbeta 0.8 0.6\ngamma 0 -1\n", f);
  fclose(f);
  rg_table* t = NULL;
  CHECK(rg_table_load(path_in("t.vec"), 2, &t) == RG_OK);
  CHECK(rg_table_size(t) == 3);
  CHECK(rg_table_dim(t) == 2);
  const char* word = NULL;
  CHECK(rg_table_word(t, 1, &word) == RG_OK);
  CHECK(word != NULL && strcmp(word, "beta") == 0);
  CHECK(rg_table_word(t, 7, &word) != RG_OK);
  const double* v = NULL;
  CHECK(rg_table_vector(t, 1, &v) == RG_OK);
  CHECK(v != NULL && v[0] == 0.8);

  const char* words[2];
  double cosines[2];
  CHECK(rg_table_neighbors(t, "alpha", 2, words, cosines) == RG_OK);
  CHECK(strcmp(words[0], "alpha") == 0);
  CHECK(strcmp(words[1], "beta") == 0);
  CHECK(fabs(cosines[1] - 0.8) < 1e-12);
  CHECK(rg_table_neighbors(t, "delta", 1, words, cosines) == RG_ERR_VOCABULARY);

  CHECK(rg_table_save(t, path_in("copy.vec")) == RG_OK);
  rg_table* back = NULL;
  CHECK(rg_table_load(path_in("copy.vec"), 0, &back) == RG_OK);
  CHECK(rg_table_vector(back, 2, &v) == RG_OK);
  CHECK(v[1] == -1.0);
  rg_table_free(back);

  rg_table* bad = NULL;
  CHECK(rg_table_load(path_in("t.vec"), 3, &bad) == RG_ERR_DIMENSION);
  CHECK(rg_table_load(path_in("missing.vec"), 0, &bad) == RG_ERR_IO);
  CHECK(bad == NULL);
  rg_table_free(t);
}

static void test_pipeline(void) {
  rg_synthetic_options so;
  rg_synthetic_options_default(&so);
  CHECK(so.vocab_size == 2000);
  so.vocab_size = 150;
  so.dim = 8;
  so.n_clusters = 6;
  so.n_pairs = 200;
  so.constraint_coverage = 0.7;

  rg_config* cfg = NULL;
  CHECK(rg_config_create("desk", &cfg) == RG_OK);
  CHECK(rg_config_set(cfg, "architecture.dim", "8") == RG_OK);
  CHECK(rg_config_set(cfg, "architecture.generator_size", "12") == RG_OK);
  CHECK(rg_config_set(cfg, "architecture.discriminator_size", "12") == RG_OK);
  CHECK(rg_config_set(cfg, "train.total_batches", "4") == RG_OK);
  CHECK(rg_config_set(cfg, "train.batch_size", "8") == RG_OK);
  CHECK(rg_synthetic_attach(cfg, &so, path_in("data")) == RG_OK);

  char* summary = NULL;
  CHECK(rg_train_run(cfg, path_in("run"), 0, &summary) == RG_OK);
  CHECK(summary != NULL && strstr(summary, "\"steps\":4") != NULL);
  rg_string_free(summary);

  rg_model* m = NULL;
  CHECK(rg_model_load(path_in("run/final.ckpt"), &m) == RG_OK);
  CHECK(rg_model_dim(m) == 8);
  CHECK(rg_model_step(m) == 4);
  CHECK(rg_model_parameter_count(m) > 0);
  CHECK(rg_model_save(m, path_in("copy.ckpt")) == RG_OK);

  rg_table* x = NULL;
  rg_table* xn = NULL;
  rg_table* post = NULL;
  CHECK(rg_table_load(path_in("data/x.vec"), 8, &x) == RG_OK);
  CHECK(rg_table_preprocess(x, &xn) == RG_OK);
  CHECK(rg_model_postspecialize(m, xn, &post) == RG_OK);
  CHECK(rg_table_size(post) == 150);
  CHECK(rg_postspecialize_file(path_in("run/final.ckpt"), path_in("data/x.vec"), path_in("post.vec")) == RG_OK);

  rg_dataset* ds = NULL;
  CHECK(rg_dataset_load(path_in("data/benchmark.tsv"), "tsv", NULL, &ds) == RG_OK);
  CHECK(rg_dataset_size(ds) == 200);
  rg_report all, disjoint;
  char* json = NULL;
  CHECK(rg_evaluate(post, ds, NULL, "all", "skip", &all, &json) == RG_OK);
  CHECK(all.evaluated == 200);
  CHECK(json != NULL && strstr(json, "\"mode\":\"all\"") != NULL);
  rg_string_free(json);
  CHECK(rg_evaluate(post, ds, path_in("data/constraints.txt"), "disjoint", "skip", &disjoint, NULL) == RG_OK);
  CHECK(disjoint.evaluated < all.evaluated);
  CHECK(rg_evaluate(post, ds, NULL, "sideways", "skip", &all, NULL) == RG_ERR_CONFIG);
  rg_dataset* bad = NULL;
  CHECK(rg_dataset_load(path_in("data/x.vec"), "tsv", NULL, &bad) == RG_ERR_PARSE);

  const double fractions[] = {0.5, 1.0};
  CHECK(rg_config_set(cfg, "train.total_batches", "2") == RG_OK);
  CHECK(rg_ook_run(cfg, fractions, 2, path_in("ook"), 2, 0, NULL) == RG_OK);
  CHECK(rg_ablate_run(cfg, "toggle", path_in("ablate"), 2, 0, NULL) == RG_OK);
  CHECK(rg_ablate_run(cfg, "everything", path_in("ablate2"), 1, 0, NULL) == RG_ERR_CONFIG);

  rg_model* none = NULL;
  CHECK(rg_model_load(path_in("post.vec"), &none) == RG_ERR_CHECKPOINT);
  CHECK(none == NULL);

  rg_dataset_free(ds);
  rg_table_free(post);
  rg_table_free(xn);
  rg_table_free(x);
  rg_model_free(m);
  rg_config_free(cfg);
}

int main(int argc, char** argv) {
  snprintf(dir_buf, sizeof dir_buf, "%s", argc > 1 ? argv[1] : "capi_scratch");
  test_status_names();
  test_config();
  test_tables();
  test_pipeline();
  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
