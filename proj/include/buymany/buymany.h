/* C API for the buy-many mechanism laboratory.
 *
 * All functions return a bm_status code; structured results are returned as
 * JSON text allocated by the library and released with bm_string_free. On
 * failure *error (when non-NULL) receives an allocated message. Instances
 * are opaque handles created from instance-document JSON.
 */
#ifndef BUYMANY_H
#define BUYMANY_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct bm_instance bm_instance;

typedef enum bm_status {
  BM_OK = 0,
  BM_ERR_USAGE = 1,
  BM_ERR_VALIDATION = 2,
  BM_ERR_CAPACITY = 3,
  BM_ERR_INTERNAL = 4
} bm_status;

const char* bm_status_name(int status);
void bm_string_free(char* text);

bm_status bm_instance_from_json(const char* text, double tolerance, bm_instance** out,
                                char** error);
void bm_instance_free(bm_instance* instance);
bm_status bm_instance_to_json(const bm_instance* instance, char** out, char** error);
int bm_instance_items(const bm_instance* instance);
int bm_instance_atoms(const bm_instance* instance);
int bm_instance_menu_size(const bm_instance* instance);

/* buy_many: 0 = buy-one semantics, nonzero = buy-many. */
bm_status bm_revenue(const bm_instance* instance, int buy_many, double tolerance, double* out,
                     char** error);
bm_status bm_best_response_report(const bm_instance* instance, int buy_many, double tolerance,
                                  char** out, char** error);
bm_status bm_verify_report(const bm_instance* instance, double tolerance, char** out,
                           char** error);
bm_status bm_closure_report(const bm_instance* instance, double tolerance, char** out,
                            char** error);
bm_status bm_opt_buy_one_report(const bm_instance* instance, double tolerance, char** out,
                                char** error);
bm_status bm_pricing_report(const bm_instance* instance, unsigned long long seed,
                            double tolerance, char** out, char** error);
bm_status bm_compress_report(const bm_instance* instance, double epsilon, double tolerance,
                             char** out, char** error);
/* spec_json: {"epsilon": e, "mode": "scalar"|"items"|"explicit"|"random-scalar"|
 * "random-items", "factors": [...]|[[...]], "replacements": [valuation...],
 * "seed": u64}. Returns the perturbed instance document. */
bm_status bm_perturb_instance(const bm_instance* instance, const char* spec_json,
                              double tolerance, char** out, char** error);
bm_status bm_continuity_report(const bm_instance* instance, double epsilon,
                               unsigned long long seed, double tolerance, char** out,
                               char** error);
/* family: "counterexample", "basic-sets", "hard-unitdemand", "hard-xos".
 * params_json fields per family; see the CLI help for the flag mapping. */
bm_status bm_generate(const char* family, const char* params_json, char** out, char** error);
bm_status bm_beta_report(double grid_step, long long quadrature_points, char** out, char** error);
bm_status bm_selftest_report(unsigned long long seed, char** out, char** error);

#ifdef __cplusplus
}
#endif

#endif /* BUYMANY_H */
