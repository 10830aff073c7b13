#ifndef VVFRAC_H
#define VVFRAC_H

#include <stddef.h>

#if defined(VVFRAC_BUILDING)
#define VVF_API __attribute__((visibility("default")))
#else
#define VVF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  VVF_OK = 0,
  VVF_ERR_CONFIG = 1,
  VVF_ERR_STRUCTURAL = 2,
  VVF_ERR_MESHING = 3,
  VVF_ERR_SOLVER = 4,
  VVF_ERR_INFEASIBLE_RADIUS = 5,
  VVF_ERR_INVALID_ARGUMENT = 6,
  VVF_ERR_IO = 7,
  VVF_ERR_INTERNAL = 8
} vvf_status;

typedef struct vvf_config vvf_config;
typedef struct vvf_manifest vvf_manifest;

typedef enum {
  VVF_MODE_FROM_CONFIG = -1,
  VVF_MODE_SOLVE_ONCE = 0,
  VVF_MODE_ERR_ONLY = 1,
  VVF_MODE_EVOLVE_VISCOUS = 2,
  VVF_MODE_EVOLVE_VV = 3,
  VVF_MODE_PARAMETRIZE = 4
} vvf_mode;

typedef struct {
  int mode;              /* vvf_mode; VVF_MODE_FROM_CONFIG keeps the config's */
  int workers;           /* <= 0 keeps the config's */
  int with_oracle;       /* nonzero adds the finite-difference ERR oracle */
  const char* out_dir;   /* NULL keeps the config's */
} vvf_run_options;

VVF_API const char* vvf_version(void);

/* Message of the last failed call on this thread ("" if none). */
VVF_API const char* vvf_last_error(void);

VVF_API void vvf_run_options_init(vvf_run_options* opts);

/* Parses and validates a config. On VVF_ERR_CONFIG, *out is still set when the
 * document was readable, so that every violation can be listed; release it
 * with vvf_config_free. */
VVF_API vvf_status vvf_config_load(const char* path, vvf_config** out);
VVF_API vvf_status vvf_config_parse(const char* text, const char* base_dir, vvf_config** out);
VVF_API void vvf_config_free(vvf_config* cfg);
VVF_API size_t vvf_config_error_count(const vvf_config* cfg);
VVF_API const char* vvf_config_error(const vvf_config* cfg, size_t i);
VVF_API const char* vvf_config_mode(const vvf_config* cfg);
VVF_API const char* vvf_mode_name(int mode);
/* Returns -1 for unknown names. */
VVF_API int vvf_mode_from_name(const char* name);

/* Runs a valid config. Stage failures are not errors of this call: they are
 * recorded in the manifest and reflected in its exit code. */
VVF_API vvf_status vvf_run(const vvf_config* cfg, const vvf_run_options* opts,
                           vvf_manifest** out);
VVF_API void vvf_manifest_free(vvf_manifest* m);
/* 0 success, 3 numerical-stage failure, 4 failed check. */
VVF_API int vvf_manifest_exit_code(const vvf_manifest* m);
VVF_API const char* vvf_manifest_json(const vvf_manifest* m);
VVF_API const char* vvf_manifest_config_hash(const vvf_manifest* m);
VVF_API size_t vvf_manifest_check_count(const vvf_manifest* m);
/* Fills name/detail pointers (valid until the manifest is freed). */
VVF_API vvf_status vvf_manifest_check(const vvf_manifest* m, size_t i, const char** name,
                                      int* pass, int* gating, const char** detail);
VVF_API size_t vvf_manifest_stage_count(const vvf_manifest* m);
VVF_API vvf_status vvf_manifest_stage(const vvf_manifest* m, size_t i, const char** name,
                                      const char** status, const char** message);

/* Energy release rates of the config's initial crack at time t (t < 0 selects
 * T). Writes min(capacity, M) values and sets *count to M. Infeasible tips
 * report NaN. */
VVF_API vvf_status vvf_energy_release_rates(const vvf_config* cfg, double t, double* G,
                                            size_t capacity, size_t* count);

#ifdef __cplusplus
}
#endif

#endif
