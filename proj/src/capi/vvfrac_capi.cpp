#include "vvfrac/vvfrac.h"

#include "vvfrac/error.hpp"
#include "vvfrac/run.hpp"

#include <filesystem>
#include <string>

struct vvf_config {
  vvfrac::ConfigParse parse;
};

struct vvf_manifest {
  vvfrac::RunManifest manifest;
  std::string json;
};

namespace {

thread_local std::string last_error;

vvf_status fail(vvf_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
vvf_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const vvfrac::ConfigError& e) {
    return fail(VVF_ERR_CONFIG, e.what());
  } catch (const vvfrac::StructuralError& e) {
    return fail(VVF_ERR_STRUCTURAL, e.what());
  } catch (const vvfrac::MeshingError& e) {
    return fail(VVF_ERR_MESHING, e.what());
  } catch (const vvfrac::SolverError& e) {
    return fail(VVF_ERR_SOLVER, e.what());
  } catch (const vvfrac::InfeasibleRadiusError& e) {
    return fail(VVF_ERR_INFEASIBLE_RADIUS, e.what());
  } catch (const vvfrac::InvalidArgument& e) {
    return fail(VVF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(VVF_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(VVF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VVF_ERR_INTERNAL, "unknown error");
  }
}

vvf_status finish_parse(vvfrac::ConfigParse p, vvf_config** out) {
  bool ok = p.ok();
  std::string first = ok ? "" : p.errors.front();
  std::size_t n = p.errors.size();
  *out = new vvf_config{std::move(p)};
  if (ok) return VVF_OK;
  return fail(VVF_ERR_CONFIG, first + (n > 1 ? " (and " + std::to_string(n - 1) + " more)" : ""));
}

}  // namespace

extern "C" {

const char* vvf_version(void) { return vvfrac::kToolVersion; }

const char* vvf_last_error(void) { return last_error.c_str(); }

void vvf_run_options_init(vvf_run_options* opts) {
  if (!opts) return;
  opts->mode = VVF_MODE_FROM_CONFIG;
  opts->workers = 0;
  opts->with_oracle = 0;
  opts->out_dir = nullptr;
}

vvf_status vvf_config_load(const char* path, vvf_config** out) {
  if (!path || !out) return fail(VVF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] { return finish_parse(vvfrac::parse_config_file(path), out); });
}

vvf_status vvf_config_parse(const char* text, const char* base_dir, vvf_config** out) {
  if (!text || !out) return fail(VVF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    return finish_parse(vvfrac::parse_config_text(text, base_dir ? base_dir : "."), out);
  });
}

void vvf_config_free(vvf_config* cfg) { delete cfg; }

size_t vvf_config_error_count(const vvf_config* cfg) { return cfg ? cfg->parse.errors.size() : 0; }

const char* vvf_config_error(const vvf_config* cfg, size_t i) {
  if (!cfg || i >= cfg->parse.errors.size()) return nullptr;
  return cfg->parse.errors[i].c_str();
}

const char* vvf_config_mode(const vvf_config* cfg) {
  return cfg ? vvfrac::mode_name(cfg->parse.config.mode) : nullptr;
}

const char* vvf_mode_name(int mode) {
  if (mode < 0 || mode > VVF_MODE_PARAMETRIZE) return nullptr;
  return vvfrac::mode_name(static_cast<vvfrac::RunMode>(mode));
}

int vvf_mode_from_name(const char* name) {
  if (!name) return -1;
  try {
    return static_cast<int>(vvfrac::parse_mode(name));
  } catch (const vvfrac::Error&) {
    return -1;
  }
}

vvf_status vvf_run(const vvf_config* cfg, const vvf_run_options* opts, vvf_manifest** out) {
  if (!cfg || !out) return fail(VVF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (!cfg->parse.ok()) return fail(VVF_ERR_CONFIG, "config has validation errors");
  return guarded([&] {
    vvfrac::RunOptions ro;
    if (opts) {
      if (opts->mode != VVF_MODE_FROM_CONFIG) {
        if (opts->mode < 0 || opts->mode > VVF_MODE_PARAMETRIZE)
          return fail(VVF_ERR_INVALID_ARGUMENT, "unknown mode " + std::to_string(opts->mode));
        ro.mode = static_cast<vvfrac::RunMode>(opts->mode);
      }
      if (opts->workers > 0) ro.workers = opts->workers;
      if (opts->out_dir) ro.output_dir = opts->out_dir;
      ro.with_oracle = opts->with_oracle != 0;
    }
    auto* m = new vvf_manifest;
    m->manifest = vvfrac::run(cfg->parse.config, ro);
    m->json = vvfrac::manifest_json(m->manifest);
    *out = m;
    return VVF_OK;
  });
}

void vvf_manifest_free(vvf_manifest* m) { delete m; }

int vvf_manifest_exit_code(const vvf_manifest* m) { return m ? m->manifest.exit_code : -1; }

const char* vvf_manifest_json(const vvf_manifest* m) { return m ? m->json.c_str() : nullptr; }

const char* vvf_manifest_config_hash(const vvf_manifest* m) {
  return m ? m->manifest.config_hash.c_str() : nullptr;
}

size_t vvf_manifest_check_count(const vvf_manifest* m) { return m ? m->manifest.checks.size() : 0; }

vvf_status vvf_manifest_check(const vvf_manifest* m, size_t i, const char** name, int* pass,
                              int* gating, const char** detail) {
  if (!m || i >= m->manifest.checks.size())
    return fail(VVF_ERR_INVALID_ARGUMENT, "check index out of range");
  const auto& c = m->manifest.checks[i];
  if (name) *name = c.name.c_str();
  if (pass) *pass = c.pass ? 1 : 0;
  if (gating) *gating = c.gating ? 1 : 0;
  if (detail) *detail = c.detail.c_str();
  return VVF_OK;
}

size_t vvf_manifest_stage_count(const vvf_manifest* m) { return m ? m->manifest.stages.size() : 0; }

vvf_status vvf_manifest_stage(const vvf_manifest* m, size_t i, const char** name,
                              const char** status, const char** message) {
  if (!m || i >= m->manifest.stages.size())
    return fail(VVF_ERR_INVALID_ARGUMENT, "stage index out of range");
  const auto& s = m->manifest.stages[i];
  if (name) *name = s.name.c_str();
  if (status) *status = s.status.c_str();
  if (message) *message = s.message.c_str();
  return VVF_OK;
}

vvf_status vvf_energy_release_rates(const vvf_config* cfg, double t, double* G, size_t capacity,
                                    size_t* count) {
  if (!cfg || (capacity > 0 && !G)) return fail(VVF_ERR_INVALID_ARGUMENT, "null argument");
  if (!cfg->parse.ok()) return fail(VVF_ERR_CONFIG, "config has validation errors");
  return guarded([&] {
    const auto& c = cfg->parse.config;
    const auto& ctx = c.context;
    double tt = t < 0.0 ? ctx.loads.T : t;
    vvfrac::CrackedMesh mesh = vvfrac::build_mesh(ctx.domain, c.initial, ctx.mesh);
    auto u = vvfrac::solve_equilibrium(mesh, ctx.material, ctx.loads, tt, ctx.solver);
    auto e = vvfrac::err_vector(u, ctx.material, ctx.loads, tt, c.initial, ctx.domain.polygon);
    for (size_t i = 0; i < e.size() && i < capacity; ++i) G[i] = e[i].G;
    if (count) *count = e.size();
    return VVF_OK;
  });
}

}  // extern "C"
