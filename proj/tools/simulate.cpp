#include "vvfrac/vvfrac.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Quasistatic brittle fracture by vanishing-viscosity incremental minimization"};
  std::string config, mode, out;
  int workers = 0;
  bool with_oracle = false, quiet = false;
  app.add_option("config", config, "Scenario config (JSON)")->required();
  app.add_option("--mode", mode,
                 "solve-once, err-only, evolve-viscous, evolve-vv or parametrize (overrides the config)");
  app.add_option("--workers", workers, "Cap on worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--with-oracle", with_oracle, "Add the finite-difference ERR oracle (err-only)");
  app.add_option("--out", out, "Output directory (overrides the config)");
  app.add_flag("-q,--quiet", quiet, "Print only errors");
  app.set_version_flag("--version", vvf_version());
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  vvf_run_options opts;
  vvf_run_options_init(&opts);
  if (!mode.empty()) {
    opts.mode = vvf_mode_from_name(mode.c_str());
    if (opts.mode < 0) {
      std::fprintf(stderr, "error: unknown mode '%s'\n", mode.c_str());
      return 2;
    }
  }
  opts.workers = workers;
  opts.with_oracle = with_oracle ? 1 : 0;
  if (!out.empty()) opts.out_dir = out.c_str();

  vvf_config* cfg = nullptr;
  vvf_status st = vvf_config_load(config.c_str(), &cfg);
  if (st != VVF_OK) {
    std::fprintf(stderr, "config error in %s:\n", config.c_str());
    if (cfg && vvf_config_error_count(cfg) > 0)
      for (size_t i = 0; i < vvf_config_error_count(cfg); ++i)
        std::fprintf(stderr, "  %s\n", vvf_config_error(cfg, i));
    else
      std::fprintf(stderr, "  %s\n", vvf_last_error());
    vvf_config_free(cfg);
    return 2;
  }

  vvf_manifest* man = nullptr;
  st = vvf_run(cfg, &opts, &man);
  vvf_config_free(cfg);
  if (st != VVF_OK) {
    std::fprintf(stderr, "error: %s\n", vvf_last_error());
    return st == VVF_ERR_CONFIG || st == VVF_ERR_INVALID_ARGUMENT ? 2 : 3;
  }
  for (size_t i = 0; i < vvf_manifest_stage_count(man); ++i) {
    const char *name, *status, *msg;
    vvf_manifest_stage(man, i, &name, &status, &msg);
    bool bad = std::string(status) == "failed";
    if (!quiet || bad)
      std::fprintf(bad ? stderr : stdout, "stage %-16s %-8s %s\n", name, status, msg);
  }
  for (size_t i = 0; i < vvf_manifest_check_count(man); ++i) {
    const char *name, *detail;
    int pass, gating;
    vvf_manifest_check(man, i, &name, &pass, &gating, &detail);
    if (!quiet || (!pass && gating))
      std::fprintf(pass || !gating ? stdout : stderr, "check %-36s %s%s  %s\n", name,
                   pass ? "PASS" : "FAIL", gating ? "" : " (diagnostic)", detail);
  }
  int code = vvf_manifest_exit_code(man);
  if (!quiet) std::printf("config %s\nexit %d\n", vvf_manifest_config_hash(man), code);
  vvf_manifest_free(man);
  return code;
}
