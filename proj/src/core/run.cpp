#include "vvfrac/run.hpp"

#include "json_io.hpp"
#include "vvfrac/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>

namespace vvfrac {

using io::json;
namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
    throw Error("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string manifest_json(const RunManifest& m, bool with_timing) {
  json stages = json::array();
  for (const auto& s : m.stages) {
    json j = {{"name", s.name}, {"status", s.status}, {"message", s.message}};
    if (with_timing) j["seconds"] = s.seconds;
    stages.push_back(j);
  }
  json checks = json::array();
  for (const auto& c : m.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"gating", c.gating}, {"detail", c.detail}});
  json j = {{"config_hash", m.config_hash}, {"tool_version", m.tool_version},
            {"mode", m.mode},               {"units", m.units},
            {"output_dir", m.output_dir},   {"stages", stages},
            {"checks", checks},             {"files", m.files},
            {"exit_code", m.exit_code}};
  if (with_timing) j["seconds"] = m.seconds;
  return j.dump(2);
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

class Output {
 public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    out << content;
    add(name);
  }
  void write_json(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  // Appends one JSON-lines record and flushes, so partial runs stay readable.
  class Lines {
   public:
    Lines(const fs::path& p) : out_(p, std::ios::binary | std::ios::trunc) {
      if (!out_) throw Error("cannot write " + p.string());
    }
    void put(const json& j) {
      out_ << j.dump() << '\n';
      out_.flush();
    }

   private:
    std::ofstream out_;
  };
  std::unique_ptr<Lines> lines(const std::string& name) {
    add(name);
    return std::make_unique<Lines>(dir_ / name);
  }

  std::vector<std::string> files() const { return {files_.begin(), files_.end()}; }
  const fs::path& dir() const { return dir_; }

 private:
  void add(const std::string& name) {
    std::lock_guard<std::mutex> lock(mu_);
    files_.insert(name);
  }
  fs::path dir_;
  std::set<std::string> files_;
  std::mutex mu_;
};

std::string csv_row(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    if (std::isfinite(v[i])) os << v[i];
    else os << "nan";
  }
  os << '\n';
  return os.str();
}

std::string tip_header(const std::string& first, std::size_t M) {
  std::string h = first;
  for (const char* name : {"l", "G", "kappa"})
    for (std::size_t m = 0; m < M; ++m) h += "," + std::string(name) + std::to_string(m);
  return h + "\n";
}

std::string trace_csv(const EvolutionTrace& tr) {
  std::string s = tip_header("t", tr.M());
  for (const auto& st : tr.states) {
    std::vector<double> row{st.t};
    row.insert(row.end(), st.lengths.begin(), st.lengths.end());
    row.insert(row.end(), st.G.begin(), st.G.end());
    row.insert(row.end(), st.kappa_tip.begin(), st.kappa_tip.end());
    s += csv_row(row);
  }
  return s;
}

std::string param_csv(const ParametrizedTrace& p) {
  std::size_t M = p.samples.empty() ? 0 : p.samples.front().lengths.size();
  std::string s = tip_header("sigma,t", M);
  for (const auto& q : p.samples) {
    std::vector<double> row{q.sigma, q.t};
    row.insert(row.end(), q.lengths.begin(), q.lengths.end());
    row.insert(row.end(), q.G.begin(), q.G.end());
    row.insert(row.end(), q.kappa_tip.begin(), q.kappa_tip.end());
    s += csv_row(row);
  }
  return s;
}

struct Runner {
  const ScenarioConfig& cfg;
  RunOptions opt;
  RunMode mode;
  int workers;
  Output out;
  RunManifest man;

  bool stage(const std::string& name, const std::function<std::string()>& body) {
    if (man.exit_code == 3) {
      man.stages.push_back({name, "skipped", 0.0, "an earlier stage failed"});
      return false;
    }
    auto t0 = Clock::now();
    try {
      std::string msg = body();
      man.stages.push_back({name, "ok", since(t0), msg});
      return true;
    } catch (const std::exception& e) {
      man.stages.push_back({name, "failed", since(t0), std::string("stage ") + name + ": " + e.what()});
      man.exit_code = 3;
      return false;
    }
  }
  void check(const std::string& name, bool pass, const std::string& detail, bool gating = true) {
    man.checks.push_back({name, pass, gating, detail});
  }

  double t_solve() const { return cfg.err.t >= 0.0 ? cfg.err.t : cfg.context.loads.T; }

  void solve_once() {
    std::unique_ptr<CrackedMesh> mesh;
    stage("mesh", [&] {
      mesh = std::make_unique<CrackedMesh>(
          build_mesh(cfg.context.domain, cfg.initial, cfg.context.mesh));
      out.text("mesh.msh", mesh->to_msh());
      return std::to_string(mesh->num_nodes()) + " nodes, " +
             std::to_string(mesh->num_triangles()) + " triangles";
    });
    stage("solve", [&] {
      double t = t_solve();
      ElasticitySolver solver(*mesh, cfg.context.material, cfg.context.solver);
      DisplacementField u = solver.solve(cfg.context.loads, t);
      EnergyReport e = solver.energies(u, cfg.context.loads, t, cfg.initial);
      std::string csv = "node,x,y,ux,uy\n";
      for (std::size_t n = 0; n < mesh->num_nodes(); ++n)
        csv += std::to_string(n) + "," +
               csv_row({mesh->nodes[n].x(), mesh->nodes[n].y(), u.u[2 * n], u.u[2 * n + 1]});
      out.text("displacement.csv", csv);
      out.write_json("energy.json", {{"t", t},
                                     {"units", cfg.units},
                                     {"energy", io::energy_json(e)},
                                     {"residual", u.residual},
                                     {"nodes", mesh->num_nodes()},
                                     {"triangles", mesh->num_triangles()}});
      return "E = " + fmt(e.elastic) + ", F = " + fmt(e.total);
    });
  }

  void err_only() {
    stage("err", [&] {
      const auto& ctx = cfg.context;
      double t = t_solve();
      CrackedMesh mesh = build_mesh(ctx.domain, cfg.initial, ctx.mesh);
      ElasticitySolver solver(mesh, ctx.material, ctx.solver);
      DisplacementField u = solver.solve(ctx.loads, t);
      EnergyReport e = solver.energies(u, ctx.loads, t, cfg.initial);
      const double scale = std::max(std::abs(e.strain), std::numeric_limits<double>::min());
      auto entries = err_vector(u, ctx.material, ctx.loads, t, cfg.initial, ctx.domain.polygon);
      json tips = json::array();
      for (std::size_t m = 0; m < entries.size(); ++m) {
        const ErrEntry& en = entries[m];
        json j = io::err_entry_json(en);
        std::string tag = "tip " + std::to_string(m);
        if (!en.feasible) {
          check("positivity " + tag, false, en.note);
          tips.push_back(j);
          continue;
        }
        check("positivity " + tag, en.G >= -cfg.err.positivity_rel * scale,
              "G = " + fmt(en.G) + ", floor " + fmt(-cfg.err.positivity_rel * scale));
        std::vector<double> radii;
        for (double f : cfg.err.radius_factors) radii.push_back(f * en.radius);
        try {
          auto sens = extension_independence_check(u, ctx.material, ctx.loads, t, cfg.initial, m,
                                                   radii, ctx.domain.polygon);
          j["cutoff"] = {{"radii", sens.radii},
                         {"G_by_radius", sens.G_by_radius},
                         {"G_by_tilt", sens.G_by_tilt},
                         {"radius_spread", sens.radius_spread},
                         {"tilt_spread", sens.tilt_spread}};
          check("cutoff invariance " + tag, sens.radius_spread <= cfg.err.cutoff_tol,
                "radius spread " + fmt(sens.radius_spread));
        } catch (const InfeasibleRadiusError& ex) {
          j["cutoff"] = {{"note", ex.what()}};
          check("cutoff invariance " + tag, true, std::string("not evaluated: ") + ex.what(), false);
        }
        if (opt.with_oracle) {
          FdOracle fd = finite_difference_err(ctx.domain, ctx.material, ctx.loads, t, cfg.initial,
                                              m, ctx.mesh, cfg.err.fd_delta,
                                              cfg.err.fd_radius_fraction, cfg.err.fd_remesh,
                                              ctx.solver);
          double rel = std::abs(en.G - fd.G_fd) / std::max(std::abs(fd.G_fd), ctx.material.kappa1);
          j["oracle"] = {{"delta", fd.delta}, {"G_fd", fd.G_fd}, {"E_plus", fd.E_plus},
                         {"E_minus", fd.E_minus}, {"relative_error", rel}};
          if (fd.has_remesh) j["oracle"]["G_fd_remesh"] = fd.G_fd_remesh;
          check("oracle agreement " + tag, rel <= cfg.err.oracle_tol, "relative error " + fmt(rel));
        }
        tips.push_back(j);
      }
      out.write_json("err_report.json", {{"t", t},
                                         {"units", cfg.units},
                                         {"energy", io::energy_json(e)},
                                         {"tips", tips}});
      std::string msg;
      for (const auto& en : entries) msg += (msg.empty() ? "G = " : ", ") + fmt(en.G);
      return msg;
    });
  }

  SearchConfig search() const {
    SearchConfig s = cfg.search;
    s.workers = workers;
    return s;
  }

  double epsilon() const {
    return cfg.viscosity.epsilon > 0.0 ? cfg.viscosity.epsilon : cfg.epsilon0();
  }

  void trace_reports(const EvolutionTrace& tr, const std::string& suffix) {
    auto g = check_discrete_griffith(tr, cfg.context.material.kappa2, cfg.checks.griffith_tol);
    out.write_json("griffith" + suffix + ".json", io::griffith_json(g));
    check("discrete Griffith" + suffix, g.pass,
          "max G2 violation " + fmt(g.max_g2_violation) + ", max G3 residual " +
              fmt(g.max_g3_residual));
    auto b = viscous_energy_balance(tr, cfg.context.loads);
    out.write_json("balance" + suffix + ".json", io::balance_json(b));
    check("energy balance" + suffix, true, "relative residual " + fmt(b.relative_residual), false);
    out.text("lengths" + suffix + ".csv", trace_csv(tr));
  }

  std::optional<EvolutionTrace> evolve_single() {
    std::optional<EvolutionTrace> tr;
    stage("evolve", [&] {
      double eps = epsilon();
      auto lines = out.lines("trace.jsonl");
      lines->put({{"header", true}, {"epsilon", eps}, {"units", cfg.units}});
      tr = run_discrete_evolution(cfg.initial, cfg.grid(), eps, search(), cfg.context,
                                  [&](std::size_t i, const IncrementalStepResult& r) {
                                    lines->put(io::step_json(i, r));
                                  });
      return "epsilon " + fmt(eps) + ", " + tr->status +
             (tr->note.empty() ? "" : " (" + tr->note + ")");
    });
    if (tr) stage("reports", [&] {
      trace_reports(*tr, "");
      return std::string();
    });
    return tr;
  }

  void parametrize(const EvolutionTrace& tr, const std::vector<char>& jump_steps,
                   const std::vector<JumpWindow>& jumps) {
    stage("parametrize", [&] {
      ParametrizedTrace p = reparametrize(tr, jump_steps);
      resolve_plateaus(p, cfg.context, cfg.checks.plateau_samples);
      auto r = parametrized_griffith_check(p, cfg.context.loads, cfg.context.material.kappa2,
                                           cfg.checks.param_tol, cfg.checks.slope_floor);
      out.write_json("param.json", io::param_trace_json(p));
      out.write_json("param_griffith.json", io::param_griffith_json(r));
      out.text("param.csv", param_csv(p));
      check("parametrization identity", r.max_identity_error <= 1e-12,
            "max error " + fmt(r.max_identity_error));
      double mass = 0.0;
      for (const auto& w : jumps)
        for (double x : w.mass) mass += x;
      double acc = std::abs(r.plateau_length - mass);
      check("plateau length equals jump mass", acc <= 0.05 * std::max(mass, 1e-300) || acc == 0.0,
            "plateau " + fmt(r.plateau_length) + ", mass " + fmt(mass));
      check("parametrized Griffith", r.pass,
            std::to_string(r.violations.size()) + " violations, plateau margin " +
                fmt(r.plateau_min_margin),
            false);
      return "S = " + fmt(p.S) + ", " + std::to_string(p.samples.size()) + " samples";
    });
  }

  void evolve_vv() {
    std::optional<ViscousFamily> fam;
    stage("family", [&] {
      auto eps = epsilon_ladder(cfg.epsilon0(), cfg.viscosity.members);
      std::vector<std::unique_ptr<Output::Lines>> lines;
      for (std::size_t j = 0; j < eps.size(); ++j) {
        lines.push_back(out.lines("trace_eps" + std::to_string(j) + ".jsonl"));
        lines.back()->put({{"header", true}, {"member", j}, {"epsilon", eps[j]}, {"units", cfg.units}});
      }
      fam = run_viscous_family(cfg.initial, cfg.grid(), eps, cfg.search, cfg.context, workers,
                               [&](std::size_t j, std::size_t i, const IncrementalStepResult& r) {
                                 lines[j]->put(io::step_json(i, r));
                               });
      std::string msg;
      for (const auto& tr : fam->traces) msg += (msg.empty() ? "" : "; ") + tr.status;
      return msg;
    });
    if (!fam) return;
    stage("viscous checks", [&] {
      auto r = viscous_griffith_check(*fam, cfg.context.material.kappa2, cfg.checks.griffith_tol);
      out.write_json("viscous_griffith.json", io::viscous_griffith_json(r));
      check("discrete Griffith (all members)", r.pass, "");
      check("dissipation norm trend", r.norm_trend_ok, "", false);
      for (std::size_t j = 0; j < fam->traces.size(); ++j) {
        auto b = viscous_energy_balance(fam->traces[j], cfg.context.loads);
        out.write_json("balance_eps" + std::to_string(j) + ".json", io::balance_json(b));
        out.text("lengths_eps" + std::to_string(j) + ".csv", trace_csv(fam->traces[j]));
      }
      return std::string();
    });
    double dl_min = cfg.search.resolved_dl_min(cfg.context.mesh.h);
    if (fam->traces.size() < 3) {
      man.stages.push_back({"limit", "skipped", 0.0, "needs at least 3 members"});
      const auto& tr = fam->traces.back();
      auto jd = detect_jumps(tr, dl_min);
      parametrize(tr, jd.steps, jump_windows(tr, jd.steps));
      return;
    }
    std::optional<LimitEvolution> lim;
    stage("limit", [&] {
      lim = extract_limit(*fam, cfg.checks.hausdorff_tol, dl_min, cfg.checks.densify_tol,
                          cfg.context.domain.polygon.diameter());
      out.write_json("limit.json", io::limit_json(*lim));
      std::string cert;
      for (double c : lim->certificate) cert += (cert.empty() ? "" : ", ") + fmt(c);
      check("Cauchy certificate", lim->converged, lim->status + " [" + cert + "]");
      return lim->status;
    });
    if (lim) parametrize(lim->limit, lim->jump_steps, lim->jumps);
  }

  void parametrize_mode() {
    auto tr = evolve_single();
    if (!tr) return;
    auto jd = detect_jumps(*tr, cfg.search.resolved_dl_min(cfg.context.mesh.h));
    parametrize(*tr, jd.steps, jump_windows(*tr, jd.steps));
  }
};

}  // namespace

RunManifest run(const ScenarioConfig& config, const RunOptions& options) {
  auto t0 = Clock::now();
  RunMode mode = options.mode.value_or(config.mode);
  int workers = options.workers.value_or(config.workers);
  if (workers < 1) throw InvalidArgument("workers must be at least 1");
  fs::path dir = options.output_dir.value_or(config.output_dir);
  Runner r{config, options, mode, workers, Output(dir), {}};
  r.man.config_hash = sha256_hex(config.source_text);
  r.man.mode = mode_name(mode);
  r.man.units = config.units;
  r.man.output_dir = dir.string();
  r.out.text("config.json", config.source_text);
  switch (mode) {
    case RunMode::SolveOnce: r.solve_once(); break;
    case RunMode::ErrOnly: r.err_only(); break;
    case RunMode::EvolveViscous: r.evolve_single(); break;
    case RunMode::EvolveVV: r.evolve_vv(); break;
    case RunMode::Parametrize: r.parametrize_mode(); break;
  }
  if (r.man.exit_code == 0)
    for (const auto& c : r.man.checks)
      if (c.gating && !c.pass) r.man.exit_code = 4;
  r.out.text("manifest.json", "");  // reserve the name so the index lists it
  r.man.files = r.out.files();
  r.man.seconds = since(t0);
  std::ofstream(dir / "manifest.json", std::ios::binary) << manifest_json(r.man) << "\n";
  return r.man;
}

}  // namespace vvfrac
