#include "json_io.hpp"

#include "vvfrac/error.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace vvfrac {

const char* mode_name(RunMode m) {
  switch (m) {
    case RunMode::SolveOnce: return "solve-once";
    case RunMode::ErrOnly: return "err-only";
    case RunMode::EvolveViscous: return "evolve-viscous";
    case RunMode::EvolveVV: return "evolve-vv";
    case RunMode::Parametrize: return "parametrize";
  }
  return "?";
}

RunMode parse_mode(const std::string& name) {
  for (RunMode m : {RunMode::SolveOnce, RunMode::ErrOnly, RunMode::EvolveViscous, RunMode::EvolveVV,
                    RunMode::Parametrize})
    if (name == mode_name(m)) return m;
  throw ConfigError("unknown mode '" + name +
                    "' (expected solve-once, err-only, evolve-viscous, evolve-vv or parametrize)");
}

TimeGrid ScenarioConfig::grid() const {
  if (!time_nodes.empty()) return TimeGrid{time_nodes};
  return TimeGrid::uniform(context.loads.T, k);
}

double ScenarioConfig::epsilon0() const {
  if (viscosity.epsilon0 > 0.0) return viscosity.epsilon0;
  TimeGrid g = grid();
  return default_epsilon0(context.material.kappa2, g.nodes[1] - g.nodes[0],
                          search.resolved_dl_max(context.mesh.h));
}

namespace {

using io::json;

// Walks the document, collecting every violation instead of stopping at the
// first one.
struct Reader {
  std::vector<std::string>& errors;
  std::string base_dir;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!ok.count(it.key())) fail(path + "." + it.key(), "unknown key");
  }

  const json* object(const json& parent, const char* key, const std::string& path, bool required) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) fail(path + "." + key, "missing required key");
      return nullptr;
    }
    if (!it->is_object()) {
      fail(path + "." + key, "expected an object");
      return nullptr;
    }
    return &*it;
  }

  double number(const json& parent, const char* key, const std::string& path, double def,
                bool required = false) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) fail(path + "." + key, "missing required key");
      return def;
    }
    if (!it->is_number()) {
      fail(path + "." + key, "expected a number");
      return def;
    }
    return it->get<double>();
  }

  int integer(const json& parent, const char* key, const std::string& path, int def) {
    auto it = parent.find(key);
    if (it == parent.end()) return def;
    if (!it->is_number_integer()) {
      fail(path + "." + key, "expected an integer");
      return def;
    }
    return it->get<int>();
  }

  bool boolean(const json& parent, const char* key, const std::string& path, bool def) {
    auto it = parent.find(key);
    if (it == parent.end()) return def;
    if (!it->is_boolean()) {
      fail(path + "." + key, "expected true or false");
      return def;
    }
    return it->get<bool>();
  }

  std::string string(const json& parent, const char* key, const std::string& path,
                     const std::string& def, bool required = false) {
    auto it = parent.find(key);
    if (it == parent.end()) {
      if (required) fail(path + "." + key, "missing required key");
      return def;
    }
    if (!it->is_string()) {
      fail(path + "." + key, "expected a string");
      return def;
    }
    return it->get<std::string>();
  }

  std::vector<double> numbers(const json& v, const std::string& path) {
    std::vector<double> out;
    if (!v.is_array()) {
      fail(path, "expected an array of numbers");
      return out;
    }
    for (const auto& x : v) {
      if (!x.is_number()) {
        fail(path, "expected an array of numbers");
        return {};
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<Vec2> points(const json& v, const std::string& path) {
    std::vector<Vec2> out;
    if (!v.is_array()) {
      fail(path, "expected an array of [x, y] pairs");
      return out;
    }
    for (const auto& p : v) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        fail(path, "expected an array of [x, y] pairs");
        return {};
      }
      out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
  }

  Expression expression(const json& v, const std::string& path) {
    if (v.is_number()) return Expression(v.get<double>());
    if (v.is_string()) {
      try {
        return Expression::parse(v.get<std::string>());
      } catch (const Error& e) {
        fail(path, e.what());
        return Expression();
      }
    }
    fail(path, "expected a number or an expression string");
    return Expression();
  }

  TimeSeries amplitude(const json& v, const std::string& path, double T) {
    if (v.is_number()) return TimeSeries::constant(v.get<double>(), T);
    if (!v.is_object()) {
      fail(path, "expected a number or an object with ramp, constant, samples or file");
      return TimeSeries::constant(0.0, T);
    }
    keys(v, path, {"ramp", "constant", "samples", "file"});
    if (v.size() != 1) {
      fail(path, "give exactly one of ramp, constant, samples or file");
      return TimeSeries::constant(0.0, T);
    }
    if (v.contains("constant")) return TimeSeries::constant(number(v, "constant", path, 0.0), T);
    if (v.contains("ramp")) {
      auto r = numbers(v["ramp"], path + ".ramp");
      if (r.size() != 2) {
        fail(path + ".ramp", "expected [v0, v1]");
        return TimeSeries::constant(0.0, T);
      }
      return TimeSeries::ramp(r[0], r[1], T);
    }
    TimeSeries s;
    if (v.contains("samples")) {
      for (const Vec2& p : points(v["samples"], path + ".samples")) {
        s.t.push_back(p.x());
        s.v.push_back(p.y());
      }
    } else {
      std::string file = v["file"].is_string() ? v["file"].get<std::string>() : "";
      std::filesystem::path fp(file);
      if (fp.is_relative()) fp = std::filesystem::path(base_dir) / fp;
      std::ifstream in(fp);
      if (file.empty() || !in) {
        fail(path + ".file", "cannot read '" + fp.string() + "'");
        return TimeSeries::constant(0.0, T);
      }
      // two comma-separated columns t,v; lines that do not parse (headers) are skipped
      std::string line;
      while (std::getline(in, line)) {
        std::istringstream ls(line);
        double a, b;
        char comma;
        if (ls >> a >> comma >> b && comma == ',') {
          s.t.push_back(a);
          s.v.push_back(b);
        }
      }
    }
    if (s.t.empty()) {
      fail(path, "no amplitude samples");
      return TimeSeries::constant(0.0, T);
    }
    return s;
  }

  VectorField profile(const json& v, const std::string& path) {
    VectorField f;
    if (!v.is_array() || v.size() != 2) {
      fail(path, "expected [x expression, y expression]");
      return f;
    }
    f.x = expression(v[0], path + "[0]");
    f.y = expression(v[1], path + "[1]");
    return f;
  }
};

EdgeKind edge_kind(const std::string& s, bool* ok) {
  *ok = true;
  if (s == "free") return EdgeKind::Free;
  if (s == "dirichlet") return EdgeKind::Dirichlet;
  if (s == "traction") return EdgeKind::Traction;
  *ok = false;
  return EdgeKind::Free;
}

void read_domain(Reader& r, const json& d, ScenarioConfig& c) {
  r.keys(d, "domain", {"vertices", "edges"});
  std::vector<Vec2> pts;
  if (d.contains("vertices"))
    pts = r.points(d["vertices"], "domain.vertices");
  else
    r.fail("domain.vertices", "missing required key");
  std::vector<EdgeKind> kinds;
  if (d.contains("edges") && d["edges"].is_array()) {
    for (std::size_t i = 0; i < d["edges"].size(); ++i) {
      const auto& e = d["edges"][i];
      bool ok = e.is_string();
      EdgeKind k = ok ? edge_kind(e.get<std::string>(), &ok) : EdgeKind::Free;
      if (!ok)
        r.fail("domain.edges[" + std::to_string(i) + "]", "expected free, dirichlet or traction");
      kinds.push_back(k);
    }
  } else {
    r.fail("domain.edges", "missing required array of edge kinds");
  }
  if (pts.size() < 3) {
    if (!pts.empty()) r.fail("domain.vertices", "need at least 3 vertices");
    return;
  }
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
  if (a <= 0.0) {
    r.fail("domain.vertices", "vertices must be listed counter-clockwise");
    return;
  }
  try {
    c.context.domain = DomainSpec(Polygon(pts), kinds);
    c.context.domain.validate();
    if (!c.context.domain.has_dirichlet()) r.fail("domain.edges", "no Dirichlet edge");
  } catch (const Error& e) {
    r.fail("domain", e.what());
  }
}

void read_material(Reader& r, const json& m, ScenarioConfig& c) {
  r.keys(m, "material", {"lambda", "mu", "kappa", "kappa1", "kappa2"});
  auto& mat = c.context.material;
  if (m.contains("lambda")) mat.lambda = ScalarField(r.expression(m["lambda"], "material.lambda"));
  if (m.contains("mu")) mat.mu = ScalarField(r.expression(m["mu"], "material.mu"));
  if (m.contains("kappa")) mat.kappa = ScalarField(r.expression(m["kappa"], "material.kappa"));
  bool constant_kappa = mat.kappa.expr.is_constant();
  double kc = mat.kappa(Vec2::Zero());
  mat.kappa1 = r.number(m, "kappa1", "material", constant_kappa ? kc : 0.0, !constant_kappa);
  mat.kappa2 = r.number(m, "kappa2", "material", constant_kappa ? kc : 0.0, !constant_kappa);
}

void read_crack(Reader& r, const json& cr, ScenarioConfig& c) {
  r.keys(cr, "crack", {"eta", "components", "interior_seeds"});
  c.initial.eta = r.number(cr, "eta", "crack", 0.0, true);
  if (!(c.initial.eta > 0.0) && cr.contains("eta")) r.fail("crack.eta", "must be positive");
  if (cr.contains("components")) {
    if (!cr["components"].is_array()) r.fail("crack.components", "expected an array");
    else
      for (std::size_t i = 0; i < cr["components"].size(); ++i) {
        const auto& comp = cr["components"][i];
        std::string p = "crack.components[" + std::to_string(i) + "]";
        if (!comp.is_object()) {
          r.fail(p, "expected an object");
          continue;
        }
        r.keys(comp, p, {"vertices", "origin"});
        auto pts = comp.contains("vertices") ? r.points(comp["vertices"], p + ".vertices")
                                             : std::vector<Vec2>{};
        std::string origin = r.string(comp, "origin", p, "boundary");
        if (origin != "boundary") r.fail(p + ".origin", "only boundary origins are allowed here; use interior_seeds");
        if (pts.size() < 2) {
          r.fail(p + ".vertices", "need at least 2 vertices");
          continue;
        }
        try {
          auto cc = CrackComponent::from_vertices(pts, OriginKind::BoundaryAnchored);
          cc.validate();
          c.initial.components.push_back(cc);
        } catch (const Error& e) {
          r.fail(p, e.what());
        }
      }
  }
  if (cr.contains("interior_seeds")) {
    if (!cr["interior_seeds"].is_array()) r.fail("crack.interior_seeds", "expected an array");
    else
      for (std::size_t i = 0; i < cr["interior_seeds"].size(); ++i) {
        const auto& seed = cr["interior_seeds"][i];
        std::string p = "crack.interior_seeds[" + std::to_string(i) + "]";
        if (!seed.is_object()) {
          r.fail(p, "expected an object");
          continue;
        }
        r.keys(seed, p, {"vertices", "split"});
        auto pts = seed.contains("vertices") ? r.points(seed["vertices"], p + ".vertices")
                                             : std::vector<Vec2>{};
        int split = r.integer(seed, "split", p, -1);
        if (pts.size() < 3 || split <= 0 || split >= static_cast<int>(pts.size()) - 1) {
          r.fail(p, "need at least 3 vertices and an interior split index");
          continue;
        }
        try {
          auto [a, b] = split_interior_seed(pts, static_cast<std::size_t>(split));
          c.initial.components.push_back(a);
          c.initial.components.push_back(b);
        } catch (const Error& e) {
          r.fail(p, e.what());
        }
      }
  }
  if (c.initial.components.empty()) r.fail("crack", "no crack components");
}

void read_loads(Reader& r, const json& l, ScenarioConfig& c) {
  r.keys(l, "loads", {"w", "f", "g"});
  auto& L = c.context.loads;
  const double T = L.T;
  L.w_profile = VectorField{};
  L.w_amp = TimeSeries::constant(0.0, T);
  L.f_amp = TimeSeries::constant(0.0, T);
  L.g_amp = TimeSeries::constant(0.0, T);
  for (const char* name : {"w", "f", "g"}) {
    std::string p = std::string("loads.") + name;
    const json* o = r.object(l, name, "loads", std::string(name) == "w");
    if (!o) continue;
    r.keys(*o, p, {"profile", "amplitude"});
    VectorField prof;
    if (o->contains("profile"))
      prof = r.profile((*o)["profile"], p + ".profile");
    else
      r.fail(p + ".profile", "missing required key");
    TimeSeries amp = o->contains("amplitude") ? r.amplitude((*o)["amplitude"], p + ".amplitude", T)
                                              : TimeSeries::constant(1.0, T);
    if (*name == 'w') {
      L.w_profile = prof;
      L.w_amp = amp;
    } else if (*name == 'f') {
      L.f_profile = prof;
      L.f_amp = amp;
    } else {
      L.g_profile = prof;
      L.g_amp = amp;
    }
  }
}

void read_search(Reader& r, const json& s, SearchConfig& sc) {
  r.keys(s, "search", {"curvature_factors", "dl_min", "dl_max", "n_lengths", "refine",
                       "stationarity_tol", "max_refine_evals", "morph_range", "max_sweeps"});
  if (s.contains("curvature_factors")) {
    sc.curvature_factors = r.numbers(s["curvature_factors"], "search.curvature_factors");
    if (sc.curvature_factors.empty()) r.fail("search.curvature_factors", "must not be empty");
    for (double f : sc.curvature_factors)
      if (std::abs(f) > 1.0) r.fail("search.curvature_factors", "factors must lie in [-1, 1]");
  }
  sc.dl_min = r.number(s, "dl_min", "search", sc.dl_min);
  sc.dl_max = r.number(s, "dl_max", "search", sc.dl_max);
  if (sc.dl_min < 0.0 || sc.dl_max < 0.0) r.fail("search", "dl_min and dl_max must be >= 0");
  if (sc.dl_min > 0.0 && sc.dl_max > 0.0 && sc.dl_min >= sc.dl_max)
    r.fail("search", "dl_min must be below dl_max");
  sc.n_lengths = r.integer(s, "n_lengths", "search", sc.n_lengths);
  if (sc.n_lengths < 2) r.fail("search.n_lengths", "must be at least 2");
  sc.refine = r.boolean(s, "refine", "search", sc.refine);
  sc.stationarity_tol = r.number(s, "stationarity_tol", "search", sc.stationarity_tol);
  sc.max_refine_evals = r.integer(s, "max_refine_evals", "search", sc.max_refine_evals);
  sc.morph_range = r.number(s, "morph_range", "search", sc.morph_range);
  if (!(sc.morph_range > 0.0 && sc.morph_range < 0.5))
    r.fail("search.morph_range", "must lie in (0, 0.5)");
  sc.max_sweeps = r.integer(s, "max_sweeps", "search", sc.max_sweeps);
}

}  // namespace

ConfigParse parse_config_text(const std::string& text, const std::string& base_dir) {
  ConfigParse out;
  out.config.source_text = text;
  Reader r{out.errors, base_dir};
  json doc;
  try {
    doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    out.errors.push_back(std::string("config is not valid JSON: ") + e.what());
    return out;
  }
  if (!doc.is_object()) {
    out.errors.push_back("config must be a JSON object");
    return out;
  }
  ScenarioConfig& c = out.config;
  r.keys(doc, "config", {"units", "mode", "domain", "material", "crack", "loads", "mesh", "solver",
                         "time", "search", "viscosity", "err", "checks", "workers", "output"});
  c.units = r.string(doc, "units", "config", c.units);
  std::string mode = r.string(doc, "mode", "config", "solve-once");
  try {
    c.mode = parse_mode(mode);
  } catch (const ConfigError& e) {
    r.fail("config.mode", e.what());
  }
  c.workers = r.integer(doc, "workers", "config", 1);
  if (c.workers < 1) r.fail("config.workers", "must be at least 1");

  if (const json* t = r.object(doc, "time", "config", false)) {
    r.keys(*t, "time", {"T", "k", "nodes"});
    c.context.loads.T = r.number(*t, "T", "time", 1.0);
    c.k = r.integer(*t, "k", "time", c.k);
    if (t->contains("nodes")) c.time_nodes = r.numbers((*t)["nodes"], "time.nodes");
  }
  if (!(c.context.loads.T > 0.0)) r.fail("time.T", "must be positive");
  if (c.time_nodes.empty()) {
    if (c.k < 1) r.fail("time.k", "must be at least 1");
  } else {
    try {
      TimeGrid{c.time_nodes}.validate();
      if (std::abs(c.time_nodes.back() - c.context.loads.T) > 1e-12)
        r.fail("time.nodes", "last node must equal T");
    } catch (const Error& e) {
      r.fail("time.nodes", e.what());
    }
  }

  if (const json* d = r.object(doc, "domain", "config", true)) read_domain(r, *d, c);
  if (const json* m = r.object(doc, "material", "config", false)) read_material(r, *m, c);
  if (const json* cr = r.object(doc, "crack", "config", true)) read_crack(r, *cr, c);
  if (const json* l = r.object(doc, "loads", "config", true)) read_loads(r, *l, c);

  if (const json* m = r.object(doc, "mesh", "config", true)) {
    r.keys(*m, "mesh", {"h", "tip_grading", "grading_rings", "quality"});
    auto& mo = c.context.mesh;
    mo.h = r.number(*m, "h", "mesh", mo.h, true);
    mo.tip_grading = r.number(*m, "tip_grading", "mesh", mo.tip_grading);
    mo.grading_rings = r.number(*m, "grading_rings", "mesh", mo.grading_rings);
    mo.quality = r.number(*m, "quality", "mesh", mo.quality);
    if (!(mo.h > 0.0)) r.fail("mesh.h", "must be positive");
    if (!(mo.tip_grading >= 1.0)) r.fail("mesh.tip_grading", "must be >= 1");
    if (!(mo.quality >= 1.2)) r.fail("mesh.quality", "must be >= 1.2");
  }
  if (const json* s = r.object(doc, "solver", "config", false)) {
    r.keys(*s, "solver", {"iterative", "rtol"});
    c.context.solver.iterative = r.boolean(*s, "iterative", "solver", false);
    c.context.solver.rtol = r.number(*s, "rtol", "solver", c.context.solver.rtol);
  }
  if (const json* s = r.object(doc, "search", "config", false)) read_search(r, *s, c.search);
  if (const json* v = r.object(doc, "viscosity", "config", false)) {
    r.keys(*v, "viscosity", {"epsilon", "epsilon0", "members"});
    c.viscosity.epsilon = r.number(*v, "epsilon", "viscosity", 0.0);
    c.viscosity.epsilon0 = r.number(*v, "epsilon0", "viscosity", 0.0);
    c.viscosity.members = r.integer(*v, "members", "viscosity", c.viscosity.members);
    if (c.viscosity.epsilon < 0.0 || c.viscosity.epsilon0 < 0.0)
      r.fail("viscosity", "epsilon values must be positive (0 selects the default)");
    if (c.viscosity.members < 1) r.fail("viscosity.members", "must be at least 1");
  }
  if (const json* e = r.object(doc, "err", "config", false)) {
    r.keys(*e, "err", {"t", "radius_factors", "fd_delta", "fd_radius_fraction", "fd_remesh",
                       "oracle_tol", "cutoff_tol", "positivity_rel"});
    auto& es = c.err;
    es.t = r.number(*e, "t", "err", es.t);
    if (e->contains("radius_factors")) {
      es.radius_factors = r.numbers((*e)["radius_factors"], "err.radius_factors");
      if (es.radius_factors.size() < 2) r.fail("err.radius_factors", "need at least two factors");
      for (double f : es.radius_factors)
        if (!(f > 0.0)) r.fail("err.radius_factors", "factors must be positive");
    }
    es.fd_delta = r.number(*e, "fd_delta", "err", es.fd_delta);
    if (!(es.fd_delta > 0.0)) r.fail("err.fd_delta", "must be positive");
    es.fd_radius_fraction = r.number(*e, "fd_radius_fraction", "err", es.fd_radius_fraction);
    es.fd_remesh = r.boolean(*e, "fd_remesh", "err", es.fd_remesh);
    es.oracle_tol = r.number(*e, "oracle_tol", "err", es.oracle_tol);
    es.cutoff_tol = r.number(*e, "cutoff_tol", "err", es.cutoff_tol);
    es.positivity_rel = r.number(*e, "positivity_rel", "err", es.positivity_rel);
  }
  if (const json* k = r.object(doc, "checks", "config", false)) {
    r.keys(*k, "checks", {"griffith_tol", "hausdorff_tol", "densify_tol", "slope_floor",
                          "param_tol", "plateau_samples"});
    auto& ck = c.checks;
    ck.griffith_tol = r.number(*k, "griffith_tol", "checks", ck.griffith_tol);
    ck.hausdorff_tol = r.number(*k, "hausdorff_tol", "checks", ck.hausdorff_tol);
    ck.densify_tol = r.number(*k, "densify_tol", "checks", ck.densify_tol);
    ck.slope_floor = r.number(*k, "slope_floor", "checks", ck.slope_floor);
    ck.param_tol = r.number(*k, "param_tol", "checks", ck.param_tol);
    ck.plateau_samples = r.integer(*k, "plateau_samples", "checks", ck.plateau_samples);
    if (!(ck.densify_tol > 0.0)) r.fail("checks.densify_tol", "must be positive");
    if (ck.plateau_samples < 0) r.fail("checks.plateau_samples", "must be >= 0");
  }
  if (const json* o = r.object(doc, "output", "config", false)) {
    r.keys(*o, "output", {"dir"});
    c.output_dir = r.string(*o, "dir", "output", c.output_dir);
  }

  // hypotheses on the data, checked for every piece that parsed
  const bool have_domain = c.context.domain.polygon.num_edges() >= 3;
  auto guarded = [&](const char* what, auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      out.errors.push_back(std::string(what) + ": " + e.what());
    }
  };
  if (have_domain)
    guarded("material", [&] {
      for (auto& e : c.context.material.validate(c.context.domain.polygon))
        out.errors.push_back("material: " + e);
    });
  guarded("loads", [&] {
    for (auto& e : c.context.loads.validate()) out.errors.push_back("loads: " + e);
  });
  if (have_domain && c.initial.M() > 0 && c.initial.eta > 0.0)
    guarded("crack", [&] {
      auto adm = check_admissible(c.initial, c.context.domain.polygon);
      for (const auto& st : adm.constraints)
        if (!st.ok)
          out.errors.push_back(std::string("crack: admissibility (") + st.id + ") " + st.name +
                               " violated: " + st.detail);
    });
  return out;
}

ConfigParse parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigParse out;
    out.errors.push_back("cannot read config file '" + path + "'");
    return out;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  std::string base = std::filesystem::path(path).parent_path().string();
  return parse_config_text(ss.str(), base.empty() ? "." : base);
}

ScenarioConfig parse_config(const std::string& path) {
  ConfigParse p = parse_config_file(path);
  if (!p.ok()) {
    std::string msg = "invalid config '" + path + "':";
    for (const auto& e : p.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return std::move(p.config);
}

namespace io {

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec_json(const Vec2& p) { return json::array({p.x(), p.y()}); }

json crack_json(const CrackSet& c) {
  json comps = json::array();
  for (const auto& comp : c.components) {
    json pts = json::array();
    for (const auto& p : comp.vertices) pts.push_back(vec_json(p));
    comps.push_back({{"origin", comp.origin_kind == OriginKind::BoundaryAnchored ? "boundary" : "interior"},
                     {"vertices", pts},
                     {"length", comp.length()}});
  }
  return {{"eta", c.eta}, {"components", comps}};
}

json energy_json(const EnergyReport& e) {
  return {{"strain", e.strain},   {"body_work", e.body_work}, {"traction_work", e.traction_work},
          {"elastic", e.elastic}, {"surface", e.surface},     {"total", e.total}};
}

json powers_json(const LoadPowers& p) {
  return {{"stiffness_w", p.stiffness_w}, {"body_u", p.body_u},
          {"traction_u", p.traction_u},   {"body_w", p.body_w},
          {"traction_w", p.traction_w},   {"lift_energy", p.lift_energy}};
}

namespace {
json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}
json points(const std::vector<Vec2>& v) {
  json a = json::array();
  for (const auto& p : v) a.push_back(vec_json(p));
  return a;
}
}  // namespace

json state_json(const StateRecord& s) {
  return {{"t", s.t},
          {"lengths", nums(s.lengths)},
          {"tips", points(s.tips)},
          {"G", nums(s.G)},
          {"kappa_tip", nums(s.kappa_tip)},
          {"energy", energy_json(s.energy)},
          {"powers", powers_json(s.powers)},
          {"crack", crack_json(s.crack)}};
}

json step_json(std::size_t i, const IncrementalStepResult& r) {
  json j = state_json(r.state);
  j["i"] = i;
  j["dl"] = nums(r.dl);
  j["curvature"] = nums(r.curvature);
  j["objective"] = num(r.objective);
  j["null_objective"] = num(r.null_objective);
  j["clearance_stop"] = r.clearance_stop;
  if (!r.note.empty()) j["note"] = r.note;
  json cands = json::array();
  for (const auto& c : r.log)
    cands.push_back({{"tip", c.tip}, {"dl", c.dl}, {"curvature", c.curvature},
                     {"objective", num(c.objective)}, {"kind", c.kind}, {"ok", c.ok},
                     {"note", c.note}});
  j["candidates"] = cands;
  return j;
}

json err_entry_json(const ErrEntry& e) {
  return {{"tip", e.tip},
          {"G", num(e.G)},
          {"material_term", e.material_term},
          {"convection_term", e.convection_term},
          {"dilation_term", e.dilation_term},
          {"force_term", e.force_term},
          {"radius", e.radius},
          {"feasible", e.feasible},
          {"note", e.note}};
}

namespace {
json griffith_entry(const GriffithEntry& e) {
  return {{"step", e.step},     {"tip", e.tip},         {"dl", e.dl},   {"rate", e.rate},
          {"kappa", e.kappa},   {"G", num(e.G)},        {"driving", num(e.driving)},
          {"scale", e.scale},   {"g1", e.g1},           {"g2", e.g2},   {"g3", e.g3}};
}
}  // namespace

json griffith_json(const DiscreteGriffithReport& r) {
  json entries = json::array(), failures = json::array();
  for (const auto& e : r.entries) entries.push_back(griffith_entry(e));
  for (const auto& e : r.failures) failures.push_back(griffith_entry(e));
  return {{"pass", r.pass},
          {"tol", r.tol},
          {"max_g2_violation", num(r.max_g2_violation)},
          {"max_g3_residual", num(r.max_g3_residual)},
          {"entries", entries},
          {"failures", failures}};
}

json balance_json(const BalanceReport& r) {
  return {{"t", nums(r.t)},
          {"residual", nums(r.residual)},
          {"work", nums(r.work)},
          {"dissipation", nums(r.dissipation)},
          {"bound_lhs", nums(r.bound_lhs)},
          {"bound_rhs", nums(r.bound_rhs)},
          {"max_abs_residual", num(r.max_abs_residual)},
          {"work_scale", num(r.work_scale)},
          {"relative_residual", num(r.relative_residual)},
          {"min_bound_margin", num(r.min_bound_margin)}};
}

json viscous_griffith_json(const ViscousGriffithReport& r) {
  json members = json::array();
  for (const auto& m : r.members) members.push_back(griffith_json(m));
  return {{"pass", r.pass},
          {"norm_trend_ok", r.norm_trend_ok},
          {"dissipation_norm", nums(r.dissipation_norm)},
          {"members", members}};
}

json limit_json(const LimitEvolution& l) {
  json jumps = json::array();
  for (const auto& w : l.jumps)
    jumps.push_back({{"first_step", w.first_step},
                     {"last_step", w.last_step},
                     {"t_before", w.t_before},
                     {"t_jump", w.t_jump},
                     {"mass", nums(w.mass)}});
  json steps = json::array();
  for (std::size_t i = 0; i < l.jump_steps.size(); ++i)
    if (l.jump_steps[i]) steps.push_back(i);
  return {{"status", l.status},
          {"converged", l.converged},
          {"epsilon", l.limit.epsilon},
          {"certificate", nums(l.certificate)},
          {"jump_threshold", l.jump_threshold},
          {"jump_steps", steps},
          {"jumps", jumps}};
}

json param_trace_json(const ParametrizedTrace& p) {
  json pieces = json::array();
  for (const auto& q : p.pieces)
    pieces.push_back({{"sigma0", q.sigma0},
                      {"sigma1", q.sigma1},
                      {"t0", q.t0},
                      {"t1", q.t1},
                      {"tprime", q.tprime},
                      {"lprime", nums(q.lprime)},
                      {"plateau", q.plateau}});
  json samples = json::array();
  for (const auto& s : p.samples)
    samples.push_back({{"sigma", s.sigma},
                       {"t", s.t},
                       {"piece", s.piece},
                       {"plateau", s.plateau},
                       {"resolved", s.resolved},
                       {"lengths", nums(s.lengths)},
                       {"tips", points(s.tips)},
                       {"G", nums(s.G)},
                       {"kappa_tip", nums(s.kappa_tip)},
                       {"tprime", s.tprime},
                       {"lprime", nums(s.lprime)},
                       {"energy", energy_json(s.energy)}});
  return {{"epsilon", p.epsilon}, {"S", p.S}, {"pieces", pieces}, {"samples", samples}};
}

json param_griffith_json(const ParamGriffithReport& r) {
  json v = json::array();
  for (const auto& x : r.violations)
    v.push_back({{"sample", x.sample}, {"clause", x.clause}, {"detail", x.detail}});
  return {{"pass", r.pass},
          {"slope_floor", r.slope_floor},
          {"tol", r.tol},
          {"max_identity_error", r.max_identity_error},
          {"plateau_length", r.plateau_length},
          {"plateau_min_margin", num(r.plateau_min_margin)},
          {"violations", v},
          {"balance_residual", nums(r.balance_residual)},
          {"max_balance_residual", num(r.max_balance_residual)},
          {"work_scale", num(r.work_scale)}};
}

}  // namespace io
}  // namespace vvfrac
