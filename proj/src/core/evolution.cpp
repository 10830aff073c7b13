#include "vvfrac/evolution.hpp"

#include "vvfrac/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace vvfrac {

TimeGrid TimeGrid::uniform(double T, int k) {
  if (!(T > 0.0) || k < 1) throw InvalidArgument("time grid needs T > 0 and k >= 1");
  TimeGrid g;
  g.nodes.resize(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) g.nodes[static_cast<std::size_t>(i)] = T * i / k;
  g.nodes.back() = T;
  return g;
}

void TimeGrid::validate() const {
  if (nodes.size() < 2) throw InvalidArgument("time grid needs at least two nodes");
  if (nodes.front() != 0.0) throw InvalidArgument("time grid must start at 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1])) throw InvalidArgument("time grid must be strictly increasing");
}

TimeGrid TimeGrid::refined() const {
  TimeGrid g;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) g.nodes.push_back(0.5 * (nodes[i - 1] + nodes[i]));
    g.nodes.push_back(nodes[i]);
  }
  return g;
}

std::vector<double> SearchConfig::length_grid(double h) const {
  double lo = resolved_dl_min(h), hi = resolved_dl_max(h);
  if (!(lo > 0.0) || hi < lo) throw InvalidArgument("invalid candidate length range");
  int n = std::max(1, n_lengths);
  std::vector<double> out;
  if (n == 1 || hi == lo) return {lo};
  for (int j = 0; j < n; ++j) out.push_back(lo * std::pow(hi / lo, static_cast<double>(j) / (n - 1)));
  out.back() = hi;
  return out;
}

double LoadPowers::power(const LoadTrajectory& loads, double t, bool right) const {
  double dw = loads.w_amp.rate(t, right);
  double p = dw * stiffness_w;
  if (loads.has_body_force())
    p -= loads.f_amp.rate(t, right) * body_u + loads.f_amp.at(t) * dw * body_w;
  if (loads.has_traction())
    p -= loads.g_amp.rate(t, right) * traction_u + loads.g_amp.at(t) * dw * traction_w;
  return p;
}

double default_epsilon0(double kappa2, double dt, double dl_max) {
  if (!(dl_max > 0.0) || !(dt > 0.0)) throw InvalidArgument("epsilon0 needs dt > 0 and dl_max > 0");
  return 2.0 * kappa2 * dt / dl_max;
}

namespace {

using detail::parallel_for;

struct Solved {
  std::unique_ptr<CrackedMesh> mesh;
  std::unique_ptr<ElasticitySolver> solver;
  DisplacementField u;
};

Solved solve_mesh(const EvolutionContext& ctx, CrackedMesh mesh, double t) {
  Solved s;
  s.mesh = std::make_unique<CrackedMesh>(std::move(mesh));
  s.solver = std::make_unique<ElasticitySolver>(*s.mesh, ctx.material, ctx.solver);
  s.u = s.solver->solve(ctx.loads, t);
  return s;
}

Solved solve_fresh(const EvolutionContext& ctx, const CrackSet& crack, double t) {
  return solve_mesh(ctx, build_mesh(ctx.domain, crack, ctx.mesh), t);
}

LoadTrajectory unit_amplitudes(const LoadTrajectory& loads) {
  LoadTrajectory u = loads;
  u.w_amp = TimeSeries::constant(1.0, loads.T);
  u.f_amp = TimeSeries::constant(1.0, loads.T);
  u.g_amp = TimeSeries::constant(1.0, loads.T);
  return u;
}

// Strain energy and load work; the surface part is added by the caller.
EnergyReport elastic_energies(const Solved& s, const LoadTrajectory& loads, double t) {
  EnergyReport r;
  r.strain = s.solver->strain_energy(s.u.u);
  if (loads.has_body_force()) {
    LoadTrajectory body = loads;
    body.g_profile = VectorField{};
    r.body_work = s.solver->load_vector(body, t).dot(s.u.u);
  }
  if (loads.has_traction()) {
    LoadTrajectory trac = loads;
    trac.f_profile = VectorField{};
    r.traction_work = s.solver->load_vector(trac, t).dot(s.u.u);
  }
  r.elastic = r.strain - r.body_work - r.traction_work;
  return r;
}

LoadPowers load_powers(const Solved& s, const LoadTrajectory& loads) {
  LoadTrajectory unit = unit_amplitudes(loads);
  LoadPowers p;
  Eigen::VectorXd W = s.solver->dirichlet_lift(unit, 0.0);
  Eigen::VectorXd KW = s.solver->stiffness() * W;
  p.stiffness_w = s.u.u.dot(KW);
  p.lift_energy = 0.5 * W.dot(KW);
  if (loads.has_body_force()) {
    LoadTrajectory body = unit;
    body.g_profile = VectorField{};
    Eigen::VectorXd Fb = s.solver->load_vector(body, 0.0);
    p.body_u = Fb.dot(s.u.u);
    p.body_w = Fb.dot(W);
  }
  if (loads.has_traction()) {
    LoadTrajectory trac = unit;
    trac.f_profile = VectorField{};
    Eigen::VectorXd Ft = s.solver->load_vector(trac, 0.0);
    p.traction_u = Ft.dot(s.u.u);
    p.traction_w = Ft.dot(W);
  }
  return p;
}

double tip_G(const Solved& s, const EvolutionContext& ctx, const CrackSet& crack, double t,
             std::size_t m) {
  double r = default_radius(*s.mesh, crack, m, ctx.domain.polygon);
  auto v = build_velocity_field(*s.mesh, crack, m, r, ctx.domain.polygon);
  return energy_release_rate(s.u, ctx.material, ctx.loads, t, crack, m, v).G;
}

// Fills a record from a solved state. Entries of G_known that are not NaN are
// taken as given; the others are evaluated with the default cutoff.
StateRecord make_record(const Solved& s, const EvolutionContext& ctx, const CrackSet& crack,
                        double t, const std::vector<double>& G_known) {
  StateRecord r;
  r.t = t;
  r.crack = crack;
  r.lengths = crack.lengths();
  r.energy = elastic_energies(s, ctx.loads, t);
  r.energy.surface = surface_energy(crack, ctx.material);
  r.energy.total = r.energy.elastic + r.energy.surface;
  r.powers = load_powers(s, ctx.loads);
  for (std::size_t m = 0; m < crack.M(); ++m) {
    const Vec2& tip = crack.components[m].tip();
    r.tips.push_back(tip);
    r.kappa_tip.push_back(ctx.material.kappa(tip));
    double G = m < G_known.size() ? G_known[m] : std::numeric_limits<double>::quiet_NaN();
    if (std::isnan(G)) {
      try {
        G = tip_G(s, ctx, crack, t, m);
      } catch (const InfeasibleRadiusError&) {
        G = std::numeric_limits<double>::quiet_NaN();
      }
    }
    r.G.push_back(G);
  }
  return r;
}

struct TipMove {
  double x = 0.0;  // added length
  double c = 0.0;  // curvature
};

CrackSet assemble(const CrackSet& prev, const std::vector<TipMove>& moves) {
  CrackSet out = prev;
  for (std::size_t m = 0; m < prev.M(); ++m)
    if (moves[m].x > 0.0)
      out.components[m] = prev.components[m].extended(moves[m].x, moves[m].c, prev.eta);
  return out;
}

// Samples of G along one extension path (fixed curvature) of one tip. The
// elastic energy along the path is reconstructed as E(x) = E(0) - int_0^x G,
// which is far less sensitive to remeshing than energies of separate meshes.
struct Path {
  double c = 0.0;
  double E0 = 0.0;
  std::vector<std::pair<double, double>> samples;  // (x, G), x = 0 included

  void add(double x, double G) {
    auto it = std::lower_bound(samples.begin(), samples.end(), std::make_pair(x, -1e300));
    if (it != samples.end() && it->first == x) {
      it->second = G;
      return;
    }
    samples.insert(it, {x, G});
  }
  double energy_at(double x) const {
    double E = E0;
    for (std::size_t k = 1; k < samples.size(); ++k) {
      auto [xa, Ga] = samples[k - 1];
      auto [xb, Gb] = samples[k];
      if (x <= xa) break;
      double xe = std::min(x, xb);
      double Ge = Ga + (Gb - Ga) * (xe - xa) / (xb - xa);
      E -= 0.5 * (Ga + Ge) * (xe - xa);
    }
    if (!samples.empty() && x > samples.back().first)
      E -= samples.back().second * (x - samples.back().first);
    return E;
  }
};

struct RefineResult {
  bool ok = false;
  double x = 0.0;
  double G = 0.0;
  double D = 0.0;
  bool at_limit = false;
  bool converged = false;
  int evals = 0;
  std::string note;
  std::shared_ptr<Solved> solved;
};

struct TipSearch {
  const CrackSet& prev;
  const std::vector<TipMove>& moves;
  std::size_t m;
  double t;
  double dt;
  double eps;
  const SearchConfig& search;
  const EvolutionContext& ctx;
  std::vector<CandidateRecord>& log;

  double others_penalty() const {
    double p = 0.0;
    for (std::size_t j = 0; j < moves.size(); ++j)
      if (j != m) p += moves[j].x * moves[j].x;
    return p;
  }
  CrackSet crack_with(double x, double c) const {
    std::vector<TipMove> mv = moves;
    mv[m] = {x, c};
    return assemble(prev, mv);
  }
  double objective(const Path& p, double x) const {
    CrackSet cx = crack_with(x, p.c);
    return p.energy_at(x) + surface_energy(cx, ctx.material) +
           0.5 * eps / dt * (others_penalty() + x * x);
  }
  double drive(double x, double c, double G) const {
    CrackSet cx = crack_with(x, c);
    return ctx.material.kappa(cx.components[m].tip()) - G + eps * x / dt;
  }
  double tip_G(const Solved& s, const CrackSet& crack, double c) const {
    double r = default_radius(*s.mesh, crack, m, ctx.domain.polygon);
    auto v = build_velocity_field(*s.mesh, crack, m, r, ctx.domain.polygon, c);
    return energy_release_rate(s.u, ctx.material, ctx.loads, t, crack, m, v).G;
  }
};

struct MorphPoint {
  double s = 0.0;
  double D = 0.0;
  double G = 0.0;
  std::shared_ptr<Solved> solved;
};

// Solves D(x) = kappa(tip) - G + eps x / dt = 0 along the arc of curvature
// p.c, starting at added length x0. Within a trust range around a base the
// mesh is moved by s * rho (rho the velocity field of the base), which makes G
// the exact derivative of the discrete energy along the move; beyond it the
// base is rebuilt on a fresh mesh. Every evaluated G is added to the path.
RefineResult refine(const TipSearch& ts, Path& path, double x0, double upper,
                    std::shared_ptr<Solved> base) {
  RefineResult res;
  const double c = path.c;
  const double tolD = ts.search.stationarity_tol * ts.ctx.material.kappa2;
  const double tiny = 1e-12 * std::max(1.0, ts.ctx.domain.polygon.diameter());
  double xb = std::clamp(x0, 0.0, upper);
  if (xb != x0) base.reset();
  for (int rebase = 0; rebase < 40; ++rebase) {
    CrackSet cb = ts.crack_with(xb, c);
    if (!base) base = std::make_shared<Solved>(solve_fresh(ts.ctx, cb, ts.t));
    double r = default_radius(*base->mesh, cb, ts.m, ts.ctx.domain.polygon);
    VelocityField vf = build_velocity_field(*base->mesh, cb, ts.m, r, ts.ctx.domain.polygon, c);
    const double R = ts.search.morph_range * r;

    auto eval = [&](double s) {
      MorphPoint p;
      p.s = s;
      double x = xb + s;
      std::shared_ptr<Solved> sv = base;
      if (s != 0.0) {
        std::vector<Vec2> disp(vf.nodal.size());
        for (std::size_t n = 0; n < disp.size(); ++n) disp[n] = s * vf.nodal[n];
        sv = std::make_shared<Solved>(solve_mesh(ts.ctx, base->mesh->morphed(disp), ts.t));
      }
      p.G = domain_integral(sv->u, ts.ctx.material, ts.ctx.loads, ts.t, vf.nodal).G;
      p.D = ts.drive(x, c, p.G);
      p.solved = sv;
      ++res.evals;
      if (s != 0.0 || rebase > 0) path.add(x, p.G);
      return p;
    };
    auto finish = [&](const MorphPoint& p, bool converged) {
      res.ok = true;
      res.x = xb + p.s;
      res.G = p.G;
      res.D = p.D;
      res.converged = converged;
      res.solved = p.solved;
      return res;
    };

    MorphPoint p0 = eval(0.0);
    if (std::abs(p0.D) <= tolD) return finish(p0, true);
    MorphPoint lo, hi;
    if (p0.D < 0.0) {
      double s1 = std::min(R, upper - xb);
      if (s1 <= tiny) {
        res.at_limit = true;
        return finish(p0, false);
      }
      MorphPoint p1 = eval(s1);
      if (p1.D < 0.0) {
        if (xb + s1 >= upper - tiny) {
          res.at_limit = true;
          return finish(p1, false);
        }
        xb += s1;
        base.reset();
        continue;
      }
      lo = p0;
      hi = p1;
    } else {
      if (xb <= tiny) return finish(p0, true);  // growth is not favorable at the start
      double s1 = -std::min(R, xb);
      MorphPoint p1 = eval(s1);
      if (p1.D > 0.0) {
        if (xb + s1 <= tiny) {
          res.note = "no stationary point before the start";
          return finish(p1, true);
        }
        xb += s1;
        base.reset();
        continue;
      }
      lo = p1;
      hi = p0;
    }
    // Illinois regula falsi on the bracket lo.D < 0 < hi.D
    MorphPoint best = std::abs(lo.D) < std::abs(hi.D) ? lo : hi;
    int side = 0;
    while (res.evals < ts.search.max_refine_evals) {
      double s = (lo.s * hi.D - hi.s * lo.D) / (hi.D - lo.D);
      if (!(s > lo.s && s < hi.s)) s = 0.5 * (lo.s + hi.s);
      MorphPoint p = eval(s);
      if (std::abs(p.D) < std::abs(best.D)) best = p;
      if (std::abs(p.D) <= tolD || hi.s - lo.s <= tiny) return finish(best, true);
      if (p.D < 0.0) {
        lo = p;
        if (side == -1) hi.D *= 0.5;
        side = -1;
      } else {
        hi = p;
        if (side == 1) lo.D *= 0.5;
        side = 1;
      }
    }
    res.note = "refinement budget exhausted";
    return finish(best, false);
  }
  res.note = "too many rebases";
  return res;
}

struct TipOutcome {
  TipMove move;
  double objective = 0.0;
  double null_objective = 0.0;
  double G = std::numeric_limits<double>::quiet_NaN();  // at the chosen state
  bool at_limit = false;
  bool infeasible = false;
  std::string note;
  std::shared_ptr<Solved> solved;
};

bool better(const CandidateRecord& a, const CandidateRecord& b) {
  if (a.objective < b.objective - 1e-12) return true;
  if (a.objective > b.objective + 1e-12) return false;
  if (a.dl != b.dl) return a.dl < b.dl;
  return std::abs(a.curvature) < std::abs(b.curvature);
}

TipOutcome search_tip(TipSearch& ts) {
  const EvolutionContext& ctx = ts.ctx;
  const double h = ctx.mesh.h;
  const double eta = ts.prev.eta;
  TipOutcome out;

  CrackSet c0 = ts.crack_with(0.0, 0.0);
  auto s0 = std::make_shared<Solved>(solve_fresh(ctx, c0, ts.t));
  const double E0 = elastic_energies(*s0, ctx.loads, ts.t).elastic;
  const double obj0 = E0 + surface_energy(c0, ctx.material) + 0.5 * ts.eps / ts.dt * ts.others_penalty();
  out.null_objective = obj0;
  double G0;
  try {
    G0 = ts.tip_G(*s0, c0, 0.0);
  } catch (const InfeasibleRadiusError& ex) {
    out.infeasible = true;
    out.note = ex.what();
    return out;
  }

  // grid candidates, one path per curvature
  std::vector<double> lengths = ts.search.length_grid(h);
  const double dl_min = ts.search.resolved_dl_min(h), dl_max = ts.search.resolved_dl_max(h);
  std::vector<Path> paths;
  std::vector<double> limits;
  std::vector<CandidateRecord> cands;
  std::vector<std::size_t> cand_path;
  for (double f : ts.search.curvature_factors) {
    Path p;
    p.c = f / eta;
    p.E0 = E0;
    p.samples.push_back({0.0, G0});
    double lim = max_admissible_extension(c0, ts.m, p.c, ctx.domain.polygon, dl_max, 1e-3 * dl_min);
    for (double l : lengths)
      if (l <= lim) {
        cands.push_back({ts.m, l, p.c, 0.0, "grid", true, ""});
        cand_path.push_back(paths.size());
      }
    if (lim >= dl_min && lim < dl_max * (1.0 - 1e-9)) {
      bool dup = false;
      for (double l : lengths) dup = dup || std::abs(l - lim) <= 1e-9 * dl_max;
      if (!dup) {
        cands.push_back({ts.m, lim, p.c, 0.0, "limit", true, ""});
        cand_path.push_back(paths.size());
      }
    }
    paths.push_back(p);
    limits.push_back(lim);
  }
  std::vector<double> cand_G(cands.size(), 0.0);
  parallel_for(cands.size(), ts.search.workers, [&](std::size_t i) {
    auto& cd = cands[i];
    try {
      CrackSet cc = ts.crack_with(cd.dl, cd.curvature);
      Solved s = solve_fresh(ctx, cc, ts.t);
      cand_G[i] = ts.tip_G(s, cc, cd.curvature);
    } catch (const Error& ex) {
      cd.ok = false;
      cd.note = ex.what();
    }
  });
  // a failed evaluation cuts its path: longer candidates on it cannot be reached
  std::vector<double> cut(paths.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (!cands[i].ok) cut[cand_path[i]] = std::min(cut[cand_path[i]], cands[i].dl);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (cands[i].dl >= cut[cand_path[i]]) {
      if (cands[i].ok) cands[i].note = "beyond a failed evaluation";
      cands[i].ok = false;
      continue;
    }
    paths[cand_path[i]].add(cands[i].dl, cand_G[i]);
  }
  auto score = [&]() {
    for (std::size_t i = 0; i < cands.size(); ++i)
      cands[i].objective = cands[i].ok ? ts.objective(paths[cand_path[i]], cands[i].dl)
                                       : std::numeric_limits<double>::infinity();
  };
  score();

  const CandidateRecord* best = nullptr;
  for (const auto& cd : cands)
    if (cd.ok && (!best || better(cd, *best))) best = &cd;
  const bool grid_wins = best && best->objective < obj0;
  std::size_t pi = 0;  // path of the refinement
  double x0 = 0.0;
  if (grid_wins) {
    pi = cand_path[static_cast<std::size_t>(best - cands.data())];
    x0 = best->dl;
  } else {
    // direction of the most favorable first step
    const CandidateRecord* first = nullptr;
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (cands[i].ok && cands[i].dl == lengths.front() && (!first || better(cands[i], *first))) {
        first = &cands[i];
        pi = cand_path[i];
      }
  }

  auto choose_null = [&](const std::string& note) {
    out.move = {0.0, 0.0};
    out.objective = obj0;
    out.solved = s0;
    out.G = G0;
    out.note = note;
  };
  auto log_all = [&]() {
    ts.log.push_back({ts.m, 0.0, 0.0, obj0, "null", true, ""});
    for (const auto& cd : cands) ts.log.push_back(cd);
  };

  if (!ts.search.refine) {
    if (!grid_wins) {
      choose_null("null");
    } else {
      out.move = {best->dl, best->curvature};
      out.objective = best->objective;
      out.at_limit = best->kind == "limit";
      CrackSet cc = ts.crack_with(best->dl, best->curvature);
      out.solved = std::make_shared<Solved>(solve_fresh(ctx, cc, ts.t));
      out.G = ts.tip_G(*out.solved, cc, best->curvature);
    }
    log_all();
    return out;
  }

  RefineResult rr;
  try {
    rr = refine(ts, paths[pi], x0, limits[pi], x0 == 0.0 ? s0 : nullptr);
  } catch (const InfeasibleRadiusError& ex) {
    rr.ok = false;
    rr.note = ex.what();
    if (!grid_wins) {
      log_all();
      out.infeasible = true;
      out.note = ex.what();
      return out;
    }
  } catch (const Error& ex) {
    rr.ok = false;
    rr.note = ex.what();
  }
  score();
  log_all();
  if (!rr.ok) {
    // no stationary point could be located; report the blocked tip
    out.infeasible = true;
    out.note = "refinement failed: " + rr.note;
    return out;
  }
  double obj = ts.objective(paths[pi], rr.x);
  ts.log.push_back({ts.m, rr.x, paths[pi].c, obj, "refine", true, rr.note});
  if (rr.x <= 0.0 || obj > obj0) {
    choose_null(rr.x <= 0.0 ? rr.note : "refined point above null");
    return out;
  }
  out.move = {rr.x, paths[pi].c};
  out.objective = obj;
  out.G = rr.G;
  out.at_limit = rr.at_limit && rr.D < 0.0;
  out.solved = rr.solved;
  out.note = rr.note;
  return out;
}

}  // namespace

StateRecord evaluate_state(const EvolutionContext& ctx, const CrackSet& crack, double t) {
  Solved s = solve_fresh(ctx, crack, t);
  return make_record(s, ctx, crack, t, {});
}

IncrementalStepResult incremental_step(const CrackSet& prev, double t_prev, double t_cur,
                                       double eps, const SearchConfig& search,
                                       const EvolutionContext& ctx) {
  if (!(t_cur > t_prev)) throw InvalidArgument("incremental step needs t_cur > t_prev");
  if (!(eps > 0.0)) throw InvalidArgument("viscosity must be positive");
  for (double f : search.curvature_factors)
    if (std::abs(f) > 1.0 + 1e-12) throw InvalidArgument("curvature factors must lie in [-1, 1]");
  const double dt = t_cur - t_prev;
  const std::size_t M = prev.M();

  IncrementalStepResult res;
  std::vector<TipMove> moves(M);
  std::vector<TipOutcome> last(M);
  const int sweeps = M == 1 ? 1 : std::max(1, search.max_sweeps);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    bool changed = false;
    for (std::size_t m = 0; m < M; ++m) {
      TipSearch ts{prev, moves, m, t_cur, dt, eps, search, ctx, res.log};
      TipOutcome o = search_tip(ts);
      if (sweep == 0 && m == 0) res.null_objective = res.log.front().objective;
      if (o.infeasible || o.at_limit) {
        res.clearance_stop = true;
        std::ostringstream os;
        os << "tip " << m << ": "
           << (o.infeasible ? o.note : "growth blocked by the admissibility limit");
        res.note = os.str();
        res.state.t = t_cur;
        res.state.crack = assemble(prev, moves);
        return res;
      }
      if (std::abs(o.move.x - moves[m].x) > 1e-12 || o.move.c != moves[m].c) changed = true;
      moves[m] = o.move;
      last[m] = std::move(o);
    }
    if (!changed) break;
  }

  CrackSet chosen = assemble(prev, moves);
  res.dl.resize(M);
  res.curvature.resize(M);
  std::vector<double> G_known(M, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t m = 0; m < M; ++m) {
    res.dl[m] = chosen.components[m].length() - prev.components[m].length();
    res.curvature[m] = moves[m].x > 0.0 ? moves[m].c : 0.0;
    G_known[m] = last[m].G;
  }
  if (M == 1) {
    res.state = make_record(*last[0].solved, ctx, chosen, t_cur, G_known);
    res.objective = last[0].objective;
  } else {
    Solved s = solve_fresh(ctx, chosen, t_cur);
    res.state = make_record(s, ctx, chosen, t_cur, G_known);
    // the last search holds every other tip fixed at its final move
    res.objective = last[M - 1].objective;
  }
  if (res.objective > res.null_objective) {
    // keep the null dominance exact
    bool grew = false;
    for (double d : res.dl) grew = grew || d > 0.0;
    if (grew) {
      res.state = evaluate_state(ctx, prev, t_cur);
      std::fill(res.dl.begin(), res.dl.end(), 0.0);
      std::fill(res.curvature.begin(), res.curvature.end(), 0.0);
      res.note = "chosen point above the null objective; null kept";
    }
    res.objective = res.null_objective;
  }
  for (std::size_t m = 0; m < M; ++m)
    if (std::isnan(res.state.G[m])) {
      res.clearance_stop = true;
      res.note = "tip " + std::to_string(m) + ": no feasible cutoff radius";
    }
  return res;
}

double EvolutionTrace::length_at(std::size_t m, double t) const {
  if (states.empty()) throw InvalidArgument("empty trace");
  if (t <= states.front().t) return states.front().lengths[m];
  for (std::size_t i = 1; i < states.size(); ++i) {
    if (t <= states[i].t) {
      double a = states[i - 1].t, b = states[i].t;
      double w = (t - a) / (b - a);
      return (1.0 - w) * states[i - 1].lengths[m] + w * states[i].lengths[m];
    }
  }
  return states.back().lengths[m];
}

const CrackSet& EvolutionTrace::crack_at(double t) const {
  if (states.empty()) throw InvalidArgument("empty trace");
  std::size_t i = 0;
  while (i + 1 < states.size() && states[i + 1].t <= t) ++i;
  return states[i].crack;
}

EvolutionTrace run_discrete_evolution(const CrackSet& initial, const TimeGrid& grid, double eps,
                                      const SearchConfig& search, const EvolutionContext& ctx,
                                      const StepCallback& on_step) {
  grid.validate();
  if (!(eps > 0.0)) throw InvalidArgument("viscosity must be positive");
  EvolutionTrace tr;
  tr.epsilon = eps;
  tr.grid = grid;
  tr.states.push_back(evaluate_state(ctx, initial, grid.nodes[0]));
  if (on_step) {
    IncrementalStepResult r0;
    r0.state = tr.states[0];
    r0.dl.assign(initial.M(), 0.0);
    r0.curvature.assign(initial.M(), 0.0);
    r0.objective = r0.null_objective = r0.state.energy.total;
    on_step(0, r0);
  }
  for (std::size_t m = 0; m < initial.M(); ++m)
    if (std::isnan(tr.states[0].G[m])) {
      tr.status = "clearance stop";
      tr.note = "tip " + std::to_string(m) + " has no feasible cutoff radius initially";
      return tr;
    }
  for (std::size_t i = 1; i < grid.nodes.size(); ++i) {
    IncrementalStepResult r = incremental_step(tr.states.back().crack, grid.nodes[i - 1],
                                               grid.nodes[i], eps, search, ctx);
    if (on_step) on_step(i, r);
    if (r.clearance_stop) {
      tr.status = "clearance stop";
      tr.note = "step " + std::to_string(i) + ": " + r.note;
      break;
    }
    StepSummary s;
    s.dl = r.dl;
    s.curvature = r.curvature;
    s.objective = r.objective;
    s.null_objective = r.null_objective;
    s.candidates = r.log.size();
    tr.steps.push_back(std::move(s));
    tr.states.push_back(std::move(r.state));
  }
  return tr;
}

DiscreteGriffithReport check_discrete_griffith(const EvolutionTrace& trace, double kappa2,
                                               double tol) {
  DiscreteGriffithReport rep;
  rep.tol = tol;
  for (std::size_t i = 1; i < trace.states.size(); ++i) {
    const auto& a = trace.states[i - 1];
    const auto& b = trace.states[i];
    double dt = b.t - a.t;
    for (std::size_t m = 0; m < b.lengths.size(); ++m) {
      GriffithEntry e;
      e.step = i;
      e.tip = m;
      e.dl = b.lengths[m] - a.lengths[m];
      e.rate = e.dl / dt;
      e.kappa = b.kappa_tip[m];
      e.G = b.G[m];
      e.driving = e.kappa - e.G + trace.epsilon * e.rate;
      e.scale = kappa2 * std::max(1.0, e.rate);
      e.g1 = e.dl >= 0.0;
      e.g2 = e.driving >= -tol * e.scale;
      double g3 = e.dl == 0.0 ? 0.0 : std::abs(e.dl * e.driving) / e.scale;
      e.g3 = g3 <= tol;
      if (std::isnan(e.G)) e.g2 = e.g3 = false;
      rep.max_g2_violation = std::max(rep.max_g2_violation, -e.driving / e.scale);
      rep.max_g3_residual = std::max(rep.max_g3_residual, g3);
      if (!(e.g1 && e.g2 && e.g3)) {
        rep.pass = false;
        rep.failures.push_back(e);
      }
      rep.entries.push_back(e);
    }
  }
  return rep;
}

BalanceReport viscous_energy_balance(const EvolutionTrace& trace, const LoadTrajectory& loads) {
  BalanceReport rep;
  if (trace.states.empty()) return rep;
  const auto& s0 = trace.states.front();
  double W = 0.0, D = 0.0, pen = 0.0, lagged = 0.0;
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const auto& s = trace.states[i];
    if (i > 0) {
      const auto& a = trace.states[i - 1];
      double dt = s.t - a.t;
      W += 0.5 * dt * (a.powers.power(loads, a.t, true) + s.powers.power(loads, s.t, false));
      for (std::size_t m = 0; m < s.lengths.size(); ++m) {
        double dl = s.lengths[m] - a.lengths[m];
        if (dl != 0.0) {
          D += 0.5 * (a.G[m] + s.G[m]) * dl;
          pen += 0.5 * trace.epsilon * dl * dl / dt;
        }
      }
      // energy of the test field u_{i-1} + w_i - w_{i-1} at time t_i
      double dw = loads.w_amp.at(s.t) - loads.w_amp.at(a.t);
      double df = loads.f_amp.at(s.t) - loads.f_amp.at(a.t);
      double dg = loads.g_amp.at(s.t) - loads.g_amp.at(a.t);
      lagged += dw * a.powers.stiffness_w + dw * dw * a.powers.lift_energy;
      if (loads.has_body_force())
        lagged -= loads.f_amp.at(s.t) * dw * a.powers.body_w + df * a.powers.body_u;
      if (loads.has_traction())
        lagged -= loads.g_amp.at(s.t) * dw * a.powers.traction_w + dg * a.powers.traction_u;
    }
    // F_i - F_0 + int (G - kappa) dl - W with int kappa dl = K_i - K_0
    double res = (s.energy.elastic - s0.energy.elastic) + D - W;
    rep.t.push_back(s.t);
    rep.residual.push_back(res);
    rep.work.push_back(W);
    rep.dissipation.push_back(D);
    rep.bound_lhs.push_back(s.energy.total + pen);
    rep.bound_rhs.push_back(s0.energy.total + lagged);
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(res));
    rep.work_scale = std::max(rep.work_scale, std::abs(W));
  }
  rep.relative_residual = rep.max_abs_residual == 0.0 ? 0.0
                          : rep.work_scale == 0.0      ? std::numeric_limits<double>::infinity()
                                                       : rep.max_abs_residual / rep.work_scale;
  rep.min_bound_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.t.size(); ++i)
    rep.min_bound_margin = std::min(rep.min_bound_margin, rep.bound_rhs[i] - rep.bound_lhs[i]);
  return rep;
}

}  // namespace vvfrac
