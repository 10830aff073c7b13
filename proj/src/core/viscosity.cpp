#include "vvfrac/viscosity.hpp"

#include "vvfrac/error.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace vvfrac {

std::vector<double> epsilon_ladder(double eps0, int members) {
  if (!(eps0 > 0.0) || members < 1) throw InvalidArgument("ladder needs eps0 > 0 and members >= 1");
  std::vector<double> out;
  for (int j = 0; j < members; ++j) out.push_back(std::ldexp(eps0, -j));
  return out;
}

ViscousFamily run_viscous_family(const CrackSet& initial, const TimeGrid& grid,
                                 const std::vector<double>& epsilons, const SearchConfig& search,
                                 const EvolutionContext& ctx, int workers,
                                 const MemberStepCallback& on_step) {
  for (std::size_t j = 1; j < epsilons.size(); ++j)
    if (!(epsilons[j] < epsilons[j - 1]))
      throw InvalidArgument("viscosity ladder must be strictly decreasing");
  ViscousFamily fam;
  fam.epsilons = epsilons;
  fam.traces.resize(epsilons.size());
  std::vector<std::exception_ptr> errors(epsilons.size());
  SearchConfig member = search;
  if (workers > 1 && epsilons.size() > 1) member.workers = 1;
  detail::parallel_for(epsilons.size(), workers, [&](std::size_t j) {
    try {
      StepCallback cb;
      if (on_step) cb = [&, j](std::size_t i, const IncrementalStepResult& r) { on_step(j, i, r); };
      fam.traces[j] = run_discrete_evolution(initial, grid, epsilons[j], member, ctx, cb);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return fam;
}

JumpDetection detect_jumps(const EvolutionTrace& trace, double dl_min) {
  JumpDetection out;
  const auto& st = trace.states;
  out.steps.assign(st.size(), 0);
  std::vector<double> growth;
  for (std::size_t i = 1; i < st.size(); ++i)
    for (std::size_t m = 0; m < st[i].lengths.size(); ++m) {
      double dl = st[i].lengths[m] - st[i - 1].lengths[m];
      growth.push_back(dl);
    }
  double median = 0.0;
  if (!growth.empty()) {
    std::sort(growth.begin(), growth.end());
    std::size_t n = growth.size();
    median = n % 2 ? growth[n / 2] : 0.5 * (growth[n / 2 - 1] + growth[n / 2]);
  }
  out.threshold = 5.0 * (median + dl_min);
  for (std::size_t i = 1; i < st.size(); ++i)
    for (std::size_t m = 0; m < st[i].lengths.size(); ++m)
      if (st[i].lengths[m] - st[i - 1].lengths[m] > out.threshold) out.steps[i] = 1;
  return out;
}

std::vector<JumpWindow> jump_windows(const EvolutionTrace& trace, const std::vector<char>& steps) {
  std::vector<JumpWindow> out;
  const auto& st = trace.states;
  for (std::size_t i = 1; i < st.size() && i < steps.size(); ++i) {
    if (!steps[i]) continue;
    JumpWindow w;
    w.first_step = i;
    while (i + 1 < st.size() && i + 1 < steps.size() && steps[i + 1]) ++i;
    w.last_step = i;
    w.t_before = st[w.first_step - 1].t;
    w.t_jump = st[w.last_step].t;
    for (std::size_t m = 0; m < st[i].lengths.size(); ++m)
      w.mass.push_back(st[w.last_step].lengths[m] - st[w.first_step - 1].lengths[m]);
    out.push_back(w);
  }
  return out;
}

ViscousGriffithReport viscous_griffith_check(const ViscousFamily& family, double kappa2,
                                             double tol) {
  ViscousGriffithReport rep;
  for (const auto& tr : family.traces) {
    rep.members.push_back(check_discrete_griffith(tr, kappa2, tol));
    rep.pass = rep.pass && rep.members.back().pass;
    double norm = 0.0;
    for (std::size_t i = 1; i < tr.states.size(); ++i) {
      double dt = tr.states[i].t - tr.states[i - 1].t;
      for (std::size_t m = 0; m < tr.M(); ++m) {
        double dl = tr.states[i].lengths[m] - tr.states[i - 1].lengths[m];
        norm += dl * dl / dt;
      }
    }
    rep.dissipation_norm.push_back(tr.epsilon * norm);
  }
  for (std::size_t j = 1; j < rep.dissipation_norm.size(); ++j)
    if (rep.dissipation_norm[j] > 1.2 * rep.dissipation_norm[j - 1] + 1e-300)
      rep.norm_trend_ok = false;
  return rep;
}

LimitEvolution extract_limit(const ViscousFamily& family, double hausdorff_tol, double dl_min,
                             double densify_tol, double diam) {
  if (family.traces.size() < 3)
    throw InvalidArgument("limit extraction needs at least three family members");
  const std::size_t J = family.traces.size();
  LimitEvolution out;
  out.limit = family.traces.back();
  JumpDetection jd = detect_jumps(out.limit, dl_min);
  out.jump_steps = jd.steps;
  out.jump_threshold = jd.threshold;
  out.jumps = jump_windows(out.limit, jd.steps);

  // times excluded from the certificate: every member's jump runs widened by one step
  std::vector<std::pair<double, double>> excluded;
  for (const auto& tr : family.traces) {
    JumpDetection d = detect_jumps(tr, dl_min);
    for (const auto& w : jump_windows(tr, d.steps)) {
      std::size_t a = w.first_step >= 2 ? w.first_step - 2 : 0;
      std::size_t b = std::min(w.last_step + 1, tr.states.size() - 1);
      excluded.emplace_back(tr.states[a].t, tr.states[b].t);
    }
  }
  auto is_excluded = [&](double t) {
    for (const auto& [a, b] : excluded)
      if (t > a && t < b) return true;
    return false;
  };
  for (std::size_t j = 0; j + 1 < J; ++j) {
    const auto& A = family.traces[j];
    const auto& B = family.traces[j + 1];
    double tend = std::min(A.end_time(), B.end_time());
    double sup = 0.0;
    for (const auto& s : B.states) {
      if (s.t > tend || is_excluded(s.t)) continue;
      sup = std::max(sup, hausdorff_distance(A.crack_at(s.t), B.crack_at(s.t), densify_tol, diam));
    }
    out.certificate.push_back(sup);
  }
  out.converged = out.certificate.back() <= hausdorff_tol;
  out.status = out.converged ? "converged" : "no Cauchy certificate";
  return out;
}

namespace {

ParamSample sample_from_state(const StateRecord& s, double sigma, std::size_t piece,
                              const ParamPiece& pc) {
  ParamSample p;
  p.sigma = sigma;
  p.t = s.t;
  p.piece = piece;
  p.plateau = pc.plateau;
  p.crack = s.crack;
  p.lengths = s.lengths;
  p.tips = s.tips;
  p.G = s.G;
  p.kappa_tip = s.kappa_tip;
  p.tprime = pc.tprime;
  p.lprime = pc.lprime;
  p.energy = s.energy;
  p.powers = s.powers;
  return p;
}

void fill_from_state(ParamSample& p, const StateRecord& s) {
  p.crack = s.crack;
  p.lengths = s.lengths;
  p.tips = s.tips;
  p.G = s.G;
  p.kappa_tip = s.kappa_tip;
  p.energy = s.energy;
  p.powers = s.powers;
  p.resolved = true;
}

}  // namespace

ParametrizedTrace reparametrize(const EvolutionTrace& trace, const std::vector<char>& jump_steps) {
  ParametrizedTrace p;
  p.epsilon = trace.epsilon;
  const auto& st = trace.states;
  if (st.empty()) return p;
  const std::size_t M = trace.M();
  double sigma = 0.0;
  auto jump = [&](std::size_t i) { return i < jump_steps.size() && jump_steps[i]; };

  std::size_t i = 1;
  while (i < st.size()) {
    const StateRecord& a = st[i - 1];
    if (!jump(i)) {
      const StateRecord& b = st[i];
      ParamPiece pc;
      double dt = b.t - a.t, sum = 0.0;
      std::vector<double> dl(M);
      for (std::size_t m = 0; m < M; ++m) {
        dl[m] = b.lengths[m] - a.lengths[m];
        sum += dl[m];
      }
      double D = dt + sum;
      pc.sigma0 = sigma;
      pc.sigma1 = sigma + D;
      pc.t0 = a.t;
      pc.t1 = b.t;
      pc.tprime = dt / D;
      for (std::size_t m = 0; m < M; ++m) pc.lprime.push_back(dl[m] / D);
      p.samples.push_back(sample_from_state(a, sigma, p.pieces.size(), pc));
      p.pieces.push_back(pc);
      sigma = pc.sigma1;
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < st.size() && jump(j + 1)) ++j;
    const StateRecord& b = st[j];
    // time runs with the crack frozen
    ParamPiece tp;
    tp.sigma0 = sigma;
    tp.sigma1 = sigma + (b.t - a.t);
    tp.t0 = a.t;
    tp.t1 = b.t;
    tp.tprime = 1.0;
    tp.lprime.assign(M, 0.0);
    p.samples.push_back(sample_from_state(a, sigma, p.pieces.size(), tp));
    p.pieces.push_back(tp);
    sigma = tp.sigma1;
    // the plateau
    ParamPiece pl;
    double mass = 0.0;
    std::vector<double> dl(M);
    for (std::size_t m = 0; m < M; ++m) {
      dl[m] = b.lengths[m] - a.lengths[m];
      mass += dl[m];
    }
    pl.sigma0 = sigma;
    pl.sigma1 = sigma + mass;
    pl.t0 = pl.t1 = b.t;
    pl.tprime = 0.0;
    pl.plateau = true;
    for (std::size_t m = 0; m < M; ++m) pl.lprime.push_back(dl[m] / mass);
    ParamSample ps = sample_from_state(a, sigma, p.pieces.size(), pl);
    ps.t = b.t;
    ps.resolved = false;  // crack of a at the later time b.t
    ps.G.assign(M, std::numeric_limits<double>::quiet_NaN());
    ps.energy = EnergyReport{};
    ps.energy.total = std::numeric_limits<double>::quiet_NaN();
    p.samples.push_back(ps);
    p.pieces.push_back(pl);
    sigma = pl.sigma1;
    i = j + 1;
  }
  const ParamPiece& lastp = p.pieces.empty() ? ParamPiece{} : p.pieces.back();
  ParamPiece tail = lastp;
  if (p.pieces.empty()) tail.lprime.assign(M, 0.0);
  ParamSample end = sample_from_state(st.back(), sigma, p.pieces.empty() ? 0 : p.pieces.size() - 1, tail);
  p.samples.push_back(end);
  p.S = sigma;
  return p;
}

void resolve_plateaus(ParametrizedTrace& p, const EvolutionContext& ctx, int interior) {
  std::vector<ParamSample> out;
  for (std::size_t k = 0; k < p.samples.size(); ++k) {
    ParamSample s = p.samples[k];
    if (!s.plateau || s.piece >= p.pieces.size() || !p.pieces[s.piece].plateau ||
        k + 1 >= p.samples.size()) {
      out.push_back(std::move(s));
      continue;
    }
    const ParamPiece& pc = p.pieces[s.piece];
    const ParamSample& end = p.samples[k + 1];
    auto solve = [&](ParamSample& q) {
      try {
        fill_from_state(q, evaluate_state(ctx, q.crack, q.t));
      } catch (const Error&) {
        q.resolved = false;
      }
    };
    if (!s.resolved) solve(s);
    std::vector<double> l0 = s.lengths, l1 = end.lengths;
    out.push_back(s);
    for (int q = 1; q <= interior; ++q) {
      double w = static_cast<double>(q) / (interior + 1);
      ParamSample mid = s;
      mid.sigma = pc.sigma0 + w * (pc.sigma1 - pc.sigma0);
      for (std::size_t m = 0; m < end.crack.M(); ++m) {
        double len = l0[m] + w * (l1[m] - l0[m]);
        mid.crack.components[m] = end.crack.components[m].prefix(len);
      }
      mid.resolved = false;
      solve(mid);
      out.push_back(std::move(mid));
    }
  }
  p.samples = std::move(out);
}

ParamGriffithReport parametrized_griffith_check(const ParametrizedTrace& p,
                                                const LoadTrajectory& loads, double kappa2,
                                                double tol, double slope_floor) {
  ParamGriffithReport rep;
  rep.slope_floor = slope_floor;
  rep.tol = tol;
  rep.plateau_min_margin = std::numeric_limits<double>::infinity();
  auto violate = [&](std::size_t k, const std::string& clause, const std::string& detail) {
    rep.pass = false;
    rep.violations.push_back({k, clause, detail});
  };
  for (std::size_t k = 0; k < p.samples.size(); ++k) {
    const auto& s = p.samples[k];
    double sum = s.tprime;
    for (double l : s.lprime) sum += l;
    rep.max_identity_error = std::max(rep.max_identity_error, std::abs(sum - 1.0));
    bool mono = s.tprime >= 0.0;
    for (double l : s.lprime) mono = mono && l >= 0.0;
    if (!mono) violate(k, "pG1", "negative derivative");
    for (std::size_t m = 0; m < s.lprime.size(); ++m) {
      double G = s.G[m], kap = s.kappa_tip[m];
      std::ostringstream os;
      os << "tip " << m << " G=" << G << " kappa=" << kap;
      if (s.tprime > slope_floor) {
        if (!(G <= kap + tol * kappa2)) violate(k, "pG2", os.str());
        if (s.lprime[m] > slope_floor && !(std::abs(G - kap) <= tol * kappa2))
          violate(k, "pG3", os.str());
      } else if (s.lprime[m] > slope_floor) {
        if (!(G >= kap - tol * kappa2)) violate(k, "pG4", os.str());
        rep.plateau_min_margin = std::min(rep.plateau_min_margin, (G - kap) / kappa2);
      }
    }
    if (s.tprime <= slope_floor) {
      bool any = false;
      for (double l : s.lprime) any = any || l > slope_floor;
      if (!any) violate(k, "pG4", "time stalls without growth");
    }
  }
  for (const auto& pc : p.pieces)
    if (pc.tprime <= slope_floor) rep.plateau_length += pc.sigma1 - pc.sigma0;
  if (!std::isfinite(rep.plateau_min_margin)) rep.plateau_min_margin = 0.0;

  // balance: F(s) - F(0) - int power t' + sum int (G - kappa) l' = 0
  if (p.samples.empty()) return rep;
  double work = 0.0, diss = 0.0;
  const double F0 = p.samples.front().energy.total;
  rep.balance_residual.push_back(0.0);
  for (std::size_t k = 1; k < p.samples.size(); ++k) {
    const auto& a = p.samples[k - 1];
    const auto& b = p.samples[k];
    const ParamPiece& pc = p.pieces[a.piece];
    double ds = b.sigma - a.sigma;
    if (pc.tprime > 0.0)
      work += 0.5 * ds * pc.tprime *
              (a.powers.power(loads, a.t, true) + b.powers.power(loads, b.t, false));
    for (std::size_t m = 0; m < pc.lprime.size(); ++m)
      if (pc.lprime[m] > 0.0)
        diss += 0.5 * ds * pc.lprime[m] * ((a.G[m] - a.kappa_tip[m]) + (b.G[m] - b.kappa_tip[m]));
    double r = b.energy.total - F0 - work + diss;
    rep.balance_residual.push_back(r);
    if (std::isnan(r)) {
      rep.max_balance_residual = std::numeric_limits<double>::quiet_NaN();
    } else if (!std::isnan(rep.max_balance_residual)) {
      rep.max_balance_residual = std::max(rep.max_balance_residual, std::abs(r));
    }
    rep.work_scale = std::max(rep.work_scale, std::abs(work));
  }
  return rep;
}

}  // namespace vvfrac
