// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "common.hpp"
#include "geometry_suite.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>

using namespace vvtest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Criteria are evaluated in dependency order and printed in numeric order.
struct Gate {
  std::map<int, std::string> lines;
  int failed = 0;
  void report(int id, bool pass, const std::string& detail, double secs) {
    char head[64];
    std::snprintf(head, sizeof head, "criterion %2d: %s  ", id, pass ? "PASS" : "FAIL");
    lines[id] = head + detail + fmt("  [%.1f s]", secs);
    std::printf("  done %d\n", id);
    std::fflush(stdout);
    failed += !pass;
  }
};

// Every ERR value met anywhere in the run, with the energy scale of its state.
struct PositivityLog {
  double worst = 0.0;  // min of G / scale
  std::size_t count = 0;
  void add(double G, double scale) {
    ++count;
    worst = std::min(worst, G / std::max(scale, 1e-300));
  }
  void add(const EvolutionTrace& tr) {
    double scale = 0.0;
    for (const auto& s : tr.states) scale = std::max(scale, std::abs(s.energy.strain));
    for (const auto& s : tr.states)
      for (double G : s.G) add(G, scale);
  }
};

const double kDcbEps0 = 0.32;
const double kH = 1.0 / 16;

}  // namespace

int main() {
  Gate gate;
  PositivityLog pos;

  // 1, 2: edge-cracked square under ramped tension, h = 1/64, grading 8.
  {
    bool ok1 = true, ok2 = true;
    double worst_fd = 0, worst_cut = 0, slowest = 0;
    auto t_all = Clock::now();
    for (double a : {0.2, 0.3, 0.4}) {
      auto t0 = Clock::now();
      auto ctx = tension_benchmark(1.0 / 64, 8.0);
      auto crack = edge_crack(a);
      auto mesh = build_mesh(ctx.domain, crack, ctx.mesh);
      ElasticitySolver solver(mesh, ctx.material);
      auto u = solver.solve(ctx.loads, 1.0);
      auto e = err_vector(u, ctx.material, ctx.loads, 1.0, crack, ctx.domain.polygon)[0];
      pos.add(e.G, solver.energies(u, ctx.loads, 1.0, crack).strain);
      auto fd = finite_difference_err(ctx.domain, ctx.material, ctx.loads, 1.0, crack, 0, ctx.mesh,
                                      1e-3);
      double rel = std::abs(e.G - fd.G_fd) / std::max(e.G, ctx.material.kappa1);
      double r = default_radius(mesh, crack, 0, ctx.domain.polygon);
      auto sens = extension_independence_check(u, ctx.material, ctx.loads, 1.0, crack, 0,
                                               {r, 2 * r}, ctx.domain.polygon);
      double dt = seconds_since(t0);
      std::printf("  a = %.1f: G = %.6f, finite difference %.6f (rel %.2e), G(2r) = %.6f "
                  "(change %.2e), %.1f s\n",
                  a, e.G, fd.G_fd, rel, sens.G_by_radius[1], sens.radius_spread, dt);
      worst_fd = std::max(worst_fd, rel);
      worst_cut = std::max(worst_cut, sens.radius_spread);
      slowest = std::max(slowest, dt);
      ok1 = ok1 && rel <= 0.02 && dt <= 120.0;
      ok2 = ok2 && sens.radius_spread <= 0.01;
    }
    double secs = seconds_since(t_all);
    gate.report(1, ok1,
                fmt("ERR vs finite difference: max rel error %.2e <= 2e-2, slowest case %.1f s <= 120 s",
                    worst_fd, slowest),
                secs);
    gate.report(2, ok2, fmt("cutoff radius doubling: max rel change %.2e <= 1e-2", worst_cut), 0.0);
  }

  // 4, 6: DCB with a straight (forced 1D) extension family, ladder {eps0, 2 eps0, 4 eps0}.
  std::vector<EvolutionTrace> forced;  // every trace of the 1D scenario, for criterion 4
  std::vector<EvolutionTrace> all;     // every trace, for criterion 7
  {
    auto t0 = Clock::now();
    auto ctx = dcb(kH, 1.2);
    auto fam = run_viscous_family(edge_crack(0.3), TimeGrid::uniform(1.0, 10),
                                  {4 * kDcbEps0, 2 * kDcbEps0, kDcbEps0}, straight_search(), ctx);
    std::vector<double> grown;
    bool ok = true;
    for (const auto& tr : fam.traces) {
      grown.push_back(tr.states.back().lengths[0] - tr.states.front().lengths[0]);
      ok = ok && tr.status == "complete";
      forced.push_back(tr);
      pos.add(tr);
    }
    ok = ok && grown[0] <= grown[1] && grown[1] <= grown[2] && grown[2] > 0.0;
    gate.report(6, ok,
                fmt("grown length at eps = 4e0, 2e0, e0 (e0 = 0.32): %.4f <= %.4f <= %.4f",
                    grown[0], grown[1], grown[2]),
                seconds_since(t0));
  }

  // 9: energy balance over simultaneous (k, h) refinement of the 1D scenario.
  {
    auto t0 = Clock::now();
    std::vector<double> rel;
    std::ostringstream os;
    for (auto [h, k] : {std::pair{1.0 / 16, 10}, std::pair{1.0 / 32, 20}, std::pair{1.0 / 64, 40}}) {
      auto ctx = dcb(h, 1.2);
      auto tr = run_discrete_evolution(edge_crack(0.3), TimeGrid::uniform(1.0, k), kDcbEps0,
                                       straight_search(), ctx);
      auto bal = viscous_energy_balance(tr, ctx.loads);
      rel.push_back(tr.status == "complete" ? bal.relative_residual : 1.0);
      os << (rel.size() > 1 ? ", " : "") << "(1/" << int(1 / h + 0.5) << ", " << k
         << ") " << fmt("%.2e", bal.relative_residual);
      forced.push_back(tr);
      pos.add(tr);
    }
    bool ok = rel[1] < rel[0] && rel[2] < rel[1] && rel[2] <= 0.05;
    gate.report(9, ok, "balance residual / work at (h, k) = " + os.str() +
                           ": decreasing, finest <= 5e-2",
                seconds_since(t0));
  }

  {
    auto t0 = Clock::now();
    bool ok = true;
    double worst = 0.0;
    std::size_t entries = 0;
    for (const auto& tr : forced) {
      auto rep = check_discrete_griffith(tr, 1.0, 1e-3);
      ok = ok && rep.pass;
      worst = std::max({worst, rep.max_g3_residual, rep.max_g2_violation});
      entries += rep.entries.size();
    }
    gate.report(4, ok,
                fmt("discrete Griffith on %.0f traces, %.0f tip-steps: (G1) exact, max (G2)/(G3) "
                    "residual %.2e <= 1e-3",
                    double(forced.size()), double(entries), worst),
                seconds_since(t0));
    all.insert(all.end(), forced.begin(), forced.end());
  }

  // 5: subcritical loading, every eps of the ladder and k in {5, 10, 20}.
  {
    auto t0 = Clock::now();
    auto ctx = dcb(kH, 0.35);
    bool ok = true;
    double maxG = 0.0;
    int runs = 0;
    for (int k : {5, 10, 20}) {
      auto fam = run_viscous_family(edge_crack(0.3), TimeGrid::uniform(1.0, k),
                                    epsilon_ladder(kDcbEps0, 3), straight_search(), ctx);
      for (const auto& tr : fam.traces) {
        ++runs;
        pos.add(tr);
        for (const auto& s : tr.states) {
          maxG = std::max(maxG, s.G[0]);
          ok = ok && s.lengths[0] == 0.3 && s.crack.components[0].vertices ==
                                                 edge_crack(0.3).components[0].vertices;
        }
        all.push_back(tr);
      }
    }
    bool pre = maxG <= 0.8 * ctx.material.kappa1;
    gate.report(5, ok && pre,
                fmt("%.0f runs: max G %.4f <= 0.8 kappa1 = %.2f, growth exactly zero: ", runs,
                    maxG, 0.8 * ctx.material.kappa1) +
                    (ok ? "yes" : "no"),
                seconds_since(t0));
  }

  // 8: toughness step-down ahead of the seed, opening held after t = 0.6.
  {
    auto t0 = Clock::now();
    auto ctx = dcb_jump(kH);
    auto search = straight_search();
    auto fam = run_viscous_family(edge_crack(0.3), TimeGrid::uniform(1.0, 10),
                                  epsilon_ladder(0.08, 3), search, ctx);
    for (const auto& tr : fam.traces) {
      pos.add(tr);
      all.push_back(tr);
    }
    auto lim = extract_limit(fam, 0.05, search.resolved_dl_min(kH), 1e-3, ctx.domain.polygon.diameter());
    double mass = 0.0;
    for (const auto& w : lim.jumps)
      for (std::size_t m = 0; m < w.mass.size(); ++m) {
        // jump size read off the limit lengths directly
        mass += lim.limit.states[w.last_step].lengths[m] -
                lim.limit.states[w.first_step - 1].lengths[m];
      }
    auto p = reparametrize(lim.limit, lim.jump_steps);
    resolve_plateaus(p, ctx, 4);
    auto rep = parametrized_griffith_check(p, ctx.loads, ctx.material.kappa2, 0.02);
    bool pg4 = true;
    for (const auto& v : rep.violations) pg4 = pg4 && v.clause != "pG4";
    for (const auto& s : p.samples)
      if (s.plateau) pos.add(s.G[0], std::abs(s.energy.strain));
    bool ok = !lim.jumps.empty() && mass > 0.0 &&
              std::abs(rep.plateau_length - mass) <= 0.05 * mass && pg4 &&
              rep.plateau_min_margin >= -0.02;
    gate.report(8, ok,
                fmt("%.0f jump(s), mass %.4f, plateau sigma-length %.4f (within 5%%), "
                    "min (G - kappa)/kappa2 on plateau %+.4f >= -0.02",
                    double(lim.jumps.size()), mass, rep.plateau_length, rep.plateau_min_margin),
                seconds_since(t0));
  }

  // 7: parametrization identity on every trace above.
  {
    auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t samples = 0;
    for (const auto& tr : all) {
      auto jd = detect_jumps(tr, 0.5 * kH);
      auto p = reparametrize(tr, jd.steps);
      auto rep = parametrized_griffith_check(p, LoadTrajectory{}, 1.0, 1e-3);
      worst = std::max(worst, rep.max_identity_error);
      samples += p.samples.size();
    }
    gate.report(7, worst <= 1e-12,
                fmt("|t' + sum l' - 1| over %.0f samples of %.0f traces: max %.1e <= 1e-12",
                    double(samples), double(all.size()), worst),
                seconds_since(t0));
  }

  gate.report(3, pos.worst >= -1e-8,
              fmt("%.0f ERR values, min G / energy scale %.2e >= -1e-8", double(pos.count),
                  pos.worst),
              0.0);

  {
    auto t0 = Clock::now();
    auto r = geometry_suite();
    double secs = seconds_since(t0);
    for (const auto& m : r.messages) std::printf("  failed: %s\n", m.c_str());
    gate.report(10, r.cases == 1000 && r.failures == 0 && secs <= 60.0,
                fmt("%.0f randomized geometry cases, %.0f failures, %.2f s <= 60 s", r.cases,
                    r.failures, secs),
                secs);
  }

  for (const auto& [id, line] : gate.lines) std::printf("%s\n", line.c_str());
  std::printf("%s: %d criterion(s) failed\n", gate.failed ? "FAIL" : "PASS", gate.failed);
  return gate.failed ? 1 : 0;
}
