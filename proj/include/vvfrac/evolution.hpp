#pragma once

#include "vvfrac/err.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vvfrac {

// Everything a solve needs besides the crack and the time.
struct EvolutionContext {
  DomainSpec domain;
  MaterialModel material;
  LoadTrajectory loads;
  MeshOptions mesh;
  SolverOptions solver;
};

struct TimeGrid {
  std::vector<double> nodes;

  static TimeGrid uniform(double T, int k);
  int k() const { return static_cast<int>(nodes.size()) - 1; }
  double T() const { return nodes.back(); }
  // Throws InvalidArgument unless the nodes start at 0 and strictly increase.
  void validate() const;
  // Inserts every midpoint (doubles k).
  TimeGrid refined() const;
};

struct SearchConfig {
  // Candidate curvatures in units of 1/eta.
  std::vector<double> curvature_factors{-1.0, -0.5, 0.0, 0.5, 1.0};
  double dl_min = 0.0;  // 0 selects h/2
  double dl_max = 0.0;  // 0 selects 10 h
  int n_lengths = 8;
  bool refine = true;
  // Stationarity target |kappa - G + eps dl/dt| <= stationarity_tol * kappa2.
  double stationarity_tol = 1e-7;
  int max_refine_evals = 60;
  // Morph range around a refinement base, as a fraction of the cutoff radius.
  double morph_range = 1.0 / 6.0;
  int max_sweeps = 8;
  int workers = 1;

  double resolved_dl_min(double h) const { return dl_min > 0.0 ? dl_min : 0.5 * h; }
  double resolved_dl_max(double h) const { return dl_max > 0.0 ? dl_max : 10.0 * h; }
  std::vector<double> length_grid(double h) const;
};

// Load-dependent inner products of one equilibrium state, stored per unit
// amplitude so that powers can be formed with either one-sided rate:
//   power = a_w' uKW - a_f' Fb.u - a_f a_w' Fb.W - a_g' Ft.u - a_g a_w' Ft.W
// with W the Dirichlet lift of the w profile, Fb and Ft the body and traction
// load vectors of the f and g profiles.
struct LoadPowers {
  double stiffness_w = 0.0;  // u'KW
  double body_u = 0.0;       // Fb.u
  double traction_u = 0.0;   // Ft.u
  double body_w = 0.0;       // Fb.W
  double traction_w = 0.0;   // Ft.W
  double lift_energy = 0.0;  // 1/2 W'KW

  double power(const LoadTrajectory& loads, double t, bool right) const;
};

// Equilibrium state at (t, crack).
struct StateRecord {
  double t = 0.0;
  CrackSet crack;
  std::vector<double> lengths;
  std::vector<Vec2> tips;
  std::vector<double> G;          // NaN where no feasible cutoff radius exists
  std::vector<double> kappa_tip;  // toughness at each tip
  EnergyReport energy;            // E = elastic, K = surface, F = total
  LoadPowers powers;
};

// Solves on a fresh mesh and fills every field of the record.
StateRecord evaluate_state(const EvolutionContext& ctx, const CrackSet& crack, double t);

struct CandidateRecord {
  std::size_t tip = 0;
  double dl = 0.0;
  double curvature = 0.0;
  double objective = 0.0;
  std::string kind;  // null, grid, limit, refine
  bool ok = true;
  std::string note;
};

struct IncrementalStepResult {
  StateRecord state;
  std::vector<double> dl;
  std::vector<double> curvature;
  double objective = 0.0;
  double null_objective = 0.0;
  std::vector<CandidateRecord> log;
  bool clearance_stop = false;
  std::string note;
};

IncrementalStepResult incremental_step(const CrackSet& prev, double t_prev, double t_cur,
                                       double eps, const SearchConfig& search,
                                       const EvolutionContext& ctx);

struct StepSummary {
  std::vector<double> dl;
  std::vector<double> curvature;
  double objective = 0.0;
  double null_objective = 0.0;
  std::size_t candidates = 0;
};

struct EvolutionTrace {
  double epsilon = 0.0;
  TimeGrid grid;
  std::vector<StateRecord> states;  // states[i] at grid.nodes[i]
  std::vector<StepSummary> steps;   // steps[i-1] produced states[i]
  std::string status = "complete";  // or "clearance stop"
  std::string note;

  std::size_t M() const { return states.empty() ? 0 : states.front().lengths.size(); }
  // Piecewise-affine length interpolant.
  double length_at(std::size_t m, double t) const;
  // Piecewise-constant crack interpolant: states[i] on [t_i, t_{i+1}).
  const CrackSet& crack_at(double t) const;
  double end_time() const { return states.back().t; }
};

using StepCallback = std::function<void(std::size_t, const IncrementalStepResult&)>;

// Runs the incremental scheme over the grid. `on_step` sees every step as it
// completes, starting with i = 0 for the initial state (zero increments). A tip that cannot advance without
// leaving the admissible class, or whose ERR cannot be evaluated, ends the run
// with status "clearance stop" before that step.
EvolutionTrace run_discrete_evolution(const CrackSet& initial, const TimeGrid& grid, double eps,
                                      const SearchConfig& search, const EvolutionContext& ctx,
                                      const StepCallback& on_step = {});

struct GriffithEntry {
  std::size_t step = 0;  // index of the state
  std::size_t tip = 0;
  double dl = 0.0;
  double rate = 0.0;     // dl / dt
  double kappa = 0.0;
  double G = 0.0;
  double driving = 0.0;  // kappa - G + eps * rate
  double scale = 0.0;    // kappa2 * max(1, rate)
  bool g1 = true;
  bool g2 = true;
  bool g3 = true;
};

struct DiscreteGriffithReport {
  bool pass = true;
  double tol = 0.0;
  double max_g2_violation = 0.0;  // max of -driving / scale
  double max_g3_residual = 0.0;   // max of |dl * driving| / scale
  std::vector<GriffithEntry> entries;
  std::vector<GriffithEntry> failures;
};

DiscreteGriffithReport check_discrete_griffith(const EvolutionTrace& trace, double kappa2,
                                               double tol);

struct BalanceReport {
  std::vector<double> t;
  std::vector<double> residual;     // F_i - F_0 + sum (G - kappa) dl - W_i
  std::vector<double> work;         // W_i, trapezoid in time
  std::vector<double> dissipation;  // sum of trapezoid G dl
  std::vector<double> bound_lhs;    // F_i + eps/2 sum dl^2/dt
  std::vector<double> bound_rhs;    // F_0 + lagged discrete work
  double max_abs_residual = 0.0;
  double work_scale = 0.0;          // max |W_i|
  double relative_residual = 0.0;   // max_abs_residual / work_scale (0 if both vanish)
  double min_bound_margin = 0.0;    // min of bound_rhs - bound_lhs
};

BalanceReport viscous_energy_balance(const EvolutionTrace& trace, const LoadTrajectory& loads);

// First-step penalty comparable to kappa2 * dl_max.
double default_epsilon0(double kappa2, double dt, double dl_max);

}  // namespace vvfrac
