#pragma once

#include "vvfrac/evolution.hpp"

#include <string>
#include <vector>

namespace vvfrac {

// eps0 * 2^-j for j = 0 .. members-1.
std::vector<double> epsilon_ladder(double eps0, int members);

struct ViscousFamily {
  std::vector<double> epsilons;  // strictly decreasing
  std::vector<EvolutionTrace> traces;
};

// Members run independently on up to `workers` threads; each member then
// searches on a single thread. `on_step` is called from the member's thread.
using MemberStepCallback =
    std::function<void(std::size_t member, std::size_t i, const IncrementalStepResult&)>;
ViscousFamily run_viscous_family(const CrackSet& initial, const TimeGrid& grid,
                                 const std::vector<double>& epsilons, const SearchConfig& search,
                                 const EvolutionContext& ctx, int workers = 1,
                                 const MemberStepCallback& on_step = {});

// Steps whose growth at some tip exceeds 5 * (median growth over all steps
// + dl_min). Entry i refers to the step ending at states[i]; entry 0 is unused.
struct JumpDetection {
  std::vector<char> steps;
  double threshold = 0.0;
};
JumpDetection detect_jumps(const EvolutionTrace& trace, double dl_min);

struct JumpWindow {
  std::size_t first_step = 0;  // steps first_step .. last_step are jump steps
  std::size_t last_step = 0;
  double t_before = 0.0;       // time of states[first_step - 1]
  double t_jump = 0.0;         // time of states[last_step]
  std::vector<double> mass;    // per tip, l(t_jump) - l(t_before)
};
std::vector<JumpWindow> jump_windows(const EvolutionTrace& trace, const std::vector<char>& steps);

struct ViscousGriffithReport {
  std::vector<DiscreteGriffithReport> members;
  std::vector<double> dissipation_norm;  // eps * sum_m ||dl^m/dt||_2^2 per member
  bool pass = true;
  bool norm_trend_ok = true;  // nonincreasing across the ladder within a 20% band
};
ViscousGriffithReport viscous_griffith_check(const ViscousFamily& family, double kappa2,
                                             double tol);

struct LimitEvolution {
  EvolutionTrace limit;          // finest-eps member
  std::vector<char> jump_steps;  // of the limit trace
  std::vector<JumpWindow> jumps;
  double jump_threshold = 0.0;
  std::vector<double> certificate;  // sup_t d_H between members j and j+1 outside jumps
  bool converged = false;
  std::string status;  // "converged" or "no Cauchy certificate"
};

LimitEvolution extract_limit(const ViscousFamily& family, double hausdorff_tol, double dl_min,
                             double densify_tol, double diam);

struct ParamSample {
  double sigma = 0.0;
  double t = 0.0;
  std::size_t piece = 0;
  bool plateau = false;
  bool resolved = true;  // false for plateau states that still need a solve
  CrackSet crack;
  std::vector<double> lengths;
  std::vector<Vec2> tips;
  std::vector<double> G;
  std::vector<double> kappa_tip;
  double tprime = 1.0;
  std::vector<double> lprime;
  EnergyReport energy;
  LoadPowers powers;
};

struct ParamPiece {
  double sigma0 = 0.0, sigma1 = 0.0;
  double t0 = 0.0, t1 = 0.0;
  double tprime = 1.0;
  std::vector<double> lprime;
  bool plateau = false;
};

struct ParametrizedTrace {
  double epsilon = 0.0;
  double S = 0.0;
  std::vector<ParamPiece> pieces;
  std::vector<ParamSample> samples;  // sorted by sigma; samples[k].piece owns the right side
};

// sigma(t) = t + sum_m (l^m(t) - l^m(0)) inverted piece by piece. Steps marked
// in `jump_steps` (consecutive runs merged) are treated as jumps at the end of
// their run: time advances with the crack frozen, then a plateau of t of sigma
// length equal to the jump mass carries the growth.
ParametrizedTrace reparametrize(const EvolutionTrace& trace,
                                const std::vector<char>& jump_steps = {});

// Solves the unresolved plateau states and inserts `interior` intermediate
// states per plateau, all at the frozen jump time.
void resolve_plateaus(ParametrizedTrace& p, const EvolutionContext& ctx, int interior);

struct ParamViolation {
  std::size_t sample = 0;
  std::string clause;
  std::string detail;
};

struct ParamGriffithReport {
  bool pass = true;
  double slope_floor = 1e-6;
  double tol = 0.0;
  double max_identity_error = 0.0;  // |t' + sum l' - 1|
  double plateau_length = 0.0;      // total sigma length with t' <= slope_floor
  double plateau_min_margin = 0.0;  // min (G - kappa) / kappa2 on plateaus for growing tips
  std::vector<ParamViolation> violations;
  std::vector<double> balance_residual;  // per sample
  double max_balance_residual = 0.0;
  double work_scale = 0.0;
};

ParamGriffithReport parametrized_griffith_check(const ParametrizedTrace& p,
                                                const LoadTrajectory& loads, double kappa2,
                                                double tol, double slope_floor = 1e-6);

}  // namespace vvfrac
