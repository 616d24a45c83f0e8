#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "irsrelay/conic_problem.hpp"
#include "irsrelay/conic_solver.hpp"
#include "irsrelay/randomization.hpp"
#include "irsrelay/system_model.hpp"
#include "irsrelay/taylor.hpp"

namespace irsrelay {

/// Taylor expansion point of one (S, I) slack pair. Slacks are kept in
/// noise-normalized units: S = 1 / SNR of the desired term, I = interference
/// plus noise over noise (for the relay, over sigma_R^4).
struct SlackLocalPoint {
  double S = 1.0;
  double I = 1.0;
};

struct LocalPoints {
  std::vector<SlackLocalPoint> first;   // user k, BS phase
  std::vector<SlackLocalPoint> second;  // user k, relay phase
  std::vector<SlackLocalPoint> relay;   // relay decoding of stream k
};

/// Evaluates the slack-defining equalities at the incumbent beamformers.
LocalPoints local_points(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                         IrsMode mode);

struct SubproblemOptions {
  int sca_inner_iters = 5;
  double sca_tol = 1e-4;
  RandomizationOptions randomization;
  conic::SolveOptions solver;
  IrsMode irs_mode = IrsMode::BothPhases;
  /// Absolute slack when checking gamma_R >= gamma_R_th on candidates.
  double relay_sinr_tol = 1e-5;
  /// Rank-penalty weights tried in turn when the plain relaxation has a
  /// higher-rank optimum and none of its candidates is accepted. The penalty
  /// rho (tr(X) - u^H X u), u the incumbent direction, is in objective units
  /// (bits/s/Hz summed without the 1/2 pre-log).
  std::vector<double> rank_penalties{0.1, 0.3, 1.0};
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// SDP builders. Every slack variable is normalized by its local point, so the
// incumbent maps to S_hat = I_hat = 1 and the Taylor rows keep O(1)
// coefficients. Lifted beamformers are normalized by the power budget.

enum class BsObjective { SumRate, MaxMinRelaySinr };

struct BsSdp {
  conic::ProblemBuilder builder;
  int user = 0;
  int g_block = -1;
  double power_scale = 1.0;  // G_k' = power_scale * H(g_block)
  std::vector<conic::Var> S1, I1, SR, IR;
  std::vector<conic::Var> R;              // rate epigraph variables (SumRate)
  std::optional<conic::Var> min_sinr;     // MaxMinRelaySinr objective variable
  std::vector<AffineBound> rate_bounds;   // in original slack units
  std::vector<AffineBound> relay_bounds;
  LocalPoints locs;
};

BsSdp build_bs_sdp(int user, const ChannelSet& ch, const BeamformingState& state, const LocalPoints& locs,
                   const SystemParams& params, IrsMode mode, BsObjective objective = BsObjective::SumRate);

struct RelaySdp {
  conic::ProblemBuilder builder;
  std::vector<int> f_blocks;
  double power_scale = 1.0;
  std::vector<conic::Var> S2, I2, R;
  std::vector<AffineBound> rate_bounds;
  LocalPoints locs;
};

RelaySdp build_relay_sdp(const ChannelSet& ch, const BeamformingState& state, const LocalPoints& locs,
                         const SystemParams& params, IrsMode mode);

struct IrsSdp {
  conic::ProblemBuilder builder;
  int phi_block = -1;
  std::vector<conic::Var> S1, I1, S2, I2, SR, IR, R;
  std::vector<AffineBound4> rate_bounds;   // BothPhases
  std::vector<AffineBound> rate_bounds_1;  // FirstPhaseOnly (phase-2 SINR frozen)
  std::vector<AffineBound> relay_bounds;
  LocalPoints locs;
};

IrsSdp build_irs_sdp(const ChannelSet& ch, const BeamformingState& state, const LocalPoints& locs,
                     const SystemParams& params, IrsMode mode);

// ---------------------------------------------------------------------------
// Subproblem drivers: SCA repetitions of build -> solve -> randomize, each
// candidate accepted only if it is feasible and does not lower the true
// sum-rate.

struct SubproblemTraceRow {
  double surrogate = 0.0;      // SDP optimum (sum of rate epigraph variables)
  double true_value = 0.0;     // true sum-rate after the step
  int solver_iterations = 0;
  conic::SolveStatus status = conic::SolveStatus::Optimal;
  bool accepted = false;
};

struct SubproblemSolution {
  BeamformingState state;
  double surrogate = 0.0;  // last Optimal SDP value
  double true_objective = 0.0;
  conic::SolveStatus status = conic::SolveStatus::Optimal;  // last SDP
  bool accepted = false;
  bool infeasible = false;  // some SDP reported Infeasible
  int clip_events = 0;
  LocalPoints slacks_at_optimum;  // lifted-solution slacks of the last Optimal SDP
  std::vector<SubproblemTraceRow> trace;
};

/// Feasible means every gamma_R,k >= gamma_R_th - tol.
bool relay_feasible(const SINRReport& r, double gamma_th, double tol);

SubproblemSolution optimize_bs(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                               const SubproblemOptions& opts);
SubproblemSolution optimize_relay(const ChannelSet& ch, const BeamformingState& state,
                                  const SystemParams& params, const SubproblemOptions& opts);
SubproblemSolution optimize_irs(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                                const SubproblemOptions& opts);

struct RelayFeasibilityResult {
  BeamformingState state;
  double min_relay_sinr = 0.0;
  int sweeps = 0;
};

/// SCA on the BS beamformers that raises min_k gamma_R,k until it reaches
/// `target` or stops improving. Used to find a relay-feasible starting point.
RelayFeasibilityResult maximize_relay_sinr(const ChannelSet& ch, const BeamformingState& state,
                                           const SystemParams& params, double target,
                                           const SubproblemOptions& opts, int max_sweeps = 20);

}  // namespace irsrelay
