#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "irsrelay/subproblems.hpp"

namespace irsrelay {

enum class Scheme { Proposed, RelayOnly, RandomIRS, Independent };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);

enum class SubproblemKind { Bs, Relay, Irs };

std::string_view to_string(SubproblemKind k);

struct AOConfig {
  int max_outer_iters = 20;
  double outer_tol = 1e-3;  // bits/s/Hz
  int sca_inner_iters = 5;
  double sca_tol = 1e-4;
  int randomization_samples = 200;
  int restore_attempts = 4;
  std::vector<SubproblemKind> order{SubproblemKind::Bs, SubproblemKind::Relay, SubproblemKind::Irs};
  conic::SolveOptions solver;
};

class RestorationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SubproblemRecord {
  int outer = 0;
  SubproblemKind kind = SubproblemKind::Bs;
  double surrogate = 0.0;
  double true_value = 0.0;
  int solver_iterations = 0;
  int sdp_solves = 0;
  conic::SolveStatus status = conic::SolveStatus::Optimal;
  bool accepted = false;
};

struct AOTrace {
  std::vector<double> sum_rate;  // [0] is the starting point of the main loop
  std::vector<SubproblemRecord> subproblems;
  double eff_gamma_th = 0.0;
  int restore_halvings = 0;
  double initial_min_relay_sinr = 0.0;
  bool converged = false;
  bool relay_feasible = false;
  int clip_events = 0;

  int outer_iterations() const { return static_cast<int>(sum_rate.size()) - 1; }
};

struct AOResult {
  BeamformingState state;
  AOTrace trace;
  SINRReport report;
};

/// Matched-filter start: theta with uniform random phases (zero for
/// RelayOnly), G and F matched to the effective channels with equal power
/// split at full budget.
BeamformingState initialize_state(const ChannelSet& ch, const SystemParams& params, Scheme scheme,
                                  std::uint64_t seed);

/// Halves the threshold until `feasible` accepts it; at most `attempts`
/// halvings. Returns the first accepted threshold.
double restore_threshold(double gamma_th, int attempts, const std::function<bool(double)>& feasible,
                         int* halvings = nullptr);

struct RestoreOutcome {
  double gamma_th = 0.0;
  int halvings = 0;
  double min_relay_sinr = 0.0;
  BeamformingState state;
};

/// Raises min_k gamma_R,k with the BS beamformers, then picks the largest
/// threshold gamma_R_th / 2^h (h <= restore_attempts) that the result meets.
RestoreOutcome feasibility_restore(const ChannelSet& ch, const SystemParams& params, const BeamformingState& start,
                                   const AOConfig& config, IrsMode mode, std::uint64_t seed);

AOResult run_ao(const ChannelSet& ch, const SystemParams& params, const AOConfig& config, Scheme scheme,
                std::uint64_t seed);

struct TrialResult {
  Scheme scheme = Scheme::Proposed;
  double sweep_value = 0.0;
  int trial = 0;
  double sum_rate = 0.0;
  bool feasible = false;
  double eff_gamma_th = 0.0;
  int iters = 0;
  double wall_ms = 0.0;
  std::uint64_t channel_checksum = 0;
  SINRReport report;
  std::vector<double> trace_sum_rate;
  std::string error;  // non-empty when the trial failed
};

/// Runs one scheme on one channel realization. RestorationExhausted is
/// recorded as an infeasible trial, not thrown.
TrialResult run_scheme(Scheme scheme, const ChannelSet& ch, const SystemParams& params, const AOConfig& config,
                       std::uint64_t seed);

}  // namespace irsrelay
