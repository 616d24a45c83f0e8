#include "irsrelay/ao.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

namespace irsrelay {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Proposed: return "Proposed";
    case Scheme::RelayOnly: return "RelayOnly";
    case Scheme::RandomIRS: return "RandomIRS";
    case Scheme::Independent: return "Independent";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::Proposed, Scheme::RelayOnly, Scheme::RandomIRS, Scheme::Independent}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::string_view to_string(SubproblemKind k) {
  switch (k) {
    case SubproblemKind::Bs: return "bs";
    case SubproblemKind::Relay: return "relay";
    case SubproblemKind::Irs: return "irs";
  }
  return "?";
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

// Stream tags; kept away from the channel-link ids.
constexpr std::uint64_t kThetaStream = 0x7e7a;
constexpr std::uint64_t kSubproblemStream = 0x5b9;

CMat matched_filter(const std::vector<CRow>& h, double power) {
  const Eigen::Index K = static_cast<Eigen::Index>(h.size());
  CMat W(h.front().size(), K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double n = h[k].norm();
    if (n > 0.0) {
      W.col(k) = h[k].adjoint() / n;
    } else {
      W.col(k).setZero();
      W(0, k) = 1.0;
    }
  }
  return W * std::sqrt(power / static_cast<double>(K));
}

SubproblemOptions sub_options(const AOConfig& config, IrsMode mode, std::uint64_t seed) {
  SubproblemOptions o;
  o.sca_inner_iters = config.sca_inner_iters;
  o.sca_tol = config.sca_tol;
  o.randomization.n_samples = config.randomization_samples;
  o.solver = config.solver;
  o.irs_mode = mode;
  o.seed = seed;
  return o;
}

}  // namespace

BeamformingState initialize_state(const ChannelSet& ch, const SystemParams& params, Scheme scheme,
                                  std::uint64_t seed) {
  const Dims d = ch.dims();
  BeamformingState s;
  s.theta = CVec::Zero(d.N);
  if (scheme != Scheme::RelayOnly) {
    std::mt19937_64 rng(mix_seed(seed, kThetaStream, 0));
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int n = 0; n < d.N; ++n) s.theta(n) = std::polar(1.0, phase(rng));
  }
  const EffectiveChannels eff = effective_channels(ch, s.theta);
  s.G = matched_filter(eff.h_BS, params.P_BS_max);
  const bool irs_in_phase2 = scheme != Scheme::Independent;
  s.F = matched_filter(irs_in_phase2 ? eff.h_R : ch.h_R, params.P_R_max);
  return s;
}

double restore_threshold(double gamma_th, int attempts, const std::function<bool(double)>& feasible,
                         int* halvings) {
  double th = gamma_th;
  for (int h = 0; h <= attempts; ++h) {
    if (feasible(th)) {
      if (halvings) *halvings = h;
      return th;
    }
    th *= 0.5;
  }
  throw RestorationExhausted("relay SINR threshold unattainable after " + std::to_string(attempts) +
                             " halvings");
}

RestoreOutcome feasibility_restore(const ChannelSet& ch, const SystemParams& params, const BeamformingState& start,
                                   const AOConfig& config, IrsMode mode, std::uint64_t seed) {
  const SubproblemOptions opts = sub_options(config, mode, seed);
  const RelayFeasibilityResult best = maximize_relay_sinr(ch, start, params, params.gamma_R_th, opts);
  RestoreOutcome out;
  out.state = best.state;
  out.min_relay_sinr = best.min_relay_sinr;
  out.gamma_th = restore_threshold(
      params.gamma_R_th, config.restore_attempts, [&](double th) { return best.min_relay_sinr >= th; },
      &out.halvings);
  return out;
}

AOResult run_ao(const ChannelSet& ch, const SystemParams& params, const AOConfig& config, Scheme scheme,
                std::uint64_t seed) {
  const IrsMode mode = scheme == Scheme::Independent ? IrsMode::FirstPhaseOnly : IrsMode::BothPhases;
  const bool optimize_irs_phase = scheme == Scheme::Proposed || scheme == Scheme::Independent;

  AOResult res;
  AOTrace& tr = res.trace;
  const BeamformingState init = initialize_state(ch, params, scheme, seed);
  {
    const auto g = relay_mf_sinr(ch, init.G, init.theta, params);
    tr.initial_min_relay_sinr = *std::min_element(g.begin(), g.end());
  }
  const RestoreOutcome restored =
      feasibility_restore(ch, params, init, config, mode, mix_seed(seed, kSubproblemStream, 0));
  tr.eff_gamma_th = restored.gamma_th;
  tr.restore_halvings = restored.halvings;

  SystemParams eff = params;
  eff.gamma_R_th = restored.gamma_th;
  BeamformingState state = restored.state;
  double current = sinr_report(ch, state, eff, mode).sum_rate;
  tr.sum_rate.push_back(current);

  for (int it = 1; it <= config.max_outer_iters; ++it) {
    const double before = current;
    for (SubproblemKind kind : config.order) {
      if (kind == SubproblemKind::Irs && !optimize_irs_phase) continue;
      const SubproblemOptions opts =
          sub_options(config, mode, mix_seed(seed, kSubproblemStream, static_cast<std::uint64_t>(it) * 4 +
                                                                           static_cast<std::uint64_t>(kind) + 1));
      SubproblemSolution sol;
      switch (kind) {
        case SubproblemKind::Bs: sol = optimize_bs(ch, state, eff, opts); break;
        case SubproblemKind::Relay: sol = optimize_relay(ch, state, eff, opts); break;
        case SubproblemKind::Irs: sol = optimize_irs(ch, state, eff, opts); break;
      }
      SubproblemRecord rec;
      rec.outer = it;
      rec.kind = kind;
      rec.surrogate = sol.surrogate;
      rec.status = sol.status;
      rec.sdp_solves = static_cast<int>(sol.trace.size());
      for (const auto& row : sol.trace) rec.solver_iterations += row.solver_iterations;
      tr.clip_events += sol.clip_events;
      // The drivers already gate on the true objective; this is the outer guard.
      if (sol.accepted && sol.true_objective >= current &&
          relay_feasible(sinr_report(ch, sol.state, eff, mode), eff.gamma_R_th, 1e-4)) {
        state = sol.state;
        current = sol.true_objective;
        rec.accepted = true;
      }
      rec.true_value = current;
      tr.subproblems.push_back(rec);
    }
    tr.sum_rate.push_back(current);
    if (current - before < config.outer_tol) {
      tr.converged = true;
      break;
    }
  }

  res.state = state;
  res.report = sinr_report(ch, state, eff, mode);
  tr.relay_feasible = relay_feasible(res.report, eff.gamma_R_th, 1e-4);
  return res;
}

TrialResult run_scheme(Scheme scheme, const ChannelSet& ch, const SystemParams& params, const AOConfig& config,
                       std::uint64_t seed) {
  TrialResult r;
  r.scheme = scheme;
  r.channel_checksum = ch.checksum();
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const AOResult ao = run_ao(ch, params, config, scheme, seed);
    r.sum_rate = ao.report.sum_rate;
    r.feasible = ao.trace.relay_feasible;
    r.eff_gamma_th = ao.trace.eff_gamma_th;
    r.iters = ao.trace.outer_iterations();
    r.report = ao.report;
    r.trace_sum_rate = ao.trace.sum_rate;
  } catch (const RestorationExhausted& e) {
    r.feasible = false;
    r.error = e.what();
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace irsrelay
