#include "irsrelay/subproblems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "irsrelay/epigraph.hpp"

namespace irsrelay {

using conic::AffineExpr;
using conic::ProblemBuilder;
using conic::Var;

namespace {

// Keeps S = 1/SNR finite when a beamformer has collapsed to zero.
constexpr double kSnrFloor = 1e-6;

SlackLocalPoint downlink_point(const CRow& h, const CMat& W, int k, double sigma2) {
  const CRow hw = h * W;
  double interf = 0.0;
  for (Eigen::Index j = 0; j < hw.size(); ++j) {
    if (j != k) interf += std::norm(hw(j));
  }
  const double snr = std::norm(hw(k)) / sigma2;
  return {1.0 / std::max(snr, kSnrFloor), interf / sigma2 + 1.0};
}

SlackLocalPoint relay_point(const CMat& alpha, int k, double sigma_R2) {
  const double t = alpha.col(k).squaredNorm() / sigma_R2;
  double interf = 0.0;
  for (Eigen::Index j = 0; j < alpha.cols(); ++j) {
    if (j != k) interf += std::norm(alpha.col(k).dot(alpha.col(j)));
  }
  const double tt = std::max(t, kSnrFloor);
  return {1.0 / (tt * tt), std::max(interf / (sigma_R2 * sigma_R2) + t, kSnrFloor)};
}

void check_user_count(const ChannelSet& ch, const BeamformingState& s, const SystemParams& p,
                      const LocalPoints& locs) {
  const Dims d = ch.dims();
  const auto K = static_cast<std::size_t>(d.K);
  if (s.G.rows() != d.M || s.G.cols() != d.K || s.F.rows() != d.L || s.F.cols() != d.K ||
      s.theta.size() != d.N) {
    throw DimensionError("beamforming state does not match channel dimensions");
  }
  if (p.sigma_k2.size() != K) throw DimensionError("sigma_k2 needs one entry per user");
  if (locs.first.size() != K || locs.second.size() != K || locs.relay.size() != K) {
    throw DimensionError("local points need one entry per user");
  }
}

// R <= bound, with S = S_loc * S_hat and I = I_loc * I_hat.
AffineExpr scaled_bound(const AffineBound& bd, Var S_hat, Var I_hat) {
  AffineExpr e(bd.constant - bd.coeff_S * bd.S_loc - bd.coeff_I * bd.I_loc);
  e.add(S_hat, bd.coeff_S * bd.S_loc);
  e.add(I_hat, bd.coeff_I * bd.I_loc);
  return e;
}

AffineExpr scaled_bound4(const AffineBound4& bd, Var S1, Var I1, Var S2, Var I2) {
  AffineExpr e(bd.constant - bd.coeff_S1 * bd.S1_loc - bd.coeff_I1 * bd.I1_loc - bd.coeff_S2 * bd.S2_loc -
               bd.coeff_I2 * bd.I2_loc);
  e.add(S1, bd.coeff_S1 * bd.S1_loc);
  e.add(I1, bd.coeff_I1 * bd.I1_loc);
  e.add(S2, bd.coeff_S2 * bd.S2_loc);
  e.add(I2, bd.coeff_I2 * bd.I2_loc);
  return e;
}

// S_hat with 1/(S_loc S_hat) <= snr_expr, where snr_expr is affine in a PSD block.
Var signal_slack(ProblemBuilder& b, const AffineExpr& snr_expr, double S_loc) {
  AffineExpr v = snr_expr;
  v *= S_loc;
  return conic::emit_hyperbolic(b, std::nullopt, v, AffineExpr(1.0)).u;
}

// S_hat with S_hat >= 1/(S_loc snr) for a constant snr.
Var fixed_signal_slack(ProblemBuilder& b, double snr, double S_loc) {
  const Var s = b.add_nonneg();
  b.add_greater_equal(s, 1.0 / (S_loc * std::max(snr, kSnrFloor)));
  return s;
}

// I_hat with I_loc I_hat >= rhs.
Var interference_slack(ProblemBuilder& b, const AffineExpr& rhs, double I_loc) {
  const Var s = b.add_nonneg();
  AffineExpr lhs;
  lhs.add(s, I_loc);
  b.add_greater_equal(lhs, rhs);
  return s;
}

HermMat scaled_outer(const CVec& v, double s) { return HermMat::outer(v) * s; }

}  // namespace

bool relay_feasible(const SINRReport& r, double gamma_th, double tol) {
  return std::all_of(r.gammaR.begin(), r.gammaR.end(), [&](double g) { return g >= gamma_th - tol; });
}

LocalPoints local_points(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                         IrsMode mode) {
  const Dims d = ch.dims();
  const EffectiveChannels eff = effective_channels(ch, state.theta);
  const CMat alpha = eff.H_BS_R * state.G;
  LocalPoints lp;
  for (int k = 0; k < d.K; ++k) {
    lp.first.push_back(downlink_point(eff.h_BS[k], state.G, k, params.sigma_k2[k]));
    const CRow& h2 = mode == IrsMode::BothPhases ? eff.h_R[k] : ch.h_R[k];
    lp.second.push_back(downlink_point(h2, state.F, k, params.sigma_k2[k]));
    lp.relay.push_back(relay_point(alpha, k, params.sigma_R2));
  }
  return lp;
}

BsSdp build_bs_sdp(int kp, const ChannelSet& ch, const BeamformingState& state, const LocalPoints& locs,
                   const SystemParams& params, IrsMode mode, BsObjective objective) {
  check_user_count(ch, state, params, locs);
  const Dims d = ch.dims();
  if (kp < 0 || kp >= d.K) throw DimensionError("build_bs_sdp: user index out of range");

  BsSdp sdp;
  sdp.user = kp;
  sdp.locs = locs;
  sdp.power_scale = params.P_BS_max;
  ProblemBuilder& b = sdp.builder;
  const double P = params.P_BS_max;
  const double sR = params.sigma_R2;

  const EffectiveChannels eff = effective_channels(ch, state.theta);
  const CMat alpha = eff.H_BS_R * state.G;
  const SINRReport rep = sinr_report(ch, state, params, mode);

  sdp.g_block = b.add_psd_block(2 * d.M);
  const int gb = sdp.g_block;

  double fixed_power = 0.0;
  for (int j = 0; j < d.K; ++j) {
    if (j != kp) fixed_power += state.G.col(j).squaredNorm() / P;
  }
  b.add_less_equal(b.embedded_trace(gb, HermMat::identity(d.M)), 1.0 - fixed_power);

  if (objective == BsObjective::SumRate) {
    AffineExpr obj;
    for (int k = 0; k < d.K; ++k) {
      const double s2 = params.sigma_k2[k];
      const CVec hk = eff.h_BS[k].adjoint();
      const HermMat hh = scaled_outer(hk, P / s2);
      const SlackLocalPoint& lp = locs.first[k];

      Var S;
      if (k == kp) {
        S = signal_slack(b, b.embedded_trace(gb, hh), lp.S);
      } else {
        S = fixed_signal_slack(b, std::norm((eff.h_BS[k] * state.G.col(k))(0)) / s2, lp.S);
      }
      AffineExpr interf(1.0);
      for (int j = 0; j < d.K; ++j) {
        if (j == k) continue;
        if (j == kp) {
          interf += b.embedded_trace(gb, hh);
        } else {
          interf += AffineExpr(std::norm((eff.h_BS[k] * state.G.col(j))(0)) / s2);
        }
      }
      const Var I = interference_slack(b, interf, lp.I);
      const AffineBound bd = taylor_bound_u(lp.S, lp.I, 1.0 + rep.gamma2[k]);
      const Var R = b.add_free();
      b.add_less_equal(R, scaled_bound(bd, S, I));
      obj += R;
      sdp.S1.push_back(S);
      sdp.I1.push_back(I);
      sdp.R.push_back(R);
      sdp.rate_bounds.push_back(bd);
    }
    b.set_objective(obj);
  } else {
    sdp.min_sinr = b.add_free();
    b.set_objective(*sdp.min_sinr);
  }

  // Relay matched-filter SINR rows, one per stream.
  const CMat& H = eff.H_BS_R;
  std::vector<CVec> u(d.K);
  for (int j = 0; j < d.K; ++j) u[j] = H.adjoint() * alpha.col(j);
  const HermMat HH = HermMat::symmetrized(H.adjoint() * H) * (P / sR);
  for (int k = 0; k < d.K; ++k) {
    const SlackLocalPoint& lp = locs.relay[k];
    Var S;
    AffineExpr interf;
    if (k == kp) {
      AffineExpr t = b.embedded_trace(gb, HH);
      t *= std::sqrt(lp.S);
      S = conic::emit_squared_linear(b, t, std::nullopt).s;
      HermMat acc = HH;
      for (int j = 0; j < d.K; ++j) {
        if (j != kp) acc = acc + scaled_outer(u[j], P / (sR * sR));
      }
      interf = b.embedded_trace(gb, acc);
    } else {
      const double t = alpha.col(k).squaredNorm() / sR;
      S = fixed_signal_slack(b, t * t, lp.S);
      double c = t;
      for (int j = 0; j < d.K; ++j) {
        if (j != k && j != kp) c += std::norm(alpha.col(k).dot(alpha.col(j))) / (sR * sR);
      }
      interf = b.embedded_trace(gb, scaled_outer(u[k], P / (sR * sR)));
      interf += AffineExpr(c);
    }
    const Var I = interference_slack(b, interf, lp.I);
    const AffineBound bd = taylor_bound_v(lp.S, lp.I);
    if (sdp.min_sinr) {
      b.add_greater_equal(scaled_bound(bd, S, I), *sdp.min_sinr);
    } else {
      b.add_greater_equal(scaled_bound(bd, S, I), params.gamma_R_th);
    }
    sdp.SR.push_back(S);
    sdp.IR.push_back(I);
    sdp.relay_bounds.push_back(bd);
  }
  return sdp;
}

RelaySdp build_relay_sdp(const ChannelSet& ch, const BeamformingState& state, const LocalPoints& locs,
                         const SystemParams& params, IrsMode mode) {
  check_user_count(ch, state, params, locs);
  const Dims d = ch.dims();
  RelaySdp sdp;
  sdp.locs = locs;
  sdp.power_scale = params.P_R_max;
  ProblemBuilder& b = sdp.builder;
  const double P = params.P_R_max;

  const EffectiveChannels eff = effective_channels(ch, state.theta);
  const SINRReport rep = sinr_report(ch, state, params, mode);

  AffineExpr power;
  for (int k = 0; k < d.K; ++k) {
    sdp.f_blocks.push_back(b.add_psd_block(2 * d.L));
    power += b.embedded_trace(sdp.f_blocks.back(), HermMat::identity(d.L));
  }
  b.add_less_equal(power, 1.0);

  AffineExpr obj;
  for (int k = 0; k < d.K; ++k) {
    const CRow& h2 = mode == IrsMode::BothPhases ? eff.h_R[k] : ch.h_R[k];
    const HermMat hh = scaled_outer(h2.adjoint(), P / params.sigma_k2[k]);
    const SlackLocalPoint& lp = locs.second[k];
    const Var S = signal_slack(b, b.embedded_trace(sdp.f_blocks[k], hh), lp.S);
    AffineExpr interf(1.0);
    for (int j = 0; j < d.K; ++j) {
      if (j != k) interf += b.embedded_trace(sdp.f_blocks[j], hh);
    }
    const Var I = interference_slack(b, interf, lp.I);
    const AffineBound bd = taylor_bound_u(lp.S, lp.I, 1.0 + rep.gamma1[k]);
    const Var R = b.add_free();
    b.add_less_equal(R, scaled_bound(bd, S, I));
    obj += R;
    sdp.S2.push_back(S);
    sdp.I2.push_back(I);
    sdp.R.push_back(R);
    sdp.rate_bounds.push_back(bd);
  }
  b.set_objective(obj);
  return sdp;
}

IrsSdp build_irs_sdp(const ChannelSet& ch, const BeamformingState& state, const LocalPoints& locs,
                     const SystemParams& params, IrsMode mode) {
  check_user_count(ch, state, params, locs);
  const Dims d = ch.dims();
  const int n = d.N + 1;
  IrsSdp sdp;
  sdp.locs = locs;
  ProblemBuilder& b = sdp.builder;
  sdp.phi_block = b.add_psd_block(2 * n);
  const int pb = sdp.phi_block;
  const double sR = params.sigma_R2;

  for (int i = 0; i < d.N; ++i) b.add_less_equal(b.embedded_diag(pb, i), 1.0);
  b.add_equality(b.embedded_diag(pb, d.N), 1.0);

  // Independent scheme: phase-2 SINR is fixed by the IRS-free relay channel.
  std::vector<double> gamma2_fixed;
  if (mode == IrsMode::FirstPhaseOnly) gamma2_fixed = sinr_report(ch, state, params, mode).gamma2;

  AffineExpr obj;
  for (int k = 0; k < d.K; ++k) {
    const LiftedChannels lc = lifted_channel_matrices(ch, k);
    const double s2 = params.sigma_k2[k];

    auto downlink = [&](const CMat& Hl, const CMat& W, const SlackLocalPoint& lp, Var& S, Var& I) {
      S = signal_slack(b, b.embedded_trace(pb, scaled_outer(Hl * W.col(k), 1.0 / s2)), lp.S);
      AffineExpr interf(1.0);
      for (int j = 0; j < d.K; ++j) {
        if (j != k) interf += b.embedded_trace(pb, scaled_outer(Hl * W.col(j), 1.0 / s2));
      }
      I = interference_slack(b, interf, lp.I);
    };

    Var S1, I1;
    downlink(lc.H_B_I, state.G, locs.first[k], S1, I1);
    sdp.S1.push_back(S1);
    sdp.I1.push_back(I1);
    const Var R = b.add_free();
    if (mode == IrsMode::BothPhases) {
      Var S2, I2;
      downlink(lc.H_R_I, state.F, locs.second[k], S2, I2);
      sdp.S2.push_back(S2);
      sdp.I2.push_back(I2);
      const AffineBound4 bd =
          taylor_bound_u3(locs.first[k].S, locs.first[k].I, locs.second[k].S, locs.second[k].I);
      b.add_less_equal(R, scaled_bound4(bd, S1, I1, S2, I2));
      sdp.rate_bounds.push_back(bd);
    } else {
      const AffineBound bd = taylor_bound_u(locs.first[k].S, locs.first[k].I, 1.0 + gamma2_fixed[k]);
      b.add_less_equal(R, scaled_bound(bd, S1, I1));
      sdp.rate_bounds_1.push_back(bd);
    }
    sdp.R.push_back(R);
    obj += R;
  }
  b.set_objective(obj);

  // conj(alpha_k) / sigma_R = Dt_k phi
  std::vector<CMat> Dt(d.K);
  for (int k = 0; k < d.K; ++k) {
    CMat D(d.L, n);
    D.leftCols(d.N) = ch.H_R_IRS.adjoint() * (ch.H_BS_IRS * state.G.col(k)).asDiagonal();
    D.col(d.N) = ch.H_BS_R * state.G.col(k);
    Dt[k] = D.conjugate() / std::sqrt(sR);
  }

  // |alpha_k^H alpha_j|^2 / sigma_R^4 <= scale_kj * e_kj, shared by both streams of the pair.
  std::vector<std::vector<AffineExpr>> pair_terms(d.K, std::vector<AffineExpr>(d.K));
  for (int k = 0; k < d.K; ++k) {
    for (int j = k + 1; j < d.K; ++j) {
      const double scale = std::max(std::sqrt(locs.relay[k].I * locs.relay[j].I), kSnrFloor);
      const double inv = 1.0 / std::sqrt(scale);
      const CMat Q = Dt[k].adjoint() * Dt[j];
      AffineExpr re = b.embedded_trace_re(pb, Q);
      AffineExpr im = b.embedded_trace_im(pb, Q);
      re *= inv;
      im *= inv;
      const conic::QuadraticFormBlock qf = conic::emit_quadratic_form(b, {re, im}, std::nullopt);
      AffineExpr e;
      e.add(qf.t, scale);
      pair_terms[k][j] = e;
      pair_terms[j][k] = e;
    }
  }

  for (int k = 0; k < d.K; ++k) {
    const SlackLocalPoint& lp = locs.relay[k];
    const HermMat E = HermMat::symmetrized(Dt[k].adjoint() * Dt[k]);
    AffineExpr t = b.embedded_trace(pb, E);
    AffineExpr interf = t;
    t *= std::sqrt(lp.S);
    const Var S = conic::emit_squared_linear(b, t, std::nullopt).s;
    for (int j = 0; j < d.K; ++j) {
      if (j != k) interf += pair_terms[k][j];
    }
    const Var I = interference_slack(b, interf, lp.I);
    const AffineBound bd = taylor_bound_v(lp.S, lp.I);
    b.add_greater_equal(scaled_bound(bd, S, I), params.gamma_R_th);
    sdp.SR.push_back(S);
    sdp.IR.push_back(I);
    sdp.relay_bounds.push_back(bd);
  }
  return sdp;
}

// ---------------------------------------------------------------------------

namespace {

SlackLocalPoint unscale(const ProblemBuilder& b, const conic::ConicSolution& sol, Var S, Var I,
                        const SlackLocalPoint& lp) {
  return {b.value(sol, S) * lp.S, b.value(sol, I) * lp.I};
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Evaluator {
  const ChannelSet& ch;
  const SystemParams& params;
  const SubproblemOptions& opts;

  // True sum-rate of a relay-feasible state, nullopt otherwise.
  std::optional<double> operator()(const BeamformingState& s) const {
    const SINRReport r = sinr_report(ch, s, params, opts.irs_mode);
    if (!relay_feasible(r, params.gamma_R_th, opts.relay_sinr_tol)) return std::nullopt;
    return r.sum_rate;
  }
};

// -rho (tr(H) - u^H H u) for the Hermitian matrix H held by `block`, with u the
// unit incumbent direction. tr(H) - u^H H u bounds tr(H) - lambda_max(H) from above.
AffineExpr rank_penalty(const ProblemBuilder& b, int block, const CVec& incumbent, double rho) {
  HermMat P = HermMat::identity(incumbent.size());
  const double nrm = incumbent.norm();
  if (nrm > 0.0) P = P - HermMat::outer(incumbent / nrm);
  AffineExpr e = b.embedded_trace(block, P);
  e *= -rho;
  return e;
}

double rate_sum(const ProblemBuilder& b, const conic::ConicSolution& sol, const std::vector<Var>& R) {
  double s = 0.0;
  for (const Var& r : R) s += b.value(sol, r);
  return s;
}

struct Attempt {
  conic::SolveStatus status = conic::SolveStatus::Optimal;
  int iterations = 0;
  double surrogate = 0.0;
  bool accepted = false;
  bool rank_one = false;
};

// Shared SCA repetitions. `attempt(step, rho, out, incumbent, seed)` builds,
// solves and recovers one SDP, with rank penalty weight rho (0 = plain
// relaxation). The penalty ladder only runs when the plain relaxation gave a
// higher-rank optimum whose candidates were all rejected.
template <class Try>
SubproblemSolution sca_loop(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                            const SubproblemOptions& opts, int steps_per_rep, Try attempt) {
  SubproblemSolution out;
  out.state = state;
  const Evaluator eval{ch, params, opts};
  double incumbent = eval(state).value_or(kNegInf);
  double prev_surrogate = kNegInf;
  std::uint64_t seed = opts.seed;
  std::vector<double> ladder{0.0};
  ladder.insert(ladder.end(), opts.rank_penalties.begin(), opts.rank_penalties.end());
  for (int rep = 0; rep < opts.sca_inner_iters; ++rep) {
    bool any = false;
    double rep_surrogate = kNegInf;
    for (int s = 0; s < steps_per_rep; ++s) {
      SubproblemTraceRow row;
      bool have_surrogate = false;
      for (double rho : ladder) {
        const Attempt a = attempt(s, rho, out, incumbent, seed++);
        row.solver_iterations += a.iterations;
        row.status = out.status = a.status;
        if (a.status == conic::SolveStatus::Infeasible) out.infeasible = true;
        if (a.status == conic::SolveStatus::Optimal && (!have_surrogate || a.accepted)) {
          row.surrogate = out.surrogate = a.surrogate;
          have_surrogate = true;
        }
        if (a.accepted) {
          row.accepted = true;
          break;
        }
        if (a.status != conic::SolveStatus::Optimal || (rho == 0.0 && a.rank_one)) break;
      }
      any = any || row.accepted;
      row.true_value = incumbent;
      if (have_surrogate) rep_surrogate = row.surrogate;
      out.trace.push_back(row);
    }
    if (!any) break;
    if (rep_surrogate - prev_surrogate < opts.sca_tol) break;
    prev_surrogate = rep_surrogate;
  }
  out.accepted = std::any_of(out.trace.begin(), out.trace.end(), [](const auto& r) { return r.accepted; });
  out.true_objective = sinr_report(ch, out.state, params, opts.irs_mode).sum_rate;
  return out;
}

}  // namespace

SubproblemSolution optimize_bs(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                               const SubproblemOptions& opts) {
  const Evaluator eval{ch, params, opts};
  const int K = ch.dims().K;
  auto attempt = [&](int kp, double rho, SubproblemSolution& out, double& incumbent, std::uint64_t seed) {
    Attempt a;
    const LocalPoints lp = local_points(ch, out.state, params, opts.irs_mode);
    BsSdp sdp = build_bs_sdp(kp, ch, out.state, lp, params, opts.irs_mode);
    const CVec inc = out.state.G.col(kp);
    if (rho > 0.0) sdp.builder.set_objective(sdp.builder.objective() + rank_penalty(sdp.builder, sdp.g_block, inc, rho));
    const conic::ConicSolution sol = conic::solve(sdp.builder.build(), opts.solver);
    a.status = sol.status;
    a.iterations = sol.iterations;
    if (!sol.optimal()) return a;
    a.surrogate = rate_sum(sdp.builder, sol, sdp.R);
    LocalPoints sl;
    for (int k = 0; k < K; ++k) {
      sl.first.push_back(unscale(sdp.builder, sol, sdp.S1[k], sdp.I1[k], lp.first[k]));
      sl.relay.push_back(unscale(sdp.builder, sol, sdp.SR[k], sdp.IR[k], lp.relay[k]));
    }
    out.slacks_at_optimum = std::move(sl);

    const HermMat Gopt = sdp.builder.embedded_value(sol, sdp.g_block) * sdp.power_scale;
    BeamformingState cand = out.state;
    try {
      const RandomizationResult rr = randomize_rank_one(
          Gopt, RankOneTarget::Bs,
          [&](const CVec& g) {
            cand.G.col(kp) = g;
            return eval(cand);
          },
          seed, opts.randomization, std::isfinite(incumbent) ? &inc : nullptr, incumbent);
      a.rank_one = rr.rank_one_shortcut;
      if (rr.score >= incumbent) {
        out.state.G.col(kp) = rr.vectors.front();
        incumbent = rr.score;
        a.accepted = true;
      }
    } catch (const NoFeasibleCandidateError&) {
    }
    return a;
  };
  return sca_loop(ch, state, params, opts, K, attempt);
}

SubproblemSolution optimize_relay(const ChannelSet& ch, const BeamformingState& state,
                                  const SystemParams& params, const SubproblemOptions& opts) {
  const Evaluator eval{ch, params, opts};
  const int K = ch.dims().K;
  auto attempt = [&](int, double rho, SubproblemSolution& out, double& incumbent, std::uint64_t seed) {
    Attempt a;
    const LocalPoints lp = local_points(ch, out.state, params, opts.irs_mode);
    RelaySdp sdp = build_relay_sdp(ch, out.state, lp, params, opts.irs_mode);
    std::vector<CVec> inc;
    for (int k = 0; k < K; ++k) inc.push_back(out.state.F.col(k));
    if (rho > 0.0) {
      AffineExpr obj = sdp.builder.objective();
      for (int k = 0; k < K; ++k) obj += rank_penalty(sdp.builder, sdp.f_blocks[k], inc[k], rho);
      sdp.builder.set_objective(obj);
    }
    const conic::ConicSolution sol = conic::solve(sdp.builder.build(), opts.solver);
    a.status = sol.status;
    a.iterations = sol.iterations;
    if (!sol.optimal()) return a;
    a.surrogate = rate_sum(sdp.builder, sol, sdp.R);
    LocalPoints sl;
    for (int k = 0; k < K; ++k) {
      sl.second.push_back(unscale(sdp.builder, sol, sdp.S2[k], sdp.I2[k], lp.second[k]));
    }
    out.slacks_at_optimum = std::move(sl);

    std::vector<HermMat> Fopt;
    for (int blk : sdp.f_blocks) Fopt.push_back(sdp.builder.embedded_value(sol, blk) * sdp.power_scale);
    BeamformingState cand = out.state;
    try {
      const RandomizationResult rr = randomize_rank_one_joint(
          Fopt, RankOneTarget::Relay,
          [&](const std::vector<CVec>& f) {
            for (int k = 0; k < K; ++k) cand.F.col(k) = f[k];
            return eval(cand);
          },
          seed, opts.randomization, std::isfinite(incumbent) ? &inc : nullptr, incumbent);
      a.rank_one = rr.rank_one_shortcut;
      if (rr.score >= incumbent) {
        for (int k = 0; k < K; ++k) out.state.F.col(k) = rr.vectors[k];
        incumbent = rr.score;
        a.accepted = true;
      }
    } catch (const NoFeasibleCandidateError&) {
    }
    return a;
  };
  return sca_loop(ch, state, params, opts, 1, attempt);
}

SubproblemSolution optimize_irs(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                                const SubproblemOptions& opts) {
  const Evaluator eval{ch, params, opts};
  const Dims d = ch.dims();
  auto attempt = [&](int, double rho, SubproblemSolution& out, double& incumbent, std::uint64_t seed) {
    Attempt a;
    const LocalPoints lp = local_points(ch, out.state, params, opts.irs_mode);
    IrsSdp sdp = build_irs_sdp(ch, out.state, lp, params, opts.irs_mode);
    const CVec inc = lifted_phi(out.state.theta);
    if (rho > 0.0) {
      sdp.builder.set_objective(sdp.builder.objective() + rank_penalty(sdp.builder, sdp.phi_block, inc, rho));
    }
    const conic::ConicSolution sol = conic::solve(sdp.builder.build(), opts.solver);
    a.status = sol.status;
    a.iterations = sol.iterations;
    if (!sol.optimal()) return a;
    a.surrogate = rate_sum(sdp.builder, sol, sdp.R);
    LocalPoints sl;
    for (int k = 0; k < d.K; ++k) {
      sl.first.push_back(unscale(sdp.builder, sol, sdp.S1[k], sdp.I1[k], lp.first[k]));
      if (!sdp.S2.empty()) sl.second.push_back(unscale(sdp.builder, sol, sdp.S2[k], sdp.I2[k], lp.second[k]));
      sl.relay.push_back(unscale(sdp.builder, sol, sdp.SR[k], sdp.IR[k], lp.relay[k]));
    }
    out.slacks_at_optimum = std::move(sl);

    const HermMat Phi = sdp.builder.embedded_value(sol, sdp.phi_block);
    BeamformingState cand = out.state;
    try {
      const RandomizationResult rr = randomize_rank_one(
          Phi, RankOneTarget::Irs,
          [&](const CVec& phi) {
            cand.theta = phi.head(d.N).conjugate();
            return eval(cand);
          },
          seed, opts.randomization, std::isfinite(incumbent) ? &inc : nullptr, incumbent);
      a.rank_one = rr.rank_one_shortcut;
      if (rr.score >= incumbent) {
        out.state.theta = rr.vectors.front().head(d.N).conjugate();
        out.clip_events += rr.clip_events;
        incumbent = rr.score;
        a.accepted = true;
      }
    } catch (const NoFeasibleCandidateError&) {
    }
    return a;
  };
  return sca_loop(ch, state, params, opts, 1, attempt);
}

RelayFeasibilityResult maximize_relay_sinr(const ChannelSet& ch, const BeamformingState& state,
                                           const SystemParams& params, double target,
                                           const SubproblemOptions& opts, int max_sweeps) {
  const Dims d = ch.dims();
  auto min_sinr = [&](const BeamformingState& s) {
    const std::vector<double> g = relay_mf_sinr(ch, s.G, s.theta, params);
    return *std::min_element(g.begin(), g.end());
  };
  RelayFeasibilityResult res;
  res.state = state;
  res.min_relay_sinr = min_sinr(state);
  std::uint64_t seed = opts.seed;
  while (res.sweeps < max_sweeps && res.min_relay_sinr < target) {
    const double start = res.min_relay_sinr;
    ++res.sweeps;
    for (int kp = 0; kp < d.K && res.min_relay_sinr < target; ++kp) {
      const LocalPoints lp = local_points(ch, res.state, params, opts.irs_mode);
      const BsSdp sdp =
          build_bs_sdp(kp, ch, res.state, lp, params, opts.irs_mode, BsObjective::MaxMinRelaySinr);
      const conic::ConicSolution sol = conic::solve(sdp.builder.build(), opts.solver);
      if (!sol.optimal()) continue;
      const HermMat Gopt = sdp.builder.embedded_value(sol, sdp.g_block) * sdp.power_scale;
      BeamformingState cand = res.state;
      const RandomizationResult rr = randomize_rank_one(
          Gopt, RankOneTarget::Bs,
          [&](const CVec& g) -> std::optional<double> {
            cand.G.col(kp) = g;
            return min_sinr(cand);
          },
          seed++, opts.randomization);
      if (rr.score > res.min_relay_sinr) {
        res.state.G.col(kp) = rr.vectors.front();
        res.min_relay_sinr = rr.score;
      }
    }
    if (res.min_relay_sinr - start < 1e-3 * std::max(1.0, start)) break;
  }
  return res;
}

}  // namespace irsrelay
