// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fail.
// Optional argument: number of desk-preset trials for the scheme-ordering check
// (default 50).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>

#include "conic_suite.hpp"
#include "helpers.hpp"
#include "irsrelay/harness.hpp"

using namespace irsrelay;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::printf("%s %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmtd(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void solver_suite() {
  const auto cases = conic_suite::analytic_cases();
  double worst_err = 0.0, worst_gap = 0.0;
  bool all_optimal = true;
  const auto t0 = Clock::now();
  for (const auto& c : cases) {
    const conic::ConicSolution s = conic::solve(c.problem);
    if (!s.optimal()) {
      all_optimal = false;
      std::printf("  %s: %s\n", c.name.c_str(), conic::to_string(s.status).c_str());
      continue;
    }
    worst_err = std::max(worst_err, std::abs(s.primal_objective - c.expected));
    worst_gap = std::max(worst_gap, s.duality_gap);
  }
  const double secs = seconds_since(t0);
  const bool ok = cases.size() >= 20 && all_optimal && worst_err <= 1e-5 && worst_gap <= 1e-7 && secs < 1.0;
  report(1, ok, "conic solver on analytic problems",
         std::to_string(cases.size()) + " problems, max |err| " + fmtd("%.2e", worst_err) + ", max gap " +
             fmtd("%.2e", worst_gap) + ", " + fmtd("%.3f", secs) + " s");
}

void lifting_identities() {
  std::mt19937_64 rng(202);
  const Dims d{4, 2, 8, 2};
  const ChannelSet ch = testutil::desk_channels(d, 202);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const CVec theta = testutil::random_theta(rng, d.N);
    const CVec phi = lifted_phi(theta);
    const EffectiveChannels e = effective_channels(ch, theta);
    const int k = t % d.K;
    const LiftedChannels lc = lifted_channel_matrices(ch, k);
    const CVec x = testutil::random_cvec(rng, d.M);
    const CVec y = testutil::random_cvec(rng, d.L);
    const cplx a = (phi.adjoint() * lc.H_B_I * x)(0);
    const cplx b = (e.h_BS[k] * x)(0);
    const cplx c = (phi.adjoint() * lc.H_R_I * y)(0);
    const cplx f = (e.h_R[k] * y)(0);
    // relative to the channel scale so the bound is unit-free
    const double scale = std::max({std::abs(b), std::abs(f), 1e-300});
    worst = std::max({worst, std::abs(a - b) / scale, std::abs(c - f) / scale});
  }
  std::uniform_real_distribution<double> ud(-3.0, 3.0);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    const double u = ud(rng), v = ud(rng), w = ud(rng);
    const bool member = u >= 0.0 && v >= 0.0 && u * v >= w * w;
    Eigen::SelfAdjointEigenSolver<RMat> es(conic::hyperbolic_block_value(u, v, w), Eigen::EigenvaluesOnly);
    if ((es.eigenvalues()(0) >= -1e-12) != member) ++mismatches;
  }
  report(2, worst <= 1e-12 && mismatches == 0, "lifting identity and hyperbolic block",
         "max rel diff " + fmtd("%.2e", worst) + " on 100 pairs, " + std::to_string(mismatches) +
             " hyperbolic mismatches in 1000");
}

void taylor_bounds() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> ud(0.05, 5.0);
  const double h = 1e-6;
  double worst_fd = 0.0, worst_tan = 0.0, worst_viol = -1e300;
  for (int t = 0; t < 1000; ++t) {
    const double S = ud(rng), I = ud(rng), C = 1.0 + ud(rng);
    const AffineBound bu = taylor_bound_u(S, I, C);
    const AffineBound bv = taylor_bound_v(S, I);
    const double du_s = (rate_surrogate_u(S + h, I, C) - rate_surrogate_u(S - h, I, C)) / (2 * h);
    const double du_i = (rate_surrogate_u(S, I + h, C) - rate_surrogate_u(S, I - h, C)) / (2 * h);
    const double dv_s = (sinr_surrogate_v(S + h, I) - sinr_surrogate_v(S - h, I)) / (2 * h);
    const double dv_i = (sinr_surrogate_v(S, I + h) - sinr_surrogate_v(S, I - h)) / (2 * h);
    worst_fd = std::max({worst_fd, std::abs(bu.coeff_S - du_s) / std::abs(du_s),
                         std::abs(bu.coeff_I - du_i) / std::abs(du_i), std::abs(bv.coeff_S - dv_s) / std::abs(dv_s),
                         std::abs(bv.coeff_I - dv_i) / std::abs(dv_i)});
    worst_tan = std::max({worst_tan, std::abs(bu(S, I) - rate_surrogate_u(S, I, C)),
                          std::abs(bv(S, I) - sinr_surrogate_v(S, I)) / sinr_surrogate_v(S, I)});
    const double s = ud(rng), i = ud(rng);
    worst_viol = std::max({worst_viol, bu(s, i) - rate_surrogate_u(s, i, C),
                           (bv(s, i) - sinr_surrogate_v(s, i)) / sinr_surrogate_v(s, i)});
  }
  report(3, worst_fd <= 1e-5 && worst_tan <= 1e-12 && worst_viol <= 1e-12, "Taylor bounds",
         "max FD rel err " + fmtd("%.2e", worst_fd) + ", tangency " + fmtd("%.1e", worst_tan) +
             ", max bound - f " + fmtd("%.1e", worst_viol) + " on 1000 points");
}

void ao_monotonicity() {
  const Dims d{4, 2, 8, 2};
  const SystemParams p = SystemParams::defaults(d.K);
  const AOConfig cfg;
  double worst_drop = 0.0, worst_power = 0.0, worst_mod = 0.0, worst_relay = 0.0;
  int runs = 0;
  for (int t = 0; t < 20; ++t) {
    const std::uint64_t seed = 4000 + static_cast<std::uint64_t>(t);
    const ChannelSet ch = testutil::desk_channels(d, seed);
    for (Scheme s : {Scheme::Proposed, Scheme::RelayOnly, Scheme::RandomIRS, Scheme::Independent}) {
      const AOResult r = run_ao(ch, p, cfg, s, seed);
      ++runs;
      for (std::size_t i = 1; i < r.trace.sum_rate.size(); ++i) {
        worst_drop = std::max(worst_drop, r.trace.sum_rate[i - 1] - r.trace.sum_rate[i]);
      }
      worst_power = std::max({worst_power, r.state.bs_power() / p.P_BS_max - 1.0,
                              r.state.relay_power() / p.P_R_max - 1.0});
      worst_mod = std::max(worst_mod, r.state.max_theta_modulus() - 1.0);
      for (double g : r.report.gammaR) worst_relay = std::max(worst_relay, r.trace.eff_gamma_th - g);
    }
  }
  const bool ok = worst_drop <= 1e-6 && worst_power <= 1e-6 && worst_mod <= 1e-6 && worst_relay <= 1e-4;
  report(4, ok, "AO monotonicity and constraints",
         std::to_string(runs) + " runs, max drop " + fmtd("%.1e", worst_drop) + ", power excess " +
             fmtd("%.1e", worst_power) + ", modulus excess " + fmtd("%.1e", worst_mod) + ", relay SINR shortfall " +
             fmtd("%.1e", worst_relay));
}

void irs_grid_oracle() {
  const Dims d{1, 1, 1, 1};
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const std::uint64_t seed = 5000 + static_cast<std::uint64_t>(t);
    const ChannelSet ch = testutil::desk_channels(d, seed);
    SystemParams p = SystemParams::defaults(1);
    const BeamformingState st = initialize_state(ch, p, Scheme::Proposed, seed);

    // Threshold low enough that every grid point is relay-feasible, so the
    // grid and the subproblem search the same set.
    std::vector<double> grid_rates;
    double min_gr = 1e300;
    for (int g = 0; g < 720; ++g) {
      BeamformingState s = st;
      s.theta(0) = std::polar(1.0, g * 0.5 * M_PI / 180.0);
      const SINRReport r = sinr_report(ch, s, p);
      grid_rates.push_back(r.sum_rate);
      min_gr = std::min(min_gr, r.gammaR[0]);
    }
    p.gamma_R_th = std::min(p.gamma_R_th, 0.5 * min_gr);
    const double best_grid = *std::max_element(grid_rates.begin(), grid_rates.end());

    SubproblemOptions opts;
    opts.seed = seed;
    const SubproblemSolution sol = optimize_irs(ch, st, p, opts);
    worst = std::max(worst, best_grid - sol.true_objective);
  }
  const double secs = seconds_since(t0);
  report(5, worst <= 0.02 && secs < 60.0, "IRS SDR vs 0.5-degree grid (N=K=M=L=1)",
         "max shortfall " + fmtd("%.2e", worst) + " bits/s/Hz on 20 channels, " + fmtd("%.2f", secs) + " s");
}

void scheme_ordering(int trials) {
  ExperimentConfig cfg = preset("desk");
  cfg.trials = trials;
  const auto t0 = Clock::now();
  const auto results = run_sweep(cfg);
  const double secs = seconds_since(t0);
  const auto rows = summarize(results);
  std::map<std::pair<Scheme, int>, SummaryRow> at;
  for (const auto& r : rows) at[{r.scheme, static_cast<int>(r.sweep_value)}] = r;

  bool ok = secs < 1800.0;
  std::string detail;
  double relay_lo = 1e300, relay_hi = -1e300, prev_proposed = -1e300;
  for (int n : cfg.sweep.values) {
    const SummaryRow& P = at[{Scheme::Proposed, n}];
    const SummaryRow& I = at[{Scheme::Independent, n}];
    const SummaryRow& R = at[{Scheme::RandomIRS, n}];
    const SummaryRow& O = at[{Scheme::RelayOnly, n}];
    ok = ok && P.mean >= I.mean && P.mean >= R.mean && R.mean + R.se >= O.mean;
    ok = ok && P.mean > prev_proposed;
    prev_proposed = P.mean;
    relay_lo = std::min(relay_lo, O.mean);
    relay_hi = std::max(relay_hi, O.mean);
    char buf[200];
    std::snprintf(buf, sizeof buf, "N=%d P %.3f I %.3f R %.3f(se %.3f) O %.3f; ", n, P.mean, I.mean, R.mean, R.se,
                  O.mean);
    detail += buf;
    std::printf("  N=%-3d Proposed %.4f+-%.4f  Independent %.4f+-%.4f  RandomIRS %.4f+-%.4f  RelayOnly %.4f+-%.4f"
                "  feasible %d/%d/%d/%d\n",
                n, P.mean, P.se, I.mean, I.se, R.mean, R.se, O.mean, O.se, P.feasible, I.feasible, R.feasible,
                O.feasible);
  }
  const double spread = (relay_hi - relay_lo) / relay_lo;
  ok = ok && spread < 0.05;
  detail += "RelayOnly spread " + fmtd("%.2f%%", 100.0 * spread) + ", " + std::to_string(trials) + " trials, " +
            fmtd("%.0f", secs) + " s";
  report(6, ok, "scheme ordering on the desk preset", detail);
}

void relay_mf_cases() {
  const double s2 = 0.7;
  double worst = 0.0;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
  CMat a1(2, 1);
  a1 << cplx(0.5, -1.5), cplx(2.0, 0.25);
  const double n1 = std::norm(a1(0)) + std::norm(a1(1));
  worst = std::max(worst, rel(relay_mf_sinr_from_alpha(a1, s2)[0], n1 / s2));

  CMat orth(2, 2);
  orth << cplx(1.0, -1.0), 0.0, 0.0, cplx(0.0, 3.0);
  const auto go = relay_mf_sinr_from_alpha(orth, s2);
  worst = std::max({worst, rel(go[0], 2.0 / s2), rel(go[1], 9.0 / s2)});

  CMat same(2, 2);
  same << a1, a1;
  const auto gs = relay_mf_sinr_from_alpha(same, s2);
  const double expect = n1 * n1 / (n1 * n1 + s2 * n1);
  worst = std::max({worst, rel(gs[0], expect), rel(gs[1], expect)});
  report(7, worst <= 1e-12, "relay matched-filter SINR special cases", "max rel err " + fmtd("%.1e", worst));
}

void determinism() {
  ExperimentConfig cfg = preset("desk");
  cfg.trials = 2;
  cfg.sweep.values = {4, 8};
  const std::string a = raw_csv(run_sweep(cfg), cfg.sweep.variable);
  cfg.workers = 1;
  const std::string b = raw_csv(run_sweep(cfg), cfg.sweep.variable);
  report(8, a == b && !a.empty(), "byte-identical raw CSV on rerun",
         std::to_string(a.size()) + " bytes, parallel vs serial run");
}

}  // namespace

int main(int argc, char** argv) {
  const int trials = argc > 1 ? std::atoi(argv[1]) : 50;
  solver_suite();
  lifting_identities();
  taylor_bounds();
  ao_monotonicity();
  irs_grid_oracle();
  scheme_ordering(trials > 0 ? trials : 50);
  relay_mf_cases();
  determinism();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
