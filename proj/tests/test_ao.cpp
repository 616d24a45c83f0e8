#include <doctest.h>

#include "helpers.hpp"

using namespace irsrelay;

namespace {

const Dims kDesk{4, 2, 8, 2};

AOConfig quick_config() {
  AOConfig c;
  c.max_outer_iters = 6;
  return c;
}

void check_constraints(const AOResult& r, const SystemParams& p) {
  CHECK(r.state.bs_power() <= p.P_BS_max * (1.0 + 1e-6));
  CHECK(r.state.relay_power() <= p.P_R_max * (1.0 + 1e-6));
  CHECK(r.state.max_theta_modulus() <= 1.0 + 1e-6);
  for (double g : r.report.gammaR) CHECK(g >= r.trace.eff_gamma_th - 1e-4);
}

}  // namespace

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::Proposed, Scheme::RelayOnly, Scheme::RandomIRS, Scheme::Independent}) {
    CHECK(parse_scheme(to_string(s)) == s);
  }
  CHECK_FALSE(parse_scheme("Bogus").has_value());
}

TEST_CASE("initialize_state") {
  const ChannelSet ch = testutil::desk_channels(kDesk, 3);
  const SystemParams p = SystemParams::defaults(kDesk.K);
  const BeamformingState s = initialize_state(ch, p, Scheme::Proposed, 3);
  CHECK(std::abs(s.bs_power() - p.P_BS_max) <= 1e-12 * p.P_BS_max);
  CHECK(std::abs(s.relay_power() - p.P_R_max) <= 1e-12 * p.P_R_max);
  for (Eigen::Index n = 0; n < s.theta.size(); ++n) CHECK(std::abs(s.theta(n)) == doctest::Approx(1.0));

  const BeamformingState r = initialize_state(ch, p, Scheme::RelayOnly, 3);
  CHECK(r.theta.cwiseAbs().maxCoeff() == 0.0);

  // K = 1: the matched start is the best equal-power vector for the first phase.
  const Dims one{3, 1, 4, 1};
  const ChannelSet c1 = testutil::desk_channels(one, 4);
  const SystemParams p1 = SystemParams::defaults(1);
  const BeamformingState s1 = initialize_state(c1, p1, Scheme::Proposed, 4);
  const double g0 = sinr_report(c1, s1, p1).gamma1[0];
  const CRow h = effective_channels(c1, s1.theta).h_BS[0];
  CHECK(g0 == doctest::Approx(h.squaredNorm() * p1.P_BS_max / p1.sigma_k2[0]).epsilon(1e-10));
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    BeamformingState alt = s1;
    alt.G = testutil::random_cvec(rng, 3);
    alt.G *= std::sqrt(p1.P_BS_max) / alt.G.norm();
    CHECK(sinr_report(c1, alt, p1).gamma1[0] <= g0 * (1.0 + 1e-12));
  }
}

TEST_CASE("restore_threshold") {
  int h = -1;
  CHECK(restore_threshold(10.0, 4, [](double) { return true; }, &h) == 10.0);
  CHECK(h == 0);
  CHECK(restore_threshold(8.0, 4, [](double th) { return th <= 4.0; }, &h) == 4.0);
  CHECK(h == 1);
  CHECK(restore_threshold(8.0, 4, [](double th) { return th <= 0.5; }, &h) == 0.5);
  CHECK(h == 4);
  CHECK_THROWS_AS(restore_threshold(8.0, 4, [](double th) { return th <= 0.25; }), RestorationExhausted);
}

TEST_CASE("run_ao: monotone trace and constraints for every scheme") {
  const SystemParams p = SystemParams::defaults(kDesk.K);
  for (std::uint64_t seed : {11u, 12u}) {
    const ChannelSet ch = testutil::desk_channels(kDesk, seed);
    for (Scheme s : {Scheme::Proposed, Scheme::RelayOnly, Scheme::RandomIRS, Scheme::Independent}) {
      CAPTURE(to_string(s));
      const AOResult r = run_ao(ch, p, quick_config(), s, seed);
      REQUIRE(!r.trace.sum_rate.empty());
      for (std::size_t i = 1; i < r.trace.sum_rate.size(); ++i) {
        CHECK(r.trace.sum_rate[i] >= r.trace.sum_rate[i - 1] - 1e-6);
      }
      CHECK(r.report.sum_rate == doctest::Approx(r.trace.sum_rate.back()).epsilon(1e-12));
      check_constraints(r, p);
      CHECK(r.trace.eff_gamma_th <= p.gamma_R_th);
      CHECK(r.trace.restore_halvings <= quick_config().restore_attempts);
    }
  }
}

TEST_CASE("run_ao: RandomIRS keeps its phases and RelayOnly keeps the IRS off") {
  const SystemParams p = SystemParams::defaults(kDesk.K);
  const ChannelSet ch = testutil::desk_channels(kDesk, 21);
  const BeamformingState init = initialize_state(ch, p, Scheme::RandomIRS, 21);
  const AOResult r = run_ao(ch, p, quick_config(), Scheme::RandomIRS, 21);
  CHECK(testutil::max_abs(r.state.theta - init.theta) == 0.0);
  for (const auto& rec : r.trace.subproblems) CHECK(rec.kind != SubproblemKind::Irs);

  const AOResult z = run_ao(ch, p, quick_config(), Scheme::RelayOnly, 21);
  CHECK(z.state.theta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("run_scheme: determinism, RelayOnly invariance, Independent phase-2 convention") {
  const SystemParams p = SystemParams::defaults(kDesk.K);
  const ChannelSet ch = testutil::desk_channels(kDesk, 31);

  const TrialResult a = run_scheme(Scheme::Proposed, ch, p, quick_config(), 31);
  const TrialResult b = run_scheme(Scheme::Proposed, ch, p, quick_config(), 31);
  CHECK(a.sum_rate == b.sum_rate);
  CHECK(a.trace_sum_rate == b.trace_sum_rate);
  CHECK(a.iters == b.iters);
  CHECK(a.channel_checksum == ch.checksum());

  // Relay-only results cannot depend on anything behind the IRS.
  ChannelSet other = ch;
  std::mt19937_64 rng(32);
  other.H_BS_IRS = testutil::random_cmat(rng, kDesk.N, kDesk.M);
  other.H_R_IRS = testutil::random_cmat(rng, kDesk.N, kDesk.L);
  for (auto& h : other.h_IRS) h = testutil::random_cmat(rng, 1, kDesk.N);
  const TrialResult r1 = run_scheme(Scheme::RelayOnly, ch, p, quick_config(), 31);
  const TrialResult r2 = run_scheme(Scheme::RelayOnly, other, p, quick_config(), 31);
  CHECK(r1.sum_rate == r2.sum_rate);

  const AOResult ind = run_ao(ch, p, quick_config(), Scheme::Independent, 31);
  const auto g2 = downlink_sinr(ch.h_R, ind.state.F, p.sigma_k2);
  const SINRReport full = sinr_report(ch, ind.state, p);
  for (int k = 0; k < kDesk.K; ++k) {
    CHECK(ind.report.gamma2[k] == doctest::Approx(g2[k]).epsilon(1e-12));
    CHECK(ind.report.gamma1[k] == doctest::Approx(full.gamma1[k]).epsilon(1e-12));
  }
  CHECK(ind.state.theta.cwiseAbs().maxCoeff() > 0.0);
}
