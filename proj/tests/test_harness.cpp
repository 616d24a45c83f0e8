#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "irsrelay/harness.hpp"

using namespace irsrelay;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig c = parse_config(R"({
    "dims": {"M": 2, "L": 2, "N": 4, "K": 1},
    "ao": {"max_outer_iters": 3, "randomization_samples": 50},
    "sweep": {"variable": "N", "values": [4]},
    "trials": 1
  })");
  return c;
}

TrialResult fake(Scheme s, double value, int trial, double rate, bool feasible) {
  TrialResult r;
  r.scheme = s;
  r.sweep_value = value;
  r.trial = trial;
  r.sum_rate = rate;
  r.feasible = feasible;
  r.eff_gamma_th = 10.0;
  r.iters = 2;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config: minimal dims fills defaults") {
  const ExperimentConfig c = parse_config(R"({"dims": {"M": 4, "L": 2, "N": 16, "K": 2}})");
  CHECK(c.dims.N == 16);
  CHECK(c.P_BS_max == 1e-2);
  CHECK(c.sigma2 == 1e-11);
  CHECK(c.gamma_R_th == 10.0);
  CHECK(c.ao.max_outer_iters == 20);
  CHECK(c.schemes.size() == 4);
  CHECK(c.sweep.values == std::vector<int>{16});
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("config: every section parses") {
  const ExperimentConfig c = parse_config(R"({
    "dims": {"M": 6, "L": 4, "N": 8, "K": 3},
    "topology": {"bs": [1, 2], "irs": [90, 40], "relay": [90, -40], "user_center": [5, 150], "user_radius": 4},
    "large_scale": {"d0": 2, "kappa_direct": 1e-3, "kappa_irs": 0.1, "rho_direct": 3, "rho_assisted": 2.2},
    "system": {"P_BS_max": 0.02, "P_R_max": 0.03, "sigma2": 1e-12, "sigma_R2": 2e-12, "gamma_R_th": 5},
    "ao": {"max_outer_iters": 7, "outer_tol": 1e-2, "sca_inner_iters": 2, "sca_tol": 1e-3,
           "randomization_samples": 20, "restore_attempts": 2, "order": ["irs", "bs", "relay"]},
    "schemes": ["RelayOnly", "Proposed"],
    "sweep": {"variable": "M", "values": [4, 6]},
    "trials": 3, "base_seed": 9, "workers": 2, "record_wall_time": true
  })");
  CHECK(c.bs.x == 1.0);
  CHECK(c.user_center.y == 150.0);
  CHECK(c.large_scale.kappa_direct_and_relay == 1e-3);
  CHECK(c.large_scale.rho_assisted == 2.2);
  CHECK(c.P_R_max == 0.03);
  CHECK(c.ao.order.front() == SubproblemKind::Irs);
  CHECK(c.ao.randomization_samples == 20);
  REQUIRE(c.schemes.size() == 2);
  CHECK(c.schemes[0] == Scheme::RelayOnly);
  CHECK(c.sweep.variable == SweepVar::M);
  CHECK(c.dims_at(4).M == 4);
  CHECK(c.trials == 3);
  CHECK(c.base_seed == 9);
  CHECK(c.record_wall_time);
  const SystemParams p = c.system_params(3);
  CHECK(p.sigma_k2.size() == 3);
  CHECK(p.sigma_R2 == 2e-12);
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("config: errors") {
  SUBCASE("K above min(M, L)") {
    try {
      validate(parse_config(R"({"dims": {"M": 8, "L": 4, "N": 8, "K": 5}})"));
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "dims.K");
      CHECK(std::string(e.what()).find("K <= min(M, L)") != std::string::npos);
    }
  }
  SUBCASE("sweep point violates K bound") {
    CHECK_THROWS_AS(parse_config(R"({"dims": {"M": 8, "L": 4, "N": 8, "K": 4},
                                     "sweep": {"variable": "L", "values": [2, 4]}})"),
                    ValidationError);
  }
  SUBCASE("malformed JSON reports its line") {
    try {
      parse_config("{\n  \"dims\": {\"M\": 4,\n  \"L\": }\n}");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("unknown keys name the field") {
    try {
      parse_config(R"({"dims": {"M": 4, "Q": 1}})");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.field() == "dims.Q");
    }
    CHECK_THROWS_AS(parse_config(R"({"colour": 1})"), ValidationError);
  }
  SUBCASE("bad values") {
    CHECK_THROWS_AS(validate(parse_config(R"({"trials": 0})")), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"schemes": ["Nope"]})"), ValidationError);
    CHECK_THROWS_AS(validate(parse_config(R"({"system": {"sigma2": -1}})")), ValidationError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), IoError); }
}

TEST_CASE("presets validate") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const ExperimentConfig c = preset(name);
    CHECK_NOTHROW(validate(c));
    CHECK(c.trials == 50);
  }
  const ExperimentConfig d = preset("desk");
  CHECK(d.dims.M == 4);
  CHECK(d.dims.L == 2);
  CHECK(d.dims.K == 2);
  CHECK(d.sweep.values == std::vector<int>{4, 16, 32});
  CHECK(preset("fig2a").sweep.values == std::vector<int>{10, 20, 30, 40, 50});
}

TEST_CASE("trial channels depend only on the trial index") {
  const ExperimentConfig c = preset("desk");
  const ChannelSet a = trial_channels(c, c.dims_at(4), 3);
  const ChannelSet b = trial_channels(c, c.dims_at(4), 3);
  const ChannelSet e = trial_channels(c, c.dims_at(4), 4);
  CHECK(a.checksum() == b.checksum());
  CHECK(a.checksum() != e.checksum());
}

TEST_CASE("run_sweep: one result, pairing, determinism") {
  ExperimentConfig c = tiny_config();
  c.schemes = {Scheme::RelayOnly};
  const auto one = run_sweep(c);
  REQUIRE(one.size() == 1);
  CHECK(one[0].sum_rate >= 0.0);
  CHECK(one[0].wall_ms == 0.0);

  c.schemes = {Scheme::Proposed, Scheme::RelayOnly, Scheme::RandomIRS};
  c.trials = 2;
  c.workers = 3;
  int callbacks = 0;
  SweepOptions opts;
  opts.on_result = [&](const TrialResult&) { ++callbacks; };
  const auto res = run_sweep(c, opts);
  REQUIRE(res.size() == 6);
  CHECK(callbacks == 6);
  for (int t = 0; t < 2; ++t) {
    std::vector<std::uint64_t> sums;
    for (const auto& r : res) {
      if (r.trial == t) sums.push_back(r.channel_checksum);
    }
    REQUIRE(sums.size() == 3);
    CHECK(std::all_of(sums.begin(), sums.end(), [&](auto s) { return s == sums[0]; }));
    CHECK(sums[0] == trial_channels(c, c.dims_at(4), t).checksum());
  }
  CHECK(res[0].scheme == Scheme::Proposed);
  CHECK(res[0].trial == 0);
  CHECK(res[1].trial == 1);
  CHECK(res[5].scheme == Scheme::RandomIRS);

  c.workers = 1;
  const auto again = run_sweep(c);
  CHECK(raw_csv(res, c.sweep.variable) == raw_csv(again, c.sweep.variable));
}

TEST_CASE("summaries and CSV output") {
  const std::vector<TrialResult> rs{fake(Scheme::Proposed, 8, 0, 1.0, true), fake(Scheme::Proposed, 8, 1, 3.0, true),
                                    fake(Scheme::Proposed, 8, 2, 100.0, false),
                                    fake(Scheme::RelayOnly, 8, 0, 0.5, false)};
  const auto rows = summarize(rs);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean == doctest::Approx(2.0));
  CHECK(rows[0].se == doctest::Approx(1.0));
  CHECK(rows[0].feasible == 2);
  CHECK(rows[0].trials == 3);
  CHECK(std::isnan(rows[1].mean));
  CHECK(rows[1].feasible == 0);

  const fs::path dir = fs::temp_directory_path() / "irsrelay_harness_test";
  fs::remove_all(dir);
  write_results({rs[0]}, SweepVar::N, dir);
  const std::string raw = slurp(dir / "raw.csv");
  CHECK(std::count(raw.begin(), raw.end(), '\n') == 2);
  CHECK(raw.rfind("scheme,sweep_var,sweep_value,trial,sum_rate,feasible,eff_gamma_th,iters,wall_ms\n", 0) == 0);
  CHECK(raw.find("Proposed,N,8,0,1,1,10,2,0") != std::string::npos);
  const std::string sum = slurp(dir / "summary.csv");
  CHECK(sum.rfind("scheme,sweep_var,sweep_value,mean_sum_rate,se_sum_rate,feasible,trials\n", 0) == 0);

  // a regular file where the output directory should be
  const fs::path blocker = dir / "raw.csv";
  CHECK_THROWS_AS(write_results({rs[0]}, SweepVar::N, blocker), IoError);
  fs::remove_all(dir);
}
