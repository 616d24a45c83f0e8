#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "irsrelay/ao.hpp"
#include "irsrelay/channel_model.hpp"

namespace irsrelay {

enum class SweepVar { N, L, M };

std::string_view to_string(SweepVar v);

struct SweepSpec {
  SweepVar variable = SweepVar::N;
  std::vector<int> values{8};
};

struct ExperimentConfig {
  Dims dims;
  Point bs{0.0, 0.0};
  Point irs{100.0, 50.0};
  Point relay{100.0, -50.0};
  Point user_center{0.0, 200.0};
  double user_radius = 10.0;
  LargeScaleParams large_scale;
  // System parameters; the user noise power is shared by every user.
  double P_BS_max = 1e-2;
  double P_R_max = 1e-2;
  double sigma2 = 1e-11;
  double sigma_R2 = 1e-11;
  double gamma_R_th = 10.0;
  AOConfig ao;
  std::vector<Scheme> schemes{Scheme::Proposed, Scheme::RelayOnly, Scheme::RandomIRS, Scheme::Independent};
  SweepSpec sweep;
  int trials = 1;
  std::uint64_t base_seed = 1;
  int workers = 0;  // 0: one per hardware thread
  // Wall time is nondeterministic, so raw.csv carries 0 unless this is set.
  bool record_wall_time = false;

  Dims dims_at(int sweep_value) const;
  SystemParams system_params(int K) const;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON text; omitted fields keep their defaults, unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& cfg);

/// fig2a, fig2b, fig2c, desk.
ExperimentConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Users and channels of one trial; every scheme and sweep point at this trial
/// uses the same seed.
ChannelSet trial_channels(const ExperimentConfig& cfg, const Dims& dims, int trial);

struct SweepOptions {
  std::function<void(const TrialResult&)> on_result;  // called under a lock
};

/// One TrialResult per (scheme, sweep value, trial), sorted in that order.
std::vector<TrialResult> run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts = {});

struct SummaryRow {
  Scheme scheme = Scheme::Proposed;
  double sweep_value = 0.0;
  double mean = 0.0;  // over feasible trials
  double se = 0.0;
  int feasible = 0;
  int trials = 0;
};

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results);

std::string raw_csv(const std::vector<TrialResult>& results, SweepVar var);
std::string summary_csv(const std::vector<SummaryRow>& rows, SweepVar var);

/// Writes raw.csv and summary.csv into `out_dir` (created if missing).
std::vector<SummaryRow> write_results(const std::vector<TrialResult>& results, SweepVar var,
                                      const std::filesystem::path& out_dir);

}  // namespace irsrelay
