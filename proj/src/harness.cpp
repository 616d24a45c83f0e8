#include "irsrelay/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace irsrelay {

using json = nlohmann::json;

std::string_view to_string(SweepVar v) {
  switch (v) {
    case SweepVar::N: return "N";
    case SweepVar::L: return "L";
    case SweepVar::M: return "M";
  }
  return "?";
}

Dims ExperimentConfig::dims_at(int sweep_value) const {
  Dims d = dims;
  switch (sweep.variable) {
    case SweepVar::N: d.N = sweep_value; break;
    case SweepVar::L: d.L = sweep_value; break;
    case SweepVar::M: d.M = sweep_value; break;
  }
  return d;
}

SystemParams ExperimentConfig::system_params(int K) const {
  SystemParams p;
  p.P_BS_max = P_BS_max;
  p.P_R_max = P_R_max;
  p.sigma_k2.assign(K, sigma2);
  p.sigma_R2 = sigma_R2;
  p.gamma_R_th = gamma_R_th;
  return p;
}

namespace {

// Walks a JSON object, rejecting unknown keys and naming fields by their path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : j_.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ValidationError(field(k), "unknown key");
    }
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }
  const json& at(std::string_view key) const { return j_.at(std::string(key)); }
  std::string field(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }
  Reader child(std::string_view key) const { return Reader(at(key), field(key)); }

  void number(std::string_view key, double& out) const {
    if (!has(key)) return;
    if (!at(key).is_number()) throw ValidationError(field(key), "expected a number");
    out = at(key).get<double>();
  }

  void integer(std::string_view key, int& out) const {
    if (!has(key)) return;
    if (!at(key).is_number_integer()) throw ValidationError(field(key), "expected an integer");
    out = at(key).get<int>();
  }

  void boolean(std::string_view key, bool& out) const {
    if (!has(key)) return;
    if (!at(key).is_boolean()) throw ValidationError(field(key), "expected true or false");
    out = at(key).get<bool>();
  }

  void point(std::string_view key, Point& out) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ValidationError(field(key), "expected [x, y]");
    }
    out = {v[0].get<double>(), v[1].get<double>()};
  }

  template <class T, class F>
  void list(std::string_view key, std::vector<T>& out, F convert) const {
    if (!has(key)) return;
    const json& v = at(key);
    if (!v.is_array()) throw ValidationError(field(key), "expected a list");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert(v[i], field(key) + "[" + std::to_string(i) + "]"));
  }

 private:
  const json& j_;
  std::string path_;
};

int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

SubproblemKind parse_kind(const json& v, const std::string& field) {
  if (v.is_string()) {
    for (SubproblemKind k : {SubproblemKind::Bs, SubproblemKind::Relay, SubproblemKind::Irs}) {
      if (v.get<std::string>() == to_string(k)) return k;
    }
  }
  throw ValidationError(field, "expected one of bs, relay, irs");
}

Scheme parse_scheme_json(const json& v, const std::string& field) {
  if (v.is_string()) {
    if (auto s = parse_scheme(v.get<std::string>())) return *s;
  }
  throw ValidationError(field, "expected one of Proposed, RelayOnly, RandomIRS, Independent");
}

int parse_int(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw ValidationError(field, "expected an integer");
  return v.get<int>();
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("line " + std::to_string(line) + ": " + e.what(), line);
  }

  ExperimentConfig cfg;
  const Reader root(j, "");
  root.allow({"dims", "topology", "large_scale", "system", "ao", "schemes", "sweep", "trials", "base_seed",
              "workers", "record_wall_time"});
  if (root.has("dims")) {
    const Reader r = root.child("dims");
    r.allow({"M", "L", "N", "K"});
    r.integer("M", cfg.dims.M);
    r.integer("L", cfg.dims.L);
    r.integer("N", cfg.dims.N);
    r.integer("K", cfg.dims.K);
  }
  if (root.has("topology")) {
    const Reader r = root.child("topology");
    r.allow({"bs", "irs", "relay", "user_center", "user_radius"});
    r.point("bs", cfg.bs);
    r.point("irs", cfg.irs);
    r.point("relay", cfg.relay);
    r.point("user_center", cfg.user_center);
    r.number("user_radius", cfg.user_radius);
  }
  if (root.has("large_scale")) {
    const Reader r = root.child("large_scale");
    r.allow({"d0", "kappa_direct", "kappa_irs", "rho_direct", "rho_assisted"});
    LargeScaleParams& ls = cfg.large_scale;
    r.number("d0", ls.d0);
    r.number("kappa_direct", ls.kappa_direct_and_relay);
    r.number("kappa_irs", ls.kappa_irs);
    r.number("rho_direct", ls.rho_direct);
    r.number("rho_assisted", ls.rho_assisted);
  }
  if (root.has("system")) {
    const Reader r = root.child("system");
    r.allow({"P_BS_max", "P_R_max", "sigma2", "sigma_R2", "gamma_R_th"});
    r.number("P_BS_max", cfg.P_BS_max);
    r.number("P_R_max", cfg.P_R_max);
    r.number("sigma2", cfg.sigma2);
    r.number("sigma_R2", cfg.sigma_R2);
    r.number("gamma_R_th", cfg.gamma_R_th);
  }
  if (root.has("ao")) {
    const Reader r = root.child("ao");
    r.allow({"max_outer_iters", "outer_tol", "sca_inner_iters", "sca_tol", "randomization_samples",
             "restore_attempts", "order"});
    AOConfig& ao = cfg.ao;
    r.integer("max_outer_iters", ao.max_outer_iters);
    r.number("outer_tol", ao.outer_tol);
    r.integer("sca_inner_iters", ao.sca_inner_iters);
    r.number("sca_tol", ao.sca_tol);
    r.integer("randomization_samples", ao.randomization_samples);
    r.integer("restore_attempts", ao.restore_attempts);
    r.list("order", ao.order, parse_kind);
  }
  root.list("schemes", cfg.schemes, parse_scheme_json);
  if (root.has("sweep")) {
    const Reader r = root.child("sweep");
    r.allow({"variable", "values"});
    if (r.has("variable")) {
      const json& v = r.at("variable");
      const std::string name = v.is_string() ? v.get<std::string>() : "";
      if (name == "N") {
        cfg.sweep.variable = SweepVar::N;
      } else if (name == "L") {
        cfg.sweep.variable = SweepVar::L;
      } else if (name == "M") {
        cfg.sweep.variable = SweepVar::M;
      } else {
        throw ValidationError(r.field("variable"), "expected one of N, L, M");
      }
    }
    r.list("values", cfg.sweep.values, parse_int);
  }
  if (!root.has("sweep") || !root.child("sweep").has("values")) {
    const SweepVar v = cfg.sweep.variable;
    cfg.sweep.values = {v == SweepVar::N ? cfg.dims.N : v == SweepVar::L ? cfg.dims.L : cfg.dims.M};
  }
  root.integer("trials", cfg.trials);
  if (root.has("base_seed")) {
    const json& v = root.at("base_seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ValidationError("base_seed", "expected a nonnegative integer");
    }
    cfg.base_seed = v.get<std::uint64_t>();
  }
  root.integer("workers", cfg.workers);
  root.boolean("record_wall_time", cfg.record_wall_time);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  auto positive = [](const std::string& field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(field, "must be positive");
  };
  if (cfg.dims.M < 1) throw ValidationError("dims.M", "must be at least 1");
  if (cfg.dims.L < 1) throw ValidationError("dims.L", "must be at least 1");
  if (cfg.dims.N < 1) throw ValidationError("dims.N", "must be at least 1");
  if (cfg.dims.K < 1) throw ValidationError("dims.K", "must be at least 1");
  if (cfg.sweep.values.empty()) throw ValidationError("sweep.values", "must not be empty");
  for (int v : cfg.sweep.values) {
    if (v < 1) throw ValidationError("sweep.values", "values must be positive");
    const Dims d = cfg.dims_at(v);
    if (d.K > std::min(d.M, d.L)) {
      throw ValidationError("dims.K", "K <= min(M, L) violated at " + std::string(to_string(cfg.sweep.variable)) +
                                          "=" + std::to_string(v) + " (K=" + std::to_string(d.K) +
                                          ", M=" + std::to_string(d.M) + ", L=" + std::to_string(d.L) + ")");
    }
  }
  if (cfg.trials < 1) throw ValidationError("trials", "must be at least 1");
  if (cfg.workers < 0) throw ValidationError("workers", "must be nonnegative");
  if (cfg.schemes.empty()) throw ValidationError("schemes", "must not be empty");
  positive("topology.user_radius", cfg.user_radius);
  positive("large_scale.d0", cfg.large_scale.d0);
  positive("large_scale.kappa_direct", cfg.large_scale.kappa_direct_and_relay);
  positive("large_scale.kappa_irs", cfg.large_scale.kappa_irs);
  positive("system.P_BS_max", cfg.P_BS_max);
  positive("system.P_R_max", cfg.P_R_max);
  positive("system.sigma2", cfg.sigma2);
  positive("system.sigma_R2", cfg.sigma_R2);
  positive("system.gamma_R_th", cfg.gamma_R_th);
  if (cfg.ao.max_outer_iters < 1) throw ValidationError("ao.max_outer_iters", "must be at least 1");
  if (cfg.ao.sca_inner_iters < 1) throw ValidationError("ao.sca_inner_iters", "must be at least 1");
  if (cfg.ao.randomization_samples < 0) throw ValidationError("ao.randomization_samples", "must be nonnegative");
  if (cfg.ao.restore_attempts < 0) throw ValidationError("ao.restore_attempts", "must be nonnegative");
  if (!(cfg.ao.outer_tol >= 0.0)) throw ValidationError("ao.outer_tol", "must be nonnegative");
  if (!(cfg.ao.sca_tol >= 0.0)) throw ValidationError("ao.sca_tol", "must be nonnegative");
  if (cfg.ao.order.empty()) throw ValidationError("ao.order", "must not be empty");
}

ExperimentConfig preset(std::string_view name) {
  ExperimentConfig cfg;
  cfg.trials = 50;
  if (name == "fig2a") {
    cfg.dims = {8, 4, 30, 4};
    cfg.sweep = {SweepVar::N, {10, 20, 30, 40, 50}};
  } else if (name == "fig2b") {
    // L = 2 would break K <= min(M, L) with K = 4.
    cfg.dims = {8, 4, 30, 4};
    cfg.sweep = {SweepVar::L, {4, 6, 8}};
  } else if (name == "fig2c") {
    cfg.dims = {8, 4, 30, 4};
    cfg.sweep = {SweepVar::M, {4, 6, 8, 10}};
  } else if (name == "desk") {
    cfg.dims = {4, 2, 8, 2};
    cfg.sweep = {SweepVar::N, {4, 16, 32}};
  } else {
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
  }
  validate(cfg);
  return cfg;
}

std::vector<std::string> preset_names() { return {"fig2a", "fig2b", "fig2c", "desk"}; }

ChannelSet trial_channels(const ExperimentConfig& cfg, const Dims& dims, int trial) {
  const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(trial);
  Topology topo;
  topo.bs = cfg.bs;
  topo.irs = cfg.irs;
  topo.relay = cfg.relay;
  topo.users = place_users(cfg.user_center, cfg.user_radius, dims.K, seed);
  return draw_channels(topo, cfg.large_scale, dims, seed);
}

std::vector<TrialResult> run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts) {
  validate(cfg);
  struct Task {
    int value;
    int trial;
  };
  std::vector<Task> tasks;
  for (int v : cfg.sweep.values)
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({v, t});

  std::vector<TrialResult> results(tasks.size() * cfg.schemes.size());
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& task = tasks[i];
      const Dims d = cfg.dims_at(task.value);
      const SystemParams params = cfg.system_params(d.K);
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(task.trial);
      const ChannelSet ch = trial_channels(cfg, d, task.trial);
      for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
        TrialResult r;
        try {
          r = run_scheme(cfg.schemes[s], ch, params, cfg.ao, seed);
        } catch (const std::exception& e) {
          r.scheme = cfg.schemes[s];
          r.channel_checksum = ch.checksum();
          r.feasible = false;
          r.error = e.what();
        }
        r.sweep_value = task.value;
        r.trial = task.trial;
        if (!cfg.record_wall_time) r.wall_ms = 0.0;
        results[i * cfg.schemes.size() + s] = r;
        if (opts.on_result) {
          std::lock_guard<std::mutex> lock(mu);
          opts.on_result(r);
        }
      }
    }
  };

  int n = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
  n = std::clamp(n, 1, static_cast<int>(tasks.size()));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(work);
  }

  auto scheme_pos = [&](Scheme s) {
    return std::find(cfg.schemes.begin(), cfg.schemes.end(), s) - cfg.schemes.begin();
  };
  std::stable_sort(results.begin(), results.end(), [&](const TrialResult& a, const TrialResult& b) {
    if (a.scheme != b.scheme) return scheme_pos(a.scheme) < scheme_pos(b.scheme);
    if (a.sweep_value != b.sweep_value) return a.sweep_value < b.sweep_value;
    return a.trial < b.trial;
  });
  return results;
}

std::vector<SummaryRow> summarize(const std::vector<TrialResult>& results) {
  std::vector<SummaryRow> rows;
  std::vector<std::vector<double>> samples;
  for (const auto& r : results) {
    auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& s) {
      return s.scheme == r.scheme && s.sweep_value == r.sweep_value;
    });
    if (it == rows.end()) {
      rows.push_back({r.scheme, r.sweep_value, 0.0, 0.0, 0, 0});
      samples.emplace_back();
      it = rows.end() - 1;
    }
    const std::size_t k = static_cast<std::size_t>(it - rows.begin());
    ++it->trials;
    if (r.feasible) {
      ++it->feasible;
      samples[k].push_back(r.sum_rate);
    }
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& x = samples[k];
    if (x.empty()) {
      rows[k].mean = std::nan("");
      rows[k].se = std::nan("");
      continue;
    }
    double sum = 0.0;
    for (double v : x) sum += v;
    const double n = static_cast<double>(x.size());
    rows[k].mean = sum / n;
    if (x.size() > 1) {
      double ss = 0.0;
      for (double v : x) ss += (v - rows[k].mean) * (v - rows[k].mean);
      rows[k].se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

std::string raw_csv(const std::vector<TrialResult>& results, SweepVar var) {
  std::ostringstream os;
  os << "scheme,sweep_var,sweep_value,trial,sum_rate,feasible,eff_gamma_th,iters,wall_ms\n";
  for (const auto& r : results) {
    os << to_string(r.scheme) << ',' << to_string(var) << ',' << fmt(r.sweep_value) << ',' << r.trial << ','
       << fmt(r.sum_rate) << ',' << (r.feasible ? 1 : 0) << ',' << fmt(r.eff_gamma_th) << ',' << r.iters << ','
       << fmt(r.wall_ms) << '\n';
  }
  return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows, SweepVar var) {
  std::ostringstream os;
  os << "scheme,sweep_var,sweep_value,mean_sum_rate,se_sum_rate,feasible,trials\n";
  for (const auto& s : rows) {
    os << to_string(s.scheme) << ',' << to_string(var) << ',' << fmt(s.sweep_value) << ',' << fmt(s.mean) << ','
       << fmt(s.se) << ',' << s.feasible << ',' << s.trials << '\n';
  }
  return os.str();
}

std::vector<SummaryRow> write_results(const std::vector<TrialResult>& results, SweepVar var,
                                      const std::filesystem::path& out_dir) {
  if (results.empty()) throw std::invalid_argument("write_results: no results");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  const auto summary = summarize(results);
  auto put = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed: " + p.string());
  };
  put(out_dir / "raw.csv", raw_csv(results, var));
  put(out_dir / "summary.csv", summary_csv(summary, var));
  return summary;
}

}  // namespace irsrelay
