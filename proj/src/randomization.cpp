#include "irsrelay/randomization.hpp"

#include <cmath>

namespace irsrelay {

std::optional<CVec> postprocess_candidate(const CVec& x, RankOneTarget target, double power, int* clipped,
                                          double clip_threshold) {
  if (target == RankOneTarget::Irs) {
    const Eigen::Index n = x.size();
    const cplx pivot = x(n - 1);
    if (std::abs(pivot) < 1e-300) return std::nullopt;
    CVec out = x / pivot;
    out(n - 1) = 1.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double mag = std::abs(out(i));
      if (mag > 1.0) {
        if (clipped && mag - 1.0 > clip_threshold) ++*clipped;
        out(i) /= mag;
      }
    }
    return out;
  }
  const double nrm = x.norm();
  if (nrm == 0.0) return power > 0.0 ? std::nullopt : std::optional<CVec>(x);
  return CVec(x * (std::sqrt(power) / nrm));
}

CVec draw_gaussian_candidate(const HermEigen& eig, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  const Eigen::Index n = eig.values.size();
  CVec e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    e(i) = cplx(re, im) * std::sqrt(std::max(eig.values(i), 0.0));
  }
  return eig.vectors * e;
}

RandomizationResult randomize_rank_one_joint(const std::vector<HermMat>& x_opt, RankOneTarget target,
                                             const CandidateScore& score, std::uint64_t seed,
                                             const RandomizationOptions& opts, const std::vector<CVec>* incumbent,
                                             double incumbent_score) {
  const std::size_t nb = x_opt.size();
  std::vector<HermEigen> eig(nb);
  std::vector<double> power(nb);
  bool rank_one = true;
  for (std::size_t b = 0; b < nb; ++b) {
    eig[b] = eig_hermitian(x_opt[b]);
    power[b] = std::max(x_opt[b].trace(), 0.0);
    const Eigen::Index n = eig[b].values.size();
    const double l1 = eig[b].values(n - 1);
    const double l2 = n > 1 ? std::max(eig[b].values(n - 2), 0.0) : 0.0;
    if (!(l1 > 0.0) || l2 > opts.rank_one_ratio * l1) rank_one = false;
  }

  RandomizationResult best;
  bool have = false;
  std::vector<std::vector<CVec>> pool;
  auto consider = [&](const std::vector<CVec>& raw, bool keep) {
    std::vector<CVec> cand;
    cand.reserve(nb);
    int clips = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      auto p = postprocess_candidate(raw[b], target, power[b], &clips, opts.clip_report_threshold);
      if (!p) return;
      cand.push_back(std::move(*p));
    }
    const auto s = score(cand);
    if (s) {
      ++best.feasible_candidates;
      if (!have || *s > best.score) {
        best.vectors = cand;
        best.score = *s;
        best.clip_events = clips;
        have = true;
      }
    }
    if (keep) pool.push_back(std::move(cand));
  };

  const bool may_blend = incumbent && !opts.blend_steps.empty();
  std::vector<CVec> principal(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const Eigen::Index n = eig[b].values.size();
    principal[b] = std::sqrt(std::max(eig[b].values(n - 1), 0.0)) * eig[b].vectors.col(n - 1);
  }
  consider(principal, may_blend);
  if (have && rank_one) {
    best.rank_one_shortcut = true;
  } else {
    std::mt19937_64 rng(seed);
    std::vector<CVec> raw(nb);
    for (int s = 0; s < opts.n_samples; ++s) {
      for (std::size_t b = 0; b < nb; ++b) raw[b] = draw_gaussian_candidate(eig[b], rng);
      consider(raw, may_blend);
    }
  }

  if (may_blend && (!have || best.score <= incumbent_score)) {
    const std::vector<CVec>& inc = *incumbent;
    std::vector<CVec> step(nb);
    for (const auto& cand : pool) {
      std::vector<CVec> aligned = cand;
      if (target != RankOneTarget::Irs) {
        for (std::size_t b = 0; b < nb; ++b) {
          const cplx z = inc[b].dot(cand[b]);
          if (std::abs(z) > 0.0) aligned[b] *= std::conj(z) / std::abs(z);
        }
      }
      for (double t : opts.blend_steps) {
        for (std::size_t b = 0; b < nb; ++b) step[b] = inc[b] + t * (aligned[b] - inc[b]);
        consider(step, false);
      }
    }
  }
  if (!have) throw NoFeasibleCandidateError("randomization: no feasible candidate");
  return best;
}

RandomizationResult randomize_rank_one(const HermMat& x_opt, RankOneTarget target,
                                       const std::function<std::optional<double>(const CVec&)>& score,
                                       std::uint64_t seed, const RandomizationOptions& opts, const CVec* incumbent,
                                       double incumbent_score) {
  std::vector<CVec> inc;
  if (incumbent) inc.push_back(*incumbent);
  return randomize_rank_one_joint(
      {x_opt}, target, [&](const std::vector<CVec>& v) { return score(v.front()); }, seed, opts,
      incumbent ? &inc : nullptr, incumbent_score);
}

}  // namespace irsrelay
