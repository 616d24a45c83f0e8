#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "irsrelay/matrix_core.hpp"

namespace irsrelay {

enum class RankOneTarget { Bs, Relay, Irs };

struct RandomizationOptions {
  int n_samples = 200;
  /// lambda_2 / lambda_1 at or below this returns the principal eigenvector.
  double rank_one_ratio = 1e-6;
  /// Clipping of an IRS modulus by more than this counts as a clip event.
  double clip_report_threshold = 1e-3;
  /// Step lengths for the fallback that pulls candidates toward the incumbent
  /// when no sample beats it; empty disables the fallback.
  std::vector<double> blend_steps{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
};

class NoFeasibleCandidateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scores a post-processed candidate tuple (one vector per lifted matrix).
/// nullopt marks an infeasible candidate.
using CandidateScore = std::function<std::optional<double>(const std::vector<CVec>&)>;

struct RandomizationResult {
  std::vector<CVec> vectors;
  double score = 0.0;
  bool rank_one_shortcut = false;
  int feasible_candidates = 0;
  int clip_events = 0;  // IRS only
};

/// Post-processing that maps a raw candidate onto the target's constraint set:
/// Bs/Relay rescale to `power`; Irs divides by the last entry and clips the
/// other moduli to 1, keeping phases. Returns nullopt when the IRS pivot is zero.
std::optional<CVec> postprocess_candidate(const CVec& x, RankOneTarget target, double power,
                                          int* clipped = nullptr, double clip_threshold = 1e-3);

/// x = V Lambda^{1/2} e with e ~ CN(0, I), negative eigenvalues clipped to zero.
CVec draw_gaussian_candidate(const HermEigen& eig, std::mt19937_64& rng);

/// Gaussian randomization over several lifted matrices at once; the principal
/// eigenvector tuple is always scored as the first candidate.
///
/// With an `incumbent` (its vectors and score), samples that do not beat it are
/// also tried as damped steps incumbent + s (candidate - incumbent) for each
/// s in opts.blend_steps. Bs/Relay candidates are phase-aligned to the
/// incumbent before blending.
RandomizationResult randomize_rank_one_joint(const std::vector<HermMat>& x_opt, RankOneTarget target,
                                             const CandidateScore& score, std::uint64_t seed,
                                             const RandomizationOptions& opts = {},
                                             const std::vector<CVec>* incumbent = nullptr,
                                             double incumbent_score = 0.0);

/// Single-matrix form.
RandomizationResult randomize_rank_one(const HermMat& x_opt, RankOneTarget target,
                                       const std::function<std::optional<double>(const CVec&)>& score,
                                       std::uint64_t seed, const RandomizationOptions& opts = {},
                                       const CVec* incumbent = nullptr, double incumbent_score = 0.0);

}  // namespace irsrelay
