#pragma once

#include <cmath>
#include <random>

#include "irsrelay/ao.hpp"
#include "irsrelay/channel_model.hpp"
#include "irsrelay/matrix_core.hpp"

namespace testutil {

using namespace irsrelay;

inline CMat random_cmat(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double sd = 1.0) {
  std::normal_distribution<double> nd(0.0, sd);
  CMat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

inline CVec random_cvec(std::mt19937_64& rng, Eigen::Index n) { return random_cmat(rng, n, 1); }

inline HermMat random_herm(std::mt19937_64& rng, Eigen::Index n) {
  return HermMat::symmetrized(random_cmat(rng, n, n));
}

inline CVec random_theta(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> amp(0.0, 1.0);
  CVec t(n);
  for (Eigen::Index i = 0; i < n; ++i) t(i) = std::polar(amp(rng), ph(rng));
  return t;
}

// Paper geometry with users drawn for `seed`.
inline ChannelSet desk_channels(const Dims& d, std::uint64_t seed) {
  Topology topo;
  topo.users = place_users({0.0, 200.0}, 10.0, d.K, seed);
  return draw_channels(topo, LargeScaleParams{}, d, seed);
}

inline double max_abs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testutil
