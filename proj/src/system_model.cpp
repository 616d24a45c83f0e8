#include "irsrelay/system_model.hpp"

#include <cmath>
#include <string>

namespace irsrelay {

SystemParams SystemParams::defaults(int K) {
  SystemParams p;
  p.sigma_k2.assign(K, 1e-11);
  return p;
}

namespace {

void check_theta(const ChannelSet& ch, const CVec& theta) {
  if (theta.size() != ch.H_BS_IRS.rows()) {
    throw DimensionError("theta has " + std::to_string(theta.size()) + " entries, IRS has " +
                         std::to_string(ch.H_BS_IRS.rows()));
  }
}

}  // namespace

EffectiveChannels effective_channels(const ChannelSet& ch, const CVec& theta) {
  check_theta(ch, theta);
  EffectiveChannels eff;
  const Eigen::Index K = static_cast<Eigen::Index>(ch.h_BS.size());
  // h_IRS,k diag(theta) = elementwise product of rows.
  for (Eigen::Index k = 0; k < K; ++k) {
    const CRow ht = ch.h_IRS[k].cwiseProduct(theta.transpose());
    eff.h_BS.push_back(ht * ch.H_BS_IRS + ch.h_BS[k]);
    eff.h_R.push_back(ht * ch.H_R_IRS + ch.h_R[k]);
  }
  eff.H_BS_R = ch.H_R_IRS.adjoint() * theta.asDiagonal() * ch.H_BS_IRS + ch.H_BS_R;
  return eff;
}

CMat relay_filter_weights(const ChannelSet& ch, const CMat& G, const CVec& theta) {
  check_theta(ch, theta);
  const CMat H = ch.H_R_IRS.adjoint() * theta.asDiagonal() * ch.H_BS_IRS + ch.H_BS_R;
  return H * G;
}

std::vector<double> relay_mf_sinr_from_alpha(const CMat& alpha, double sigma_R2) {
  const Eigen::Index K = alpha.cols();
  std::vector<double> out(K, 0.0);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double n2 = alpha.col(k).squaredNorm();
    if (n2 == 0.0) continue;
    double interf = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j != k) interf += std::norm(alpha.col(k).dot(alpha.col(j)));
    }
    out[k] = n2 * n2 / (interf + sigma_R2 * n2);
  }
  return out;
}

std::vector<double> relay_mf_sinr(const ChannelSet& ch, const CMat& G, const CVec& theta,
                                  const SystemParams& params) {
  return relay_mf_sinr_from_alpha(relay_filter_weights(ch, G, theta), params.sigma_R2);
}

std::vector<double> downlink_sinr(const std::vector<CRow>& h, const CMat& W,
                                  const std::vector<double>& sigma2) {
  const std::size_t K = h.size();
  std::vector<double> out(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const CRow hw = h[k] * W;
    double interf = 0.0;
    for (Eigen::Index j = 0; j < hw.size(); ++j) {
      if (static_cast<std::size_t>(j) != k) interf += std::norm(hw(j));
    }
    out[k] = std::norm(hw(static_cast<Eigen::Index>(k))) / (interf + sigma2[k]);
  }
  return out;
}

SINRReport sinr_report(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                       IrsMode mode) {
  const EffectiveChannels eff = effective_channels(ch, state.theta);
  SINRReport r;
  r.gamma1 = downlink_sinr(eff.h_BS, state.G, params.sigma_k2);
  if (mode == IrsMode::BothPhases) {
    r.gamma2 = downlink_sinr(eff.h_R, state.F, params.sigma_k2);
  } else {
    r.gamma2 = downlink_sinr(ch.h_R, state.F, params.sigma_k2);
  }
  r.gammaR = relay_mf_sinr_from_alpha(eff.H_BS_R * state.G, params.sigma_R2);
  r.gamma.resize(r.gamma1.size());
  for (std::size_t k = 0; k < r.gamma.size(); ++k) r.gamma[k] = r.gamma1[k] + r.gamma2[k];
  r.sum_rate = sum_rate(r.gamma);
  return r;
}

LiftedChannels lifted_channel_matrices(const ChannelSet& ch, int k) {
  const Dims d = ch.dims();
  if (k < 0 || k >= d.K) throw DimensionError("lifted_channel_matrices: user index out of range");
  LiftedChannels out;
  out.H_B_I.resize(d.N + 1, d.M);
  out.H_B_I.topRows(d.N) = ch.h_IRS[k].transpose().asDiagonal() * ch.H_BS_IRS;
  out.H_B_I.row(d.N) = ch.h_BS[k];
  out.H_R_I.resize(d.N + 1, d.L);
  out.H_R_I.topRows(d.N) = ch.h_IRS[k].transpose().asDiagonal() * ch.H_R_IRS;
  out.H_R_I.row(d.N) = ch.h_R[k];
  return out;
}

CVec lifted_phi(const CVec& theta) {
  CVec phi(theta.size() + 1);
  phi.head(theta.size()) = theta.conjugate();
  phi(theta.size()) = 1.0;
  return phi;
}

double sum_rate(const std::vector<double>& gammas) {
  double s = 0.0;
  for (double g : gammas) {
    if (g < 0.0 || std::isnan(g)) throw NegativeSINRError("sum_rate: negative SINR");
    s += std::log2(1.0 + g);
  }
  return 0.5 * s;
}

}  // namespace irsrelay
