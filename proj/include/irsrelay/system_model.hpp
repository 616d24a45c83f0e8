#pragma once

#include <stdexcept>
#include <vector>

#include "irsrelay/channel_model.hpp"

namespace irsrelay {

struct BeamformingState {
  CMat G;      // M x K, column k is g_k
  CMat F;      // L x K, column k is f_k
  CVec theta;  // N reflection coefficients

  double bs_power() const { return G.squaredNorm(); }
  double relay_power() const { return F.squaredNorm(); }
  double max_theta_modulus() const { return theta.size() ? theta.cwiseAbs().maxCoeff() : 0.0; }
};

struct SystemParams {
  double P_BS_max = 1e-2;  // W
  double P_R_max = 1e-2;   // W
  std::vector<double> sigma_k2;  // per-user noise, W
  double sigma_R2 = 1e-11;       // relay noise per antenna, W
  double gamma_R_th = 10.0;      // linear

  static SystemParams defaults(int K);
};

/// Whether the IRS reflects during the relay's transmission phase. The
/// Independent benchmark turns it off there; the BS phase (users and relay
/// reception) always sees it.
enum class IrsMode { BothPhases, FirstPhaseOnly };

struct SINRReport {
  std::vector<double> gamma1;  // first phase, at the users
  std::vector<double> gamma2;  // second phase, at the users
  std::vector<double> gammaR;  // matched-filter SINR at the relay
  std::vector<double> gamma;   // gamma1 + gamma2
  double sum_rate = 0.0;       // 1/2 sum log2(1 + gamma), bits/s/Hz
};

struct EffectiveChannels {
  std::vector<CRow> h_BS;  // h'_BS,k, 1 x M
  CMat H_BS_R;             // H'_BS,R, L x M
  std::vector<CRow> h_R;   // h'_R,k, 1 x L
};

struct LiftedChannels {
  CMat H_B_I;  // (N+1) x M
  CMat H_R_I;  // (N+1) x L
};

class NegativeSINRError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

EffectiveChannels effective_channels(const ChannelSet& ch, const CVec& theta);

/// alpha_k = H'_BS,R g_k
CMat relay_filter_weights(const ChannelSet& ch, const CMat& G, const CVec& theta);

/// gamma_R,k = ||a_k||^4 / (sum_{j != k} |a_k^H a_j|^2 + sigma_R^2 ||a_k||^2), 0 for a_k = 0.
std::vector<double> relay_mf_sinr(const ChannelSet& ch, const CMat& G, const CVec& theta,
                                  const SystemParams& params);
std::vector<double> relay_mf_sinr_from_alpha(const CMat& alpha, double sigma_R2);

/// |h_k w_k|^2 / (sum_{j != k} |h_k w_j|^2 + sigma_k^2) for every k.
std::vector<double> downlink_sinr(const std::vector<CRow>& h, const CMat& W,
                                  const std::vector<double>& sigma2);

SINRReport sinr_report(const ChannelSet& ch, const BeamformingState& state, const SystemParams& params,
                       IrsMode mode = IrsMode::BothPhases);

LiftedChannels lifted_channel_matrices(const ChannelSet& ch, int k);

/// phi = [theta; 1]^H, so that phi^H H_B_I_k x = h'_BS,k x.
CVec lifted_phi(const CVec& theta);

double sum_rate(const std::vector<double>& gammas);

}  // namespace irsrelay
