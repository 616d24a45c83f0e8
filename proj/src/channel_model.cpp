#include "irsrelay/channel_model.hpp"

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <string>

namespace irsrelay {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Dims ChannelSet::dims() const {
  return Dims{static_cast<int>(H_BS_R.cols()), static_cast<int>(H_BS_R.rows()),
              static_cast<int>(H_BS_IRS.rows()), static_cast<int>(h_BS.size())};
}

namespace {

void fnv_mix(std::uint64_t& h, const CMat& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double parts[2] = {m(i, j).real(), m(i, j).imag()};
      unsigned char bytes[sizeof(parts)];
      std::memcpy(bytes, parts, sizeof(parts));
      for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
      }
    }
  }
}

enum class Link : std::uint32_t { BsRelay = 1, BsIrs, BsUser, RelayIrs, RelayUser, IrsUser };

std::mt19937_64 link_stream(std::uint64_t seed, Link link, std::uint32_t sub = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(link), sub};
  return std::mt19937_64(seq);
}

CMat rayleigh(std::mt19937_64& rng, int rows, int cols, double gain) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const double s = std::sqrt(gain / 2.0);
  CMat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      m(i, j) = cplx(s * re, s * im);
    }
  return m;
}

}  // namespace

std::uint64_t ChannelSet::checksum() const {
  std::uint64_t h = 1469598103934665603ULL;
  fnv_mix(h, H_BS_R);
  fnv_mix(h, H_BS_IRS);
  fnv_mix(h, H_R_IRS);
  for (const auto& v : h_BS) fnv_mix(h, v);
  for (const auto& v : h_R) fnv_mix(h, v);
  for (const auto& v : h_IRS) fnv_mix(h, v);
  return h;
}

double path_gain(double d, double kappa, double rho, double d0) {
  if (!(d > 0.0) || !(d0 > 0.0)) {
    throw NonPositiveDistanceError("path_gain: distances must be positive (d=" + std::to_string(d) +
                                   ", d0=" + std::to_string(d0) + ")");
  }
  return kappa * std::pow(d / d0, -rho);
}

std::vector<Point> place_users(const Point& center, double radius, int K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(K);
  for (int k = 0; k < K; ++k) {
    const double r = radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    out.push_back({center.x + r * std::cos(phi), center.y + r * std::sin(phi)});
  }
  return out;
}

ChannelSet draw_channels(const Topology& topo, const LargeScaleParams& p, const Dims& dims,
                         std::uint64_t seed) {
  const auto [M, L, N, K] = dims;
  if (M < 1 || L < 1 || N < 1 || K < 1) throw DimensionError("draw_channels: dimensions must be positive");
  if (K > std::min(M, L)) {
    throw DimensionError("draw_channels: K <= min(M, L) required (K=" + std::to_string(K) + ")");
  }
  if (static_cast<int>(topo.users.size()) != K) {
    throw DimensionError("draw_channels: topology has " + std::to_string(topo.users.size()) +
                         " users, expected " + std::to_string(K));
  }
  const double g_bs_r = path_gain(distance(topo.bs, topo.relay), p.kappa_direct_and_relay, p.rho_assisted, p.d0);
  const double g_bs_irs = path_gain(distance(topo.bs, topo.irs), p.kappa_irs, p.rho_assisted, p.d0);
  const double g_r_irs = path_gain(distance(topo.relay, topo.irs), p.kappa_irs, p.rho_assisted, p.d0);

  ChannelSet ch;
  {
    auto rng = link_stream(seed, Link::BsRelay);
    ch.H_BS_R = rayleigh(rng, L, M, g_bs_r);
  }
  {
    auto rng = link_stream(seed, Link::BsIrs);
    ch.H_BS_IRS = rayleigh(rng, N, M, g_bs_irs);
  }
  {
    auto rng = link_stream(seed, Link::RelayIrs);
    ch.H_R_IRS = rayleigh(rng, N, L, g_r_irs);
  }
  for (int k = 0; k < K; ++k) {
    const Point& u = topo.users[k];
    const auto sub = static_cast<std::uint32_t>(k);
    auto r1 = link_stream(seed, Link::BsUser, sub);
    ch.h_BS.emplace_back(
        rayleigh(r1, 1, M, path_gain(distance(topo.bs, u), p.kappa_direct_and_relay, p.rho_direct, p.d0)));
    auto r2 = link_stream(seed, Link::RelayUser, sub);
    ch.h_R.emplace_back(
        rayleigh(r2, 1, L, path_gain(distance(topo.relay, u), p.kappa_direct_and_relay, p.rho_assisted, p.d0)));
    auto r3 = link_stream(seed, Link::IrsUser, sub);
    ch.h_IRS.emplace_back(rayleigh(r3, 1, N, path_gain(distance(topo.irs, u), p.kappa_irs, p.rho_assisted, p.d0)));
  }
  return ch;
}

}  // namespace irsrelay
