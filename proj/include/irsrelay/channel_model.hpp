#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "irsrelay/matrix_core.hpp"

namespace irsrelay {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Topology {
  Point bs{0.0, 0.0};
  Point irs{100.0, 50.0};
  Point relay{100.0, -50.0};
  std::vector<Point> users;
};

/// kappa (d / d0)^(-rho) per link class.
struct LargeScaleParams {
  double d0 = 1.0;
  double kappa_direct_and_relay = 1e-4;  // H_BS,R, h_BS,k, h_R,k
  double kappa_irs = 0.31622776601683794;  // 10^-0.5: H_BS,IRS, H_R,IRS, h_IRS,k
  double rho_direct = 3.5;  // BS -> user
  double rho_assisted = 2.0;  // relay- and IRS-aided links
};

struct Dims {
  int M = 4;  // BS antennas
  int L = 2;  // relay antennas
  int N = 8;  // IRS elements
  int K = 2;  // users
};

/// One quasi-static realization of every link.
struct ChannelSet {
  CMat H_BS_R;              // L x M
  CMat H_BS_IRS;            // N x M
  std::vector<CRow> h_BS;   // K of 1 x M
  CMat H_R_IRS;             // N x L
  std::vector<CRow> h_R;    // K of 1 x L
  std::vector<CRow> h_IRS;  // K of 1 x N

  Dims dims() const;
  /// FNV-1a over the raw bytes of every entry; used to check pairing across schemes.
  std::uint64_t checksum() const;
};

class NonPositiveDistanceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double path_gain(double d, double kappa, double rho, double d0);

/// K points uniform over the disk; deterministic in `seed`.
std::vector<Point> place_users(const Point& center, double radius, int K, std::uint64_t seed);

/// Each link draws from its own RNG stream derived from `seed`, so the draw of
/// one link does not depend on the dimensions of another.
ChannelSet draw_channels(const Topology& topo, const LargeScaleParams& params, const Dims& dims,
                         std::uint64_t seed);

}  // namespace irsrelay
