#pragma once

// Wireless uplink model: distance pathloss, Rayleigh block fading, FDMA
// achievable rate, communication time and the closed-form outage
// probability. All quantities are linear-scale SI units.

#include <cstddef>
#include <random>

namespace cefl {

inline constexpr double kSpeedOfLight = 3e8;

struct ChannelParams {
  double carrier_hz = 3e9;
  double pathloss_exponent = 2.9;
  double noise_psd_w_per_hz = 3.981071705534973e-21;  // -174 dBm/Hz
  double fading_variance = 1.0;

  /// (c / (4 pi f_c))^2
  double beta0() const;
  void validate() const;
};

struct ChannelRealization {
  std::size_t client_id = 0;
  double distance_m = 0.0;
  double gain = 0.0;  // |h|^2, linear
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// beta0 * d^-alpha. Throws InvalidInput for d <= 0.
double pathloss(double distance_m, const ChannelParams& params);

/// gain = pathloss(d) * |o|^2 with o ~ CN(0, sigma^2).
ChannelRealization sample_gain(std::mt19937_64& rng, std::size_t client_id, double distance_m,
                               const ChannelParams& params);

/// B log2(1 + P g / (B N0)); 0 when B or P is 0.
double achievable_rate(double bandwidth_hz, double power_w, double gain,
                       double noise_psd_w_per_hz);

/// S / rate; +infinity when rate is 0.
double comm_time(double packet_bits, double rate_bps);

/// Pr(comm time > deadline) under Rayleigh fading:
///   1 - exp(-Q/P),  Q = B N0 / (L(d) sigma^2) * (2^(S/(B Gamma)) - 1).
/// Returns 1 when B or P is 0.
double outage_probability(double bandwidth_hz, double power_w, double distance_m,
                          const ChannelParams& params, double packet_bits, double deadline_s);

/// True (received) with probability 1 - p.
bool sample_transmission(std::mt19937_64& rng, double outage_probability);

}  // namespace cefl
