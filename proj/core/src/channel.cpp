#include "cefl/channel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "cefl/error.hpp"

namespace cefl {

double ChannelParams::beta0() const {
  const double r = kSpeedOfLight / (4.0 * std::numbers::pi * carrier_hz);
  return r * r;
}

void ChannelParams::validate() const {
  if (!(carrier_hz > 0.0) || !(pathloss_exponent > 0.0) || !(noise_psd_w_per_hz > 0.0) ||
      !(fading_variance > 0.0)) {
    throw InvalidInput("channel parameters must be strictly positive");
  }
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

double pathloss(double distance_m, const ChannelParams& params) {
  if (!(distance_m > 0.0)) throw InvalidInput("pathloss distance must be positive");
  return params.beta0() * std::pow(distance_m, -params.pathloss_exponent);
}

ChannelRealization sample_gain(std::mt19937_64& rng, std::size_t client_id, double distance_m,
                               const ChannelParams& params) {
  std::normal_distribution<double> component(0.0, std::sqrt(params.fading_variance / 2.0));
  const double re = component(rng);
  const double im = component(rng);
  return {client_id, distance_m, pathloss(distance_m, params) * (re * re + im * im)};
}

double achievable_rate(double bandwidth_hz, double power_w, double gain,
                       double noise_psd_w_per_hz) {
  if (bandwidth_hz < 0.0 || power_w < 0.0 || gain < 0.0) {
    throw InvalidInput("achievable_rate inputs must be non-negative");
  }
  if (bandwidth_hz == 0.0 || power_w == 0.0) return 0.0;
  const double snr = power_w * gain / (bandwidth_hz * noise_psd_w_per_hz);
  return bandwidth_hz * std::log1p(snr) / std::numbers::ln2;
}

double comm_time(double packet_bits, double rate_bps) {
  if (!(packet_bits > 0.0)) throw InvalidInput("packet size must be positive");
  if (rate_bps <= 0.0) return std::numeric_limits<double>::infinity();
  return packet_bits / rate_bps;
}

double outage_probability(double bandwidth_hz, double power_w, double distance_m,
                          const ChannelParams& params, double packet_bits, double deadline_s) {
  if (bandwidth_hz <= 0.0 || power_w <= 0.0) return 1.0;
  if (!(deadline_s > 0.0)) throw InvalidInput("deadline must be positive");
  const double spectral = packet_bits / (bandwidth_hz * deadline_s);
  const double q = bandwidth_hz * params.noise_psd_w_per_hz /
                   (pathloss(distance_m, params) * params.fading_variance) *
                   std::expm1(spectral * std::numbers::ln2);
  // -expm1(-x) = 1 - exp(-x) without cancellation for small x.
  const double p = -std::expm1(-q / power_w);
  return std::isnan(p) ? 1.0 : std::min(std::max(p, 0.0), 1.0);
}

bool sample_transmission(std::mt19937_64& rng, double outage_probability) {
  if (!(outage_probability >= 0.0 && outage_probability <= 1.0)) {
    throw InvalidInput("outage probability must lie in [0, 1]");
  }
  // Top 53 bits as a uniform double in [0, 1).
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u >= outage_probability;
}

}  // namespace cefl
