#include "attnalloc/qoe.hpp"

#include <cmath>

#include "attnalloc/errors.hpp"

namespace attnalloc {

void LinkParams::validate() const {
  if (!(downlink_rate > 0.0) || !std::isfinite(downlink_rate)) throw DomainError("downlink rate must be positive");
  if (!(uplink_ber >= 0.0 && uplink_ber < 1.0)) throw DomainError("uplink BER must lie in [0, 1)");
}

void ChannelConfig::validate() const {
  if (!(bandwidth > 0.0 && tx_power > 0.0 && distance > 0.0 && interference_power > 0.0 && noise_psd > 0.0))
    throw DomainError("channel quantities must be positive");
  if (!(path_loss_exponent >= 1.0)) throw DomainError("path loss exponent must be >= 1");
  if (tx_antennas < 1 || rx_antennas < 1) throw DomainError("antenna counts must be >= 1");
  if (uplink_sinr < 0.0) throw DomainError("uplink SINR must be non-negative");
}

double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

double connection_coefficient(double attention, const LinkParams& link) { return attention * link.factor(); }

double qoe(std::span<const double> weights, std::span<const double> capacities, const LinkParams& link) {
  link.validate();
  if (weights.empty() || weights.size() != capacities.size())
    throw DomainError("weights and capacities must be non-empty and of equal length");
  double total = 0.0;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    if (!(weights[n] > 0.0)) throw DomainError("attention weights must be positive");
    if (!(capacities[n] > 1.0)) throw DomainError("capacity must exceed 1 K so the log term is positive");
    total += connection_coefficient(weights[n], link) * std::log(capacities[n]);
  }
  return total;
}

double channel_sinr(const ChannelConfig& cfg) {
  cfg.validate();
  const double gain = static_cast<double>(std::min(cfg.tx_antennas, cfg.rx_antennas));
  const double received = cfg.tx_power * std::pow(cfg.distance, -cfg.path_loss_exponent) * gain;
  return received / (cfg.interference_power + cfg.noise_psd * cfg.bandwidth);
}

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

LinkParams link_from_channel(const ChannelConfig& cfg) {
  const double sinr = channel_sinr(cfg);
  const double uplink = cfg.uplink_sinr > 0.0 ? cfg.uplink_sinr : sinr;
  LinkParams link{cfg.bandwidth * std::log2(1.0 + sinr), gaussian_q(std::sqrt(2.0 * uplink))};
  link.validate();
  return link;
}

}  // namespace attnalloc
