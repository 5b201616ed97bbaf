#pragma once

#include <span>

namespace attnalloc {

/// Per-user link quality. The QoE multiplier is downlink_rate * (1 - uplink_ber).
struct LinkParams {
  double downlink_rate = 1.0;  // bit/s
  double uplink_ber = 0.0;     // [0, 1)

  /// Throws DomainError when the rate is not positive or the BER is outside [0, 1).
  void validate() const;
  double factor() const noexcept { return downlink_rate * (1.0 - uplink_ber); }
  bool operator==(const LinkParams&) const = default;
};

/// SISO-equivalent channel with a min(tx, rx) antenna gain. The formulas are modelling
/// conventions; allocation results do not depend on them because the allocator is
/// invariant to a common weight scale.
struct ChannelConfig {
  double bandwidth = 1.0e6;                   // Hz
  double tx_power = 1.0;                      // W
  double distance = 10.0;                     // m
  double path_loss_exponent = 2.0;
  double interference_power = 1.2589254117941673;  // W, 1 dBW total over 3 paths
  double noise_psd = 3.981071705534973e-21;   // W/Hz, -174 dBm/Hz
  int tx_antennas = 6;
  int rx_antennas = 7;
  /// Uplink SINR for the BER term; the downlink SINR when unset (<= 0).
  double uplink_sinr = 0.0;

  void validate() const;
  bool operator==(const ChannelConfig&) const = default;
};

double dbw_to_watts(double dbw);

double connection_coefficient(double attention, const LinkParams& link);

/// Sum_n coefficient(w_n) * ln(c_n), capacities in K units.
/// Throws DomainError on mismatched lengths, empty input, a capacity <= 1 K or a non-positive weight.
double qoe(std::span<const double> weights, std::span<const double> capacities, const LinkParams& link);

double channel_sinr(const ChannelConfig& cfg);
/// Gaussian tail Q(x).
double gaussian_q(double x);
/// rate = B log2(1 + SINR), BER = Q(sqrt(2 SINR_uplink)).
LinkParams link_from_channel(const ChannelConfig& cfg);

}  // namespace attnalloc
