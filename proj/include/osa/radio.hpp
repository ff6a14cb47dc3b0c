#ifndef OSA_RADIO_HPP
#define OSA_RADIO_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "osa/error.hpp"

namespace osa {

struct Position {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Position&) const = default;
};

struct SecondaryUser {
  int id = 0;
  Position position;
  double speed = 0.0;    // m per time unit
  double heading = 0.0;  // radians
  int busy_spectrum_count = 0;
  int available_spectrum_count = 0;
};

struct PrimaryUser {
  Position position;
  double transmit_power_w = 1.0;
  double carrier_frequency_hz = 900e6;

  bool operator==(const PrimaryUser&) const = default;
};

/// Power-law path gain g(R) = K R^-alpha.
struct PathLossModel {
  double reference_gain = 1.0;
  double exponent = 2.0;
  double noise_power_w = 1e-9;
  double wave_speed = 3e8;

  void validate() const {
    if (!(exponent >= 1.0)) throw ConfigError("path loss exponent must be >= 1");
    if (!(reference_gain > 0.0) || !(noise_power_w > 0.0) || !(wave_speed > 0.0)) {
      throw ConfigError("path loss gain, noise power and wave speed must be positive");
    }
  }

  bool operator==(const PathLossModel&) const = default;
};

inline double euclidean_distance(Position a, Position b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

inline double euclidean_distance(const SecondaryUser& su, const PrimaryUser& pu) noexcept {
  return euclidean_distance(su.position, pu.position);
}

/// Scales distances by 10 / max so the farthest user sits at exactly 10.
/// All-zero input maps to all zeros.
inline std::vector<double> normalize_distances(std::span<const double> d) {
  if (d.empty()) throw DomainError("cannot normalize an empty distance list");
  const double max = *std::max_element(d.begin(), d.end());
  std::vector<double> out(d.size(), 0.0);
  if (max <= 0.0) return out;
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] == max ? 10.0 : 10.0 * d[i] / max;
  return out;
}

/// Doppler shift (v cos(theta) / c) f_c; negative when receding.
inline double doppler_shift(double speed, double heading_angle, double carrier_hz, double wave_speed) noexcept {
  return speed * std::cos(heading_angle) / wave_speed * carrier_hz;
}

inline double mobility_degree(double speed, double v_max) {
  if (!(v_max > 0.0)) throw DomainError("v_max must be positive");
  return 10.0 * std::clamp(speed, 0.0, v_max) / v_max;
}

/// SNR in dB seen at distance r from the primary transmitter.
inline double snr_db_at(double distance_m, const PrimaryUser& pu, const PathLossModel& m) {
  if (distance_m <= 0.0) return std::numeric_limits<double>::infinity();
  const double gain = m.reference_gain * std::pow(distance_m, -m.exponent);
  return 10.0 * std::log10(pu.transmit_power_w * gain / m.noise_power_w);
}

/// Inverts snr_db_at: R = (P K / (sigma^2 10^(snr/10)))^(1/alpha).
inline double distance_from_snr(double snr_db, const PrimaryUser& pu, const PathLossModel& m) {
  const double radicand = pu.transmit_power_w * m.reference_gain / (m.noise_power_w * std::pow(10.0, snr_db / 10.0));
  return std::pow(radicand, 1.0 / m.exponent);
}

/// busy / available, in [0, 1].
inline double spectrum_efficiency(int busy, int available) {
  if (available <= 0) throw DomainError("spectrum efficiency undefined with no available spectrum");
  if (busy < 0 || busy > available) throw DomainError("busy spectrum count must lie in [0, available]");
  return static_cast<double>(busy) / static_cast<double>(available);
}

}  // namespace osa

#endif  // OSA_RADIO_HPP
