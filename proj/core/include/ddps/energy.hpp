#pragma once

#include <cstdint>
#include <optional>

// Energy accounting for a single energy-harvesting user device. Units:
// data in bits, time in seconds, CPU frequency in cycles/s, energy in joules.
// One slot is one second, so the harvest term is joules per slot.
namespace ddps::energy {

struct EnergyParams {
  double switched_capacitance = 1e-27;  // k
  double cycles_per_bit = 100.0;        // h
  double panel_area = 0.0005;           // A, m^2
  double irradiance = 600.0;            // H, W/m^2
  double efficiency = 0.2;              // eta, (0,1)
  double correction = 0.85;             // k_a, [0,1]
  double uplink_power = 0.1;            // P_u, W
  double downlink_power = 1.0;          // P_d, W
  double uplink_rate = 1.6e7;           // R_u, bit/s
  double downlink_rate = 1.6e7;         // R_d, bit/s
  double output_ratio = 0.2;            // r
  double battery_capacity = 2.0;        // E_b, J
  double local_cpu = 1e9;               // F_loc, cycles/s
};

// Throws DomainError when a field is out of range or when the offload and
// local energy slopes coincide (the balance point would be undefined).
void validate(const EnergyParams& p);

struct TransmissionTimes {
  double up = 0.0;
  double down = 0.0;
};

struct TransmissionEnergy {
  double up = 0.0;
  double down = 0.0;
  [[nodiscard]] double total() const { return up + down; }
};

struct BatteryState {
  double stored = 0.0;  // E_r
  std::int64_t slot = 0;
};

struct OffloadThresholds {
  double critical = 0.0;          // l_c
  double max_offload = 0.0;       // l_m
  std::optional<double> balanced; // q_opt, when defined for the task size
};

// Energy per bit of local execution: k * h * F_loc^2.
[[nodiscard]] double local_energy_slope(const EnergyParams& p);
// Energy per offloaded bit: P_u/R_u + r * P_d/R_d.
[[nodiscard]] double offload_energy_slope(const EnergyParams& p);

[[nodiscard]] double local_energy(const EnergyParams& p, double data_bits, double offload_bits);
[[nodiscard]] double local_time(const EnergyParams& p, double data_bits, double offload_bits);
[[nodiscard]] TransmissionTimes transmission_times(const EnergyParams& p, double offload_bits);
[[nodiscard]] TransmissionEnergy transmission_energy(const EnergyParams& p, double offload_bits);
[[nodiscard]] double total_energy(const EnergyParams& p, double data_bits, double offload_bits);
[[nodiscard]] double harvest_energy(const EnergyParams& p);

// Applies one slot of harvest and consumption. Throws InsufficientEnergyError
// if stored + harvest - consumed is negative; caps at the battery capacity.
[[nodiscard]] BatteryState update_battery(const BatteryState& b, const EnergyParams& p,
                                          double consumed);

// Task size whose local execution uses exactly one slot of harvest.
[[nodiscard]] double critical_data(const EnergyParams& p);
// Data volume whose transmission uses exactly one slot of harvest.
[[nodiscard]] double max_offload(const EnergyParams& p);

// Unclamped solution of harvest = local + transmission energy for a task of
// `data_bits`. Negative when offloading costs more per bit than local work.
[[nodiscard]] double balance_point(const EnergyParams& p, double data_bits);

// Same balance, but against an arbitrary energy budget instead of one slot
// of harvest.
[[nodiscard]] double balance_point(const EnergyParams& p, double data_bits, double budget);

// Balanced offload clamped into [max(0, l - l_c), l_m]. Empty when the raw
// balance is negative with a non-positive slope difference, or when the
// admissible interval is empty. Requires data_bits >= l_c.
[[nodiscard]] std::optional<double> balanced_offload(const EnergyParams& p, double data_bits);

[[nodiscard]] OffloadThresholds thresholds(const EnergyParams& p, double data_bits);

}  // namespace ddps::energy
