#include "ddps/energy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ddps/errors.hpp"

namespace ddps::energy {
namespace {

constexpr double kSnapTolerance = 1e-12;

double snap(double joules) {
  return (joules < 0.0 && joules > -kSnapTolerance) ? 0.0 : joules;
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string("energy params: ") + name + " must be positive and finite");
  }
}

void require_bits(double data_bits, double offload_bits) {
  if (!(offload_bits >= 0.0) || !(data_bits >= 0.0)) {
    throw DomainError("data sizes must be non-negative");
  }
  if (offload_bits > data_bits) {
    throw DomainError("offloaded bits exceed task size");
  }
}

}  // namespace

void validate(const EnergyParams& p) {
  require_positive(p.switched_capacitance, "switched_capacitance");
  require_positive(p.cycles_per_bit, "cycles_per_bit");
  require_positive(p.panel_area, "panel_area");
  require_positive(p.irradiance, "irradiance");
  require_positive(p.uplink_power, "uplink_power");
  require_positive(p.downlink_power, "downlink_power");
  require_positive(p.uplink_rate, "uplink_rate");
  require_positive(p.downlink_rate, "downlink_rate");
  require_positive(p.output_ratio, "output_ratio");
  require_positive(p.battery_capacity, "battery_capacity");
  require_positive(p.local_cpu, "local_cpu");
  if (!(p.efficiency > 0.0 && p.efficiency < 1.0)) {
    throw DomainError("energy params: efficiency must lie in (0,1)");
  }
  if (!(p.correction >= 0.0 && p.correction <= 1.0)) {
    throw DomainError("energy params: correction must lie in [0,1]");
  }
  if (local_energy_slope(p) == offload_energy_slope(p)) {
    throw DomainError("energy params: local and offload energy slopes coincide");
  }
}

double local_energy_slope(const EnergyParams& p) {
  return p.switched_capacitance * p.cycles_per_bit * p.local_cpu * p.local_cpu;
}

double offload_energy_slope(const EnergyParams& p) {
  return p.uplink_power / p.uplink_rate + p.output_ratio * p.downlink_power / p.downlink_rate;
}

double local_energy(const EnergyParams& p, double data_bits, double offload_bits) {
  require_bits(data_bits, offload_bits);
  return snap(p.switched_capacitance * (data_bits - offload_bits) * p.cycles_per_bit *
              p.local_cpu * p.local_cpu);
}

double local_time(const EnergyParams& p, double data_bits, double offload_bits) {
  require_bits(data_bits, offload_bits);
  return (data_bits - offload_bits) * p.cycles_per_bit / p.local_cpu;
}

TransmissionTimes transmission_times(const EnergyParams& p, double offload_bits) {
  if (!(offload_bits >= 0.0)) throw DomainError("offloaded bits must be non-negative");
  return {offload_bits / p.uplink_rate, offload_bits * p.output_ratio / p.downlink_rate};
}

TransmissionEnergy transmission_energy(const EnergyParams& p, double offload_bits) {
  if (!(offload_bits >= 0.0)) throw DomainError("offloaded bits must be non-negative");
  return {p.uplink_power * offload_bits / p.uplink_rate,
          p.downlink_power * offload_bits * p.output_ratio / p.downlink_rate};
}

double total_energy(const EnergyParams& p, double data_bits, double offload_bits) {
  const auto tx = transmission_energy(p, offload_bits);
  return snap(tx.up + local_energy(p, data_bits, offload_bits) + tx.down);
}

double harvest_energy(const EnergyParams& p) {
  return p.panel_area * p.irradiance * p.efficiency * p.correction;
}

BatteryState update_battery(const BatteryState& b, const EnergyParams& p, double consumed) {
  if (!(consumed >= 0.0)) throw DomainError("consumed energy must be non-negative");
  const double next = snap(b.stored + harvest_energy(p) - consumed);
  if (next < 0.0) {
    throw InsufficientEnergyError("slot " + std::to_string(b.slot) +
                                  ": consumption exceeds stored plus harvested energy");
  }
  return {std::min(next, p.battery_capacity), b.slot + 1};
}

double critical_data(const EnergyParams& p) {
  return harvest_energy(p) / local_energy_slope(p);
}

double max_offload(const EnergyParams& p) {
  return harvest_energy(p) / offload_energy_slope(p);
}

double balance_point(const EnergyParams& p, double data_bits, double budget) {
  const double local = local_energy_slope(p);
  const double offload = offload_energy_slope(p);
  if (local == offload) throw DomainError("local and offload energy slopes coincide");
  return (local * data_bits - budget) / (local - offload);
}

double balance_point(const EnergyParams& p, double data_bits) {
  return balance_point(p, data_bits, harvest_energy(p));
}

std::optional<double> balanced_offload(const EnergyParams& p, double data_bits) {
  const double l_c = critical_data(p);
  if (data_bits < l_c * (1.0 - 1e-12)) {
    throw DomainError("balanced offload requires data size >= critical data size");
  }
  const double raw = balance_point(p, data_bits);
  if (local_energy_slope(p) <= offload_energy_slope(p) && raw < 0.0) return std::nullopt;
  const double lo = std::max(0.0, data_bits - l_c);
  const double hi = max_offload(p);
  if (lo > hi) return std::nullopt;
  return std::clamp(raw, lo, hi);
}

OffloadThresholds thresholds(const EnergyParams& p, double data_bits) {
  OffloadThresholds t{critical_data(p), max_offload(p), std::nullopt};
  if (data_bits >= t.critical) t.balanced = balanced_offload(p, data_bits);
  return t;
}

}  // namespace ddps::energy
