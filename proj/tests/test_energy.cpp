#include <gtest/gtest.h>

#include <random>

#include "ddps/energy.hpp"
#include "ddps/errors.hpp"

using namespace ddps;
using namespace ddps::energy;

namespace {

EnergyParams device() {
  EnergyParams p;
  p.switched_capacitance = 1e-27;
  p.cycles_per_bit = 1000.0;
  p.local_cpu = 1e9;
  p.panel_area = 0.01;
  p.irradiance = 1000.0;
  p.efficiency = 0.2;
  p.correction = 0.9;
  p.uplink_power = 0.1;
  p.downlink_power = 1.0;
  p.uplink_rate = 1e6;
  p.downlink_rate = 1e6;
  p.output_ratio = 0.2;
  p.battery_capacity = 5.0;
  return p;
}

}  // namespace

TEST(Energy, LocalEnergyExamples) {
  auto p = device();
  EXPECT_DOUBLE_EQ(local_energy(p, 1e6, 0.0), 1.0);
  p.local_cpu = 0.5e9;
  EXPECT_DOUBLE_EQ(local_energy(p, 1e6, 0.0), 0.25);
  EXPECT_DOUBLE_EQ(local_energy(p, 1e6, 1e6), 0.0);
}

TEST(Energy, TransmissionTimes) {
  auto p = device();
  auto t = transmission_times(p, 1e6);
  EXPECT_DOUBLE_EQ(t.up, 1.0);
  EXPECT_DOUBLE_EQ(t.down, 0.2);
  p.uplink_rate = 2e6;
  t = transmission_times(p, 1e5);
  EXPECT_DOUBLE_EQ(t.up, 0.05);
  EXPECT_DOUBLE_EQ(t.down, 0.02);
}

TEST(Energy, TransmissionEnergy) {
  auto p = device();
  auto e = transmission_energy(p, 1e6);
  EXPECT_DOUBLE_EQ(e.up, 0.1);
  EXPECT_DOUBLE_EQ(e.down, 0.2);
  e = transmission_energy(p, 1e5);
  EXPECT_DOUBLE_EQ(e.up, 0.01);
  EXPECT_DOUBLE_EQ(e.down, 0.02);
  EXPECT_DOUBLE_EQ(transmission_energy(p, 0.0).total(), 0.0);
}

TEST(Energy, TotalEnergyEndpoints) {
  const auto p = device();
  EXPECT_DOUBLE_EQ(total_energy(p, 1e6, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(total_energy(p, 1e6, 1e6), 0.3);
  EXPECT_THROW((void)total_energy(p, 1e6, 2e6), DomainError);
  EXPECT_THROW((void)total_energy(p, 1e6, -1.0), DomainError);
}

TEST(Energy, Harvest) {
  EXPECT_NEAR(harvest_energy(device()), 1.8, 1e-15);
  auto p = device();
  p.panel_area = 0.02;
  p.irradiance = 500.0;
  p.correction = 1.0;
  EXPECT_NEAR(harvest_energy(p), 2.0, 1e-15);
}

TEST(Energy, BatteryUpdate) {
  const auto p = device();
  auto b = update_battery({1.0, 0}, p, 0.3);
  EXPECT_NEAR(b.stored, 2.5, 1e-12);
  EXPECT_EQ(b.slot, 1);
  EXPECT_DOUBLE_EQ(update_battery({4.5, 0}, p, 0.0).stored, 5.0);  // capped at E_b
  EXPECT_DOUBLE_EQ(update_battery({0.0, 0}, p, 1.8).stored, 0.0);
  EXPECT_THROW((void)update_battery({0.0, 0}, p, 2.0), InsufficientEnergyError);
}

TEST(Energy, Thresholds) {
  const auto p = device();
  EXPECT_NEAR(critical_data(p), 1.8e6, 1e-6);
  EXPECT_NEAR(offload_energy_slope(p), 3e-7, 1e-22);
  EXPECT_NEAR(max_offload(p), 6e6, 1e-6);
  const auto q = balanced_offload(p, 3e6);
  ASSERT_TRUE(q.has_value());
  EXPECT_NEAR(*q, 1714285.7142857143, 1e-6);
  EXPECT_GE(*q, 1.2e6);
  EXPECT_LE(*q, 6e6);
}

TEST(Energy, BalanceAtTwiceCritical) {
  const auto p = device();
  const double l = 2.0 * critical_data(p);
  const auto q = balanced_offload(p, l);
  ASSERT_TRUE(q.has_value());
  EXPECT_LT(std::abs(total_energy(p, l, *q) - harvest_energy(p)), 1e-9);
}

TEST(Energy, BalanceUndefinedWhenSlopesMatch) {
  auto p = device();
  const double s = local_energy_slope(p);
  p.uplink_rate = p.downlink_rate = 1.0;
  p.output_ratio = 1.0;
  p.uplink_power = p.downlink_power = s / 2.0;
  ASSERT_EQ(offload_energy_slope(p), s);
  EXPECT_THROW(validate(p), DomainError);
}

TEST(Energy, ValidateRejectsBadFields) {
  auto p = device();
  p.efficiency = 1.5;
  EXPECT_THROW(validate(p), DomainError);
  p = device();
  p.correction = -0.1;
  EXPECT_THROW(validate(p), DomainError);
  p = device();
  p.uplink_rate = 0.0;
  EXPECT_THROW(validate(p), DomainError);
}

TEST(EnergyProperty, TotalEnergyDirectionFollowsSlopes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> f(1e8, 2e9);
  for (int i = 0; i < 200; ++i) {
    auto p = device();
    p.local_cpu = f(rng);
    const double dir = local_energy_slope(p) - offload_energy_slope(p);
    const double l = 4e6;
    double prev = total_energy(p, l, 0.0);
    for (int j = 1; j <= 50; ++j) {
      const double e = total_energy(p, l, j == 50 ? l : l * j / 50.0);
      if (dir > 0) EXPECT_LE(e, prev + 1e-12);
      if (dir < 0) EXPECT_GE(e, prev - 1e-12);
      prev = e;
    }
  }
}

TEST(EnergyProperty, BatteryStaysBounded) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto p = device();
  BatteryState b;
  for (int i = 0; i < 1000; ++i) {
    b = update_battery(b, p, (b.stored + harvest_energy(p)) * u(rng));
    ASSERT_GE(b.stored, 0.0);
    ASSERT_LE(b.stored, p.battery_capacity);
  }
}
