#include <gtest/gtest.h>

#include <random>

#include "ddps/energy.hpp"
#include "ddps/errors.hpp"
#include "ddps/offload.hpp"

using namespace ddps;
using namespace ddps::offload;

namespace {

energy::EnergyParams device() {
  energy::EnergyParams p;
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

TaskRequest task(double bits, double deadline) {
  TaskRequest t;
  t.data_bits = bits;
  t.deadline = deadline;
  t.local_cpu = 1e9;
  return t;
}

}  // namespace

TEST(Offload, RequiredCapacityExample) {
  EXPECT_NEAR(required_capacity(1e5, 1.0, 0.4286, device()), 221533008.41825432, 1e-3);
}

TEST(Offload, RequiredCapacityInfeasible) {
  EXPECT_THROW((void)required_capacity(1e5, 0.12, 0.0, device()), DeadlineInfeasibleError);
  EXPECT_THROW((void)required_capacity(0.0, 1.0, 0.0, device()), DomainError);
}

TEST(Offload, RequiredCapacityScales) {
  // F = h q / slack: twice the bits over the same slack needs twice the
  // capacity, while doubling both leaves F unchanged.
  const auto p = device();
  const double f1 = required_capacity(1e5, 0.12 + 0.5, 0.0, p);
  EXPECT_NEAR(required_capacity(2e5, 0.24 + 0.5, 0.0, p) / f1, 2.0, 1e-12);
  EXPECT_NEAR(required_capacity(2e5, 0.24 + 1.0, 0.0, p) / f1, 1.0, 1e-12);
}

TEST(Offload, LocalBranch) {
  const auto d = decide(task(0.9e6, 3.0), {}, device(), 0.0);
  EXPECT_EQ(d.kind, DecisionKind::kLocalOnly);
  EXPECT_EQ(d.branch, Branch::kLocal);
  EXPECT_EQ(d.offload_bits, 0.0);
  EXPECT_EQ(d.required_cpu, 0.0);
  EXPECT_DOUBLE_EQ(d.expected_latency, 0.9);
}

TEST(Offload, BalancedBranchExample) {
  const auto d = decide(task(3e6, 3.0), {}, device(), 0.0);
  EXPECT_EQ(d.kind, DecisionKind::kPartial);
  EXPECT_EQ(d.branch, Branch::kPartialBalanced);
  EXPECT_NEAR(d.offload_bits, 1714285.7142857143, 1e-6);
  EXPECT_NEAR(d.energy, 1.8, 1e-12);
  EXPECT_GT(d.required_cpu, 0.0);
  EXPECT_LE(d.expected_latency, 3.0 + 1e-9);
}

TEST(Offload, MinimalBranchWithStoredEnergy) {
  const auto d = decide(task(3e6, 3.0), {2.0, 0}, device(), 0.0);
  EXPECT_EQ(d.branch, Branch::kPartialMinimal);
  EXPECT_NEAR(d.offload_bits, 1.2e6, 1e-6);  // l - l_c
  // Finishes exactly at the deadline.
  EXPECT_NEAR(offload_latency(d.offload_bits, d.required_cpu, 0.0, device()), 3.0, 1e-12);
}

TEST(Offload, DropOversize) {
  const auto d = decide(task(7e6, 3.0), {}, device(), 0.0);
  EXPECT_EQ(d.kind, DecisionKind::kDrop);
  EXPECT_EQ(d.reason, DropReason::kOversize);
}

TEST(Offload, DropWhenWaitEatsTheDeadline) {
  const auto d = decide(task(3e6, 2.0), {}, device(), 0.5);
  EXPECT_EQ(d.kind, DecisionKind::kDrop);
  EXPECT_EQ(d.reason, DropReason::kDeadlineInfeasible);
}

TEST(Offload, LocalNeedsBudget) {
  // Same task, but the slot's harvest is already spent.
  const auto d = decide_with_budget(task(0.9e6, 3.0), 0.1, device(), 0.0);
  EXPECT_EQ(d.kind, DecisionKind::kDrop);
  EXPECT_EQ(d.reason, DropReason::kEnergyInfeasible);
}

TEST(Offload, InvalidTask) {
  EXPECT_THROW((void)decide(task(0.0, 1.0), {}, device(), 0.0), DomainError);
  EXPECT_THROW((void)decide(task(1e6, 0.0), {}, device(), 0.0), DomainError);
}

TEST(OffloadProperty, DecisionsAreFeasibleHonestAndMinimal) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int partial = 0;
  for (int i = 0; i < 5000; ++i) {
    auto p = device();
    p.local_cpu = 1e8 + 1.9e9 * u(rng);
    auto t = task(energy::critical_data(p) * (0.2 + 4.0 * u(rng)), 0.2 + 3.0 * u(rng));
    t.local_cpu = p.local_cpu;
    const double stored = 5.0 * u(rng), wait = 0.3 * u(rng);
    const auto d = decide(t, {stored, 0}, p, wait);
    const auto again = decide(t, {stored, 0}, p, wait);
    ASSERT_EQ(d.offload_bits, again.offload_bits);
    ASSERT_EQ(d.required_cpu, again.required_cpu);
    if (d.kind == DecisionKind::kDrop) continue;
    EXPECT_NO_THROW((void)energy::update_battery({stored, 0}, p, d.energy));
    if (d.kind != DecisionKind::kPartial) continue;
    ++partial;
    ASSERT_GT(d.offload_bits, 0.0);
    ASSERT_LE(d.offload_bits, t.data_bits);
    ASSERT_LE(offload_latency(d.offload_bits, d.required_cpu, wait, p), t.deadline + 1e-9);
    ASSERT_LE(energy::local_time(p, t.data_bits, d.offload_bits), t.deadline + 1e-9);
    ASSERT_GT(offload_latency(d.offload_bits, 0.99 * d.required_cpu, wait, p), t.deadline);
  }
  EXPECT_GT(partial, 100);
}
