#include <gtest/gtest.h>

#include <vector>

#include "ddps/errors.hpp"
#include "ddps/report.hpp"
#include "ddps/simulator.hpp"

using namespace ddps;
using pricing::Strategy;

namespace {

Scenario small() {
  Scenario s = paper_defaults();
  s.n_users = 12;
  s.slots = 20;
  return s;
}

const std::vector<Strategy> kAll(pricing::kAllStrategies.begin(), pricing::kAllStrategies.end());

}  // namespace

TEST(Simulator, Deterministic) {
  const Scenario s = paper_defaults();
  EXPECT_EQ(report::metrics_csv(sim::run(s)), report::metrics_csv(sim::run(s)));
  Scenario other = s;
  other.seed = 2;
  EXPECT_NE(report::metrics_csv(sim::run(s)), report::metrics_csv(sim::run(other)));
}

TEST(Simulator, NoUsers) {
  Scenario s = paper_defaults();
  s.n_users = 0;
  const auto r = sim::run(s);
  EXPECT_EQ(r.metrics.tasks, 0);
  EXPECT_EQ(r.metrics.server_utility, 0.0);
  EXPECT_EQ(r.metrics.ros, 0.0);
  EXPECT_DOUBLE_EQ(r.metrics.idle_capacity, s.capacity * s.slots);
}

TEST(Simulator, EveryTaskHasOneFate) {
  for (auto st : kAll) {
    Scenario s = small();
    s.strategy = st;
    const auto m = sim::run(s).metrics;
    EXPECT_EQ(m.tasks, m.local_count + m.served_count + m.drop_count + m.unserved_count)
        << pricing::name(st);
    EXPECT_EQ(m.drop_count, m.device_drop_count + m.server_drop_count);
    EXPECT_LE(m.on_time_count, m.tasks);
  }
}

TEST(Simulator, Accounting) {
  for (auto st : kAll) {
    Scenario s = paper_defaults();
    s.strategy = st;
    sim::RunOptions o;
    o.per_slot = true;
    const auto r = sim::run(s, o);
    double sum = 0.0;
    for (double u : r.slot_utilities) sum += u;
    EXPECT_EQ(sum, r.metrics.server_utility);
    EXPECT_NEAR(r.metrics.granted_capacity + r.metrics.idle_capacity, s.capacity * s.slots,
                s.capacity * s.slots * 1e-12);
    EXPECT_EQ(r.per_slot.size(), static_cast<std::size_t>(s.slots));
    EXPECT_GE(r.metrics.ros, 0.0);
    EXPECT_LE(r.metrics.ros, 1.0);
    EXPECT_LE(r.metrics.capacity_utilization, 1.0 + 1e-12);
  }
}

TEST(Simulator, CommonArrivalsAcrossStrategiesAndCapacity) {
  Scenario a = small(), b = small();
  b.strategy = Strategy::kUniform;
  b.capacity = 2e9;
  EXPECT_EQ(sim::run(a).metrics.tasks, sim::run(b).metrics.tasks);
}

TEST(Simulator, TaskLatencyRules) {
  EXPECT_DOUBLE_EQ(sim::task_latency(sim::TaskFate::kLocal, 0.5, 0.3).latency, 0.3);
  EXPECT_TRUE(sim::task_latency(sim::TaskFate::kLocal, 0.5, 0.3).on_time);
  EXPECT_FALSE(sim::task_latency(sim::TaskFate::kLocal, 0.5, 0.8).on_time);
  EXPECT_DOUBLE_EQ(sim::task_latency(sim::TaskFate::kDeviceDrop, 0.5, 0.0).latency, 0.5);
  EXPECT_FALSE(sim::task_latency(sim::TaskFate::kServerDrop, 0.5, 0.0).on_time);
  EXPECT_DOUBLE_EQ(sim::task_latency(sim::TaskFate::kUnserved, 0.4, 0.0).latency, 0.4);
}

TEST(Simulator, SweepShape) {
  const std::vector<double> caps{1e9, 2e9, 3e9, 4e9, 5e9, 6e9};
  const std::vector<std::uint64_t> seeds{1};
  const auto rows = sim::sweep(small(), SweepAxis::kCapacity, caps, kAll, seeds);
  ASSERT_EQ(rows.size(), 30u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].value, caps[i / 5]);
    EXPECT_EQ(rows[i].strategy, kAll[i % 5]);
  }
  const std::vector<double> lams{0.1, 0.2, 0.3};
  EXPECT_EQ(sim::sweep(small(), SweepAxis::kLambda, lams, kAll, seeds).size(), 15u);
}

TEST(Simulator, SweepIndependentOfThreads) {
  const std::vector<double> lams{0.1, 0.3};
  const std::vector<std::uint64_t> seeds{1, 2};
  const auto one = sim::sweep(small(), SweepAxis::kLambda, lams, kAll, seeds, 1);
  const auto many = sim::sweep(small(), SweepAxis::kLambda, lams, kAll, seeds, 8);
  EXPECT_EQ(report::sweep_csv(one), report::sweep_csv(many));
}

TEST(Simulator, SweepCellMatchesSingleRun) {
  const std::vector<double> caps{4e9};
  const std::vector<Strategy> ddps{Strategy::kDdps};
  const std::vector<std::uint64_t> seeds{3};
  const auto rows = sim::sweep(small(), SweepAxis::kCapacity, caps, ddps, seeds);
  Scenario s = small();
  s.capacity = 4e9;
  s.seed = 3;
  EXPECT_EQ(rows[0].mean.avg_latency, sim::run(s).metrics.avg_latency);
}

TEST(Simulator, InvalidScenarioIsConfigError) {
  Scenario s = paper_defaults();
  s.slots = -1;
  EXPECT_THROW((void)sim::run(s), ConfigError);
}

TEST(Simulator, DdpsRedistributes) {
  Scenario s = small();
  int fired = 0;
  sim::RunOptions o;
  o.on_slot = [&](const sched::SlotOutcome& out) { fired += out.redistributed; };
  (void)sim::run(s, o);
  EXPECT_GT(fired, 0);
  s.strategy = Strategy::kLinear;
  fired = 0;
  (void)sim::run(s, o);
  EXPECT_EQ(fired, 0);
}

TEST(Simulator, TraceEvents) {
  Scenario s = small();
  sim::RunOptions o;
  o.trace = true;
  const auto r = sim::run(s, o);
  ASSERT_FALSE(r.events.empty());
  std::int64_t prev = 0;
  for (const auto& e : r.events) {
    EXPECT_GE(e.slot, prev);
    prev = e.slot;
  }
}
