#include <gtest/gtest.h>

#include <vector>

#include "ddps/errors.hpp"
#include "ddps/offload.hpp"
#include "ddps/pricing.hpp"
#include "ddps/scheduler.hpp"

using namespace ddps;
using namespace ddps::sched;

namespace {

// Fast link, so the deadline is almost all processing time.
Offer offer(std::int64_t id, double need, double deadline, double bits = 1e6) {
  Offer o;
  o.device.cycles_per_bit = 100.0;
  o.device.uplink_rate = o.device.downlink_rate = 1e12;
  o.device.local_cpu = 1e9;
  o.task.task_id = id;
  o.task.user_id = static_cast<int>(id);
  o.task.local_cpu = 1e9;
  o.task.data_bits = bits;
  o.task.deadline = deadline;
  o.decision.kind = offload::DecisionKind::kPartial;
  o.decision.branch = offload::Branch::kPartialBalanced;
  o.decision.offload_bits = bits;
  o.decision.required_cpu = need;
  o.requested_cpu = need;
  return o;
}

const Pricer kDdps = [](const Offer& o, double cpu) {
  return pricing::ddps_payment(o.device.cycles_per_bit, o.decision.offload_bits, cpu, 6e9, 1.0);
};

SchedulerOptions no_redistribution() {
  SchedulerOptions s;
  s.redistribute = false;
  return s;
}

}  // namespace

TEST(Scheduler, ThreeGrantsFit) {
  auto st = make_server(6e9, 1e7, 0.5);
  const std::vector<Offer> in{offer(1, 1e9, 0.5), offer(2, 2e9, 0.5), offer(3, 2e9, 0.5)};
  const auto out = run_slot(st, in, kDdps, no_redistribution());
  EXPECT_EQ(out.served.size(), 3u);
  EXPECT_DOUBLE_EQ(st.remaining, 1e9);
  EXPECT_DOUBLE_EQ(out.idle_capacity, 1e9);
  ASSERT_EQ(out.remaining_after_grant.size(), 3u);
  EXPECT_DOUBLE_EQ(out.remaining_after_grant[0], 5e9);
  EXPECT_DOUBLE_EQ(out.remaining_after_grant[2], 1e9);
}

TEST(Scheduler, DeferredTaskIsServedFirstNextSlot) {
  auto st = make_server(6e9, 1e7, 0.5, 0.1);
  std::vector<Offer> in{offer(1, 5e9, 1.0), offer(2, 2e9, 1.0)};
  auto out = run_slot(st, in, kDdps, no_redistribution());
  ASSERT_EQ(out.served.size(), 1u);
  ASSERT_EQ(out.deferred.size(), 1u);
  EXPECT_EQ(out.deferred[0].task.task_id, 2);
  in = {offer(3, 5e9, 1.0)};
  out = run_slot(st, in, kDdps, no_redistribution());
  ASSERT_GE(out.served.size(), 1u);
  EXPECT_EQ(out.served[0].offer.task.task_id, 2);
  EXPECT_TRUE(out.served[0].from_deferred);
  EXPECT_EQ(out.served[0].waited_slots, 1);
}

TEST(Scheduler, DropWhenNoSlack) {
  auto st = make_server(6e9, 1e7, 0.5, 1.0);
  const std::vector<Offer> in{offer(1, 5e9, 0.5), offer(2, 2e9, 0.5)};
  const auto out = run_slot(st, in, kDdps, no_redistribution());
  ASSERT_EQ(out.dropped.size(), 1u);
  EXPECT_EQ(out.dropped[0].offer.task.task_id, 2);
  EXPECT_GT(out.penalty, 0.0);
  EXPECT_DOUBLE_EQ(out.penalty, 0.5 * out.dropped[0].priced_payment);
}

TEST(Scheduler, RedistributionExample) {
  // Surplus 1e9 split 2:3:5.
  auto st = make_server(6e9, 1e7, 0.5);
  const std::vector<Offer> in{offer(1, 1e9, 0.5, 2e6), offer(2, 2e9, 0.5, 3e6),
                              offer(3, 2e9, 0.5, 5e6)};
  const auto out = run_slot(st, in, kDdps);
  ASSERT_TRUE(out.redistributed);
  EXPECT_NEAR(out.served[0].cpu - out.served[0].cpu_initial, 2e8, 1e-3);
  EXPECT_NEAR(out.served[1].cpu - out.served[1].cpu_initial, 3e8, 1e-3);
  EXPECT_NEAR(out.served[2].cpu - out.served[2].cpu_initial, 5e8, 1e-3);
  double total = 0.0;
  for (const auto& g : out.served) {
    total += g.cpu;
    EXPECT_GT(g.payment, g.payment_initial);
    EXPECT_LT(g.processing_time, g.processing_time_initial);
  }
  EXPECT_NEAR(total, 6e9, 6e9 * 1e-12);
  EXPECT_EQ(out.idle_capacity, 0.0);
}

TEST(Scheduler, PartialRedistributionBreaksExactness) {
  auto st = make_server(6e9, 1e7, 0.5);
  const std::vector<Offer> in{offer(1, 1e9, 0.5)};
  SchedulerOptions half;
  half.surplus_fraction = 0.5;
  const auto out = run_slot(st, in, kDdps, half);
  EXPECT_NEAR(out.served[0].cpu, 3.5e9, 1.0);
  EXPECT_NEAR(out.idle_capacity, 2.5e9, 1.0);
}

TEST(Scheduler, EqualShare) {
  auto st = make_server(6e9, 1e7, 0.5);
  const std::vector<Offer> in{offer(1, 1e9, 0.5), offer(2, 5e9, 0.5), offer(3, 5e9, 0.5)};
  SchedulerOptions eq;
  eq.discipline = Discipline::kEqualShare;
  eq.redistribute = false;
  const auto out = run_slot(st, in, kDdps, eq);
  ASSERT_EQ(out.served.size(), 3u);
  for (const auto& g : out.served) EXPECT_DOUBLE_EQ(g.cpu, 2e9);
  EXPECT_TRUE(out.dropped.empty());
  EXPECT_TRUE(out.deferred.empty());
}

TEST(Scheduler, Penalty) {
  const std::vector<double> drops{1.0, 0.5};
  EXPECT_DOUBLE_EQ(penalty(drops, 0.5), 0.75);
  EXPECT_THROW((void)penalty(drops, 1.0), DomainError);
  const std::vector<double> pay{4.0, 6.0};
  EXPECT_DOUBLE_EQ(server_utility(pay, 0.75), 9.25);
}

TEST(Scheduler, ContractChecks) {
  auto st = make_server(6e9, 1e7, 0.5);
  auto bad = offer(1, 1e9, 0.5);
  bad.decision.kind = offload::DecisionKind::kLocalOnly;
  EXPECT_THROW((void)run_slot(st, std::vector<Offer>{bad}, kDdps), ContractViolation);
  EXPECT_THROW((void)make_server(-1.0, 1e7, 0.5), DomainError);
  EXPECT_THROW((void)make_server(6e9, 1e7, 0.0), DomainError);
}

TEST(Scheduler, ExpiredClassTwoTaskDroppedOnce) {
  // One 4e9 task leaves class 2 per slot; the fourth runs out of time.
  auto st = make_server(6e9, 1e7, 0.5, 0.1);
  std::vector<Offer> in{offer(1, 5.9e9, 0.35)};
  for (int id = 2; id <= 5; ++id) in.push_back(offer(id, 4e9, 0.35));
  auto out = run_slot(st, in, kDdps, no_redistribution());
  ASSERT_EQ(out.deferred.size(), 4u);
  int drops = 0;
  std::vector<std::int64_t> order;
  for (int slot = 1; slot <= 6; ++slot) {
    out = run_slot(st, std::vector<Offer>{}, kDdps, no_redistribution());
    for (const auto& g : out.served) order.push_back(g.offer.task.task_id);
    for (const auto& d : out.dropped) {
      EXPECT_EQ(d.offer.task.task_id, 5);
      EXPECT_EQ(d.reason, "expired");
      ++drops;
    }
  }
  EXPECT_EQ(order, (std::vector<std::int64_t>{2, 3, 4}));
  EXPECT_EQ(drops, 1);
  EXPECT_TRUE(st.deferred.empty());
}
