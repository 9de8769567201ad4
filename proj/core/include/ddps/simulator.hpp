#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ddps/scenario.hpp"
#include "ddps/scheduler.hpp"

namespace ddps::sim {

struct MetricsRecord {
  double avg_latency = 0.0;    // s, over every generated task
  double server_utility = 0.0;
  double ros = 0.0;
  std::int64_t tasks = 0;
  std::int64_t local_count = 0;
  std::int64_t offered_count = 0;
  std::int64_t served_count = 0;
  std::int64_t drop_count = 0;         // device drops + server drops
  std::int64_t device_drop_count = 0;
  std::int64_t server_drop_count = 0;
  std::int64_t deferred_count = 0;     // defer events
  std::int64_t unserved_count = 0;     // still deferred when the run ends
  std::int64_t on_time_count = 0;
  double mean_payment = 0.0;           // over served tasks
  double capacity_utilization = 0.0;   // granted / (F_total * slots)
  double revenue = 0.0;
  double penalty = 0.0;
  double mean_local_latency = 0.0;     // s, over local tasks
  double mean_served_latency = 0.0;    // s, over served tasks
  double mean_wait_estimate = 0.0;     // planning t_w, averaged over offers
  double mean_queue_wait = 0.0;        // measured class-2 wait of served tasks, s
  double granted_capacity = 0.0;       // sum over slots of final grants
  double idle_capacity = 0.0;          // sum over slots of unused capacity
};

struct SlotRecord {
  std::int64_t slot = 0;
  int arrivals = 0;
  int local = 0;
  int offered = 0;
  int served = 0;
  int deferred = 0;
  int dropped = 0;
  bool redistributed = false;
  double wait_estimate = 0.0;
  double granted = 0.0;
  double idle = 0.0;
  double revenue = 0.0;
  double penalty = 0.0;
  double utility = 0.0;
};

struct TraceEvent {
  std::int64_t slot = 0;
  int user_id = 0;
  std::int64_t task_id = 0;
  std::string event;
  double cpu = 0.0;
  double bits = 0.0;
  double payment = 0.0;
  std::string reason;
};

struct RunOptions {
  bool trace = false;
  bool per_slot = false;
  // Server-side behaviour; redistribution is further limited to strategies
  // that use it.
  sched::SchedulerOptions scheduler;
  std::function<void(const sched::SlotOutcome&)> on_slot;
};

struct RunResult {
  Scenario scenario;
  MetricsRecord metrics;
  std::vector<double> slot_utilities;
  std::vector<SlotRecord> per_slot;
  std::vector<TraceEvent> events;
};

struct UserProfile {
  int id = 0;
  energy::EnergyParams device;  // local_cpu and link rates filled in
};

// Users are drawn from the scenario seed alone, so every strategy and every
// capacity in a sweep faces the same population and the same arrivals.
[[nodiscard]] std::vector<UserProfile> make_users(const Scenario& s);
[[nodiscard]] std::vector<offload::TaskRequest> arrivals_for_slot(
    const Scenario& s, std::span<const UserProfile> users, std::int64_t slot);

// Throws ConfigError for an invalid scenario and ContractViolation (naming
// slot and user) when a module contract breaks mid-run.
[[nodiscard]] RunResult run(const Scenario& s, const RunOptions& options = {});

[[nodiscard]] double ratio_of_service(const RunResult& r);

// Per-task latency and on-time flag, in one place.
enum class TaskFate { kLocal, kServed, kDeviceDrop, kServerDrop, kUnserved };
struct TaskLatency {
  double latency = 0.0;
  bool on_time = false;
};
[[nodiscard]] TaskLatency task_latency(TaskFate fate, double deadline, double actual);

struct SweepRow {
  SweepAxis axis = SweepAxis::kCapacity;
  double value = 0.0;
  pricing::Strategy strategy = pricing::Strategy::kDdps;
  std::size_t seeds = 0;
  MetricsRecord mean;  // field-wise mean over seeds
};

// Rows come out value-major, strategy-minor. Each cell averages its runs
// over `seeds`; threads = 0 picks the hardware concurrency.
[[nodiscard]] std::vector<SweepRow> sweep(const Scenario& base, SweepAxis axis,
                                          std::span<const double> values,
                                          std::span<const pricing::Strategy> strategies,
                                          std::span<const std::uint64_t> seeds,
                                          unsigned threads = 0, const RunOptions& options = {});

[[nodiscard]] Scenario with_axis(const Scenario& base, SweepAxis axis, double value);

[[nodiscard]] MetricsRecord mean_of(std::span<const MetricsRecord> runs);

}  // namespace ddps::sim
