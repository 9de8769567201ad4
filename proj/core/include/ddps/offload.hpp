#pragma once

#include <cstdint>
#include <string_view>

#include "ddps/energy.hpp"

// Per-task offloading decision for an energy-harvesting user: run locally,
// offload part of the data with a deadline-derived capacity request, or drop.
namespace ddps::offload {

struct TaskRequest {
  std::int64_t task_id = 0;
  int user_id = 0;
  double data_bits = 0.0;   // l
  double deadline = 0.0;    // t_req, s
  double local_cpu = 0.0;   // F_loc, cycles/s
  std::int64_t arrival_slot = 0;
};

void validate(const TaskRequest& task);

enum class DecisionKind { kLocalOnly, kPartial, kDrop };

// Which arm of the decision produced the result.
enum class Branch { kLocal, kPartialBalanced, kPartialMinimal, kDrop };

enum class DropReason { kNone, kEnergyInfeasible, kDeadlineInfeasible, kOversize };

[[nodiscard]] std::string_view name(DecisionKind k);
[[nodiscard]] std::string_view name(Branch b);
[[nodiscard]] std::string_view name(DropReason r);

struct OffloadDecision {
  DecisionKind kind = DecisionKind::kDrop;
  Branch branch = Branch::kDrop;
  DropReason reason = DropReason::kNone;
  double offload_bits = 0.0;      // q
  double required_cpu = 0.0;      // F_req, least capacity meeting the deadline
  double expected_latency = 0.0;  // t_e as reported by the decision arm
  double energy = 0.0;            // E_tot of the plan
};

// Least server capacity that makes the offload path finish exactly at the
// deadline: h q / (t_req - t_w - q/R_u - q r/R_d). Throws
// DeadlineInfeasibleError when no time is left for processing.
[[nodiscard]] double required_capacity(double offload_bits, double deadline, double wait,
                                       const energy::EnergyParams& p);

// Offload path latency t_up + h q / F + t_down + t_w.
[[nodiscard]] double offload_latency(double offload_bits, double cpu, double wait,
                                     const energy::EnergyParams& p);

// Decides against a battery: spendable energy is stored + one slot of harvest.
[[nodiscard]] OffloadDecision decide(const TaskRequest& task, const energy::BatteryState& battery,
                                     const energy::EnergyParams& p, double wait);

// Decides against an explicit spendable energy budget (J).
[[nodiscard]] OffloadDecision decide_with_budget(const TaskRequest& task, double budget,
                                                 const energy::EnergyParams& p, double wait);

}  // namespace ddps::offload
