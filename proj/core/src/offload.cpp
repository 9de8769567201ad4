#include "ddps/offload.hpp"

#include <algorithm>
#include <cmath>

#include "ddps/errors.hpp"

namespace ddps::offload {
namespace {

OffloadDecision drop(DropReason reason) {
  OffloadDecision d;
  d.kind = DecisionKind::kDrop;
  d.branch = Branch::kDrop;
  d.reason = reason;
  return d;
}

OffloadDecision local_only(const TaskRequest& task, const energy::EnergyParams& p) {
  OffloadDecision d;
  d.kind = DecisionKind::kLocalOnly;
  d.branch = Branch::kLocal;
  d.expected_latency = energy::local_time(p, task.data_bits, 0.0);
  d.energy = energy::local_energy(p, task.data_bits, 0.0);
  return d;
}

// Earlier tasks of the same slot may already have used part of the harvest.
OffloadDecision affordable_local(const TaskRequest& task, const energy::EnergyParams& p,
                                 double budget) {
  auto d = local_only(task, p);
  if (d.energy > budget * (1.0 + 1e-12)) return drop(DropReason::kEnergyInfeasible);
  return d;
}

}  // namespace

std::string_view name(DecisionKind k) {
  switch (k) {
    case DecisionKind::kLocalOnly: return "local";
    case DecisionKind::kPartial: return "partial";
    case DecisionKind::kDrop: return "drop";
  }
  return "unknown";
}

std::string_view name(Branch b) {
  switch (b) {
    case Branch::kLocal: return "local";
    case Branch::kPartialBalanced: return "partial-balanced";
    case Branch::kPartialMinimal: return "partial-minimal";
    case Branch::kDrop: return "drop";
  }
  return "unknown";
}

std::string_view name(DropReason r) {
  switch (r) {
    case DropReason::kNone: return "";
    case DropReason::kEnergyInfeasible: return "energy-infeasible";
    case DropReason::kDeadlineInfeasible: return "deadline-infeasible";
    case DropReason::kOversize: return "oversize";
  }
  return "unknown";
}

void validate(const TaskRequest& task) {
  if (!(task.data_bits > 0.0)) throw DomainError("task: data size must be positive");
  if (!(task.deadline > 0.0)) throw DomainError("task: deadline must be positive");
  if (!(task.local_cpu > 0.0)) throw DomainError("task: local cpu must be positive");
}

double required_capacity(double offload_bits, double deadline, double wait,
                         const energy::EnergyParams& p) {
  if (!(offload_bits > 0.0)) throw DomainError("required capacity: offloaded bits must be positive");
  const auto tx = energy::transmission_times(p, offload_bits);
  const double slack = deadline - wait - tx.up - tx.down;
  if (!(slack > 0.0)) {
    throw DeadlineInfeasibleError("transmission and waiting exceed the deadline");
  }
  return p.cycles_per_bit * offload_bits / slack;
}

double offload_latency(double offload_bits, double cpu, double wait,
                       const energy::EnergyParams& p) {
  const auto tx = energy::transmission_times(p, offload_bits);
  return tx.up + p.cycles_per_bit * offload_bits / cpu + tx.down + wait;
}

OffloadDecision decide(const TaskRequest& task, const energy::BatteryState& battery,
                       const energy::EnergyParams& p, double wait) {
  energy::EnergyParams device = p;
  device.local_cpu = task.local_cpu;
  return decide_with_budget(task, battery.stored + energy::harvest_energy(device), device, wait);
}

OffloadDecision decide_with_budget(const TaskRequest& task, double budget,
                                   const energy::EnergyParams& p, double wait) {
  validate(task);
  energy::EnergyParams device = p;
  device.local_cpu = task.local_cpu;

  const double l = task.data_bits;
  const double l_c = energy::critical_data(device);
  const double l_m = energy::max_offload(device);

  // Local execution fits inside one slot of harvest.
  if (l < l_c) return affordable_local(task, device, budget);
  if (l > l_m) return drop(DropReason::kOversize);

  // Least offload that keeps the plan inside the energy budget, never below
  // the l - l_c floor. With no stored energy this is the harvest balance.
  const double floor_bits = std::max(0.0, l - l_c);
  const double budget_bits = energy::balance_point(device, l, budget);
  const bool balanced = budget_bits > floor_bits;
  double q = balanced ? std::min({budget_bits, l_m, l}) : floor_bits;

  // The local remainder has to finish by the deadline as well.
  const double deadline_bits = l - task.deadline * device.local_cpu / device.cycles_per_bit;
  if (deadline_bits > q) {
    if (deadline_bits > l_m) return drop(DropReason::kDeadlineInfeasible);
    q = deadline_bits;
  }
  if (q <= 0.0) return affordable_local(task, device, budget);

  OffloadDecision d;
  d.kind = DecisionKind::kPartial;
  d.branch = (balanced || q > floor_bits) ? Branch::kPartialBalanced : Branch::kPartialMinimal;
  d.offload_bits = q;
  d.energy = energy::total_energy(device, l, q);
  if (d.energy > budget * (1.0 + 1e-12)) return drop(DropReason::kEnergyInfeasible);

  try {
    d.required_cpu = required_capacity(q, task.deadline, wait, device);
  } catch (const DeadlineInfeasibleError&) {
    return drop(DropReason::kDeadlineInfeasible);
  }
  const double t_off = offload_latency(q, d.required_cpu, wait, device);
  const double t_loc = energy::local_time(device, l, q);
  d.expected_latency =
      d.branch == Branch::kPartialBalanced ? std::max(t_loc, t_off) : t_off;
  return d;
}

}  // namespace ddps::offload
