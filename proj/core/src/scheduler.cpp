#include "ddps/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddps/errors.hpp"

namespace ddps::sched {
namespace {

constexpr double kTimeTolerance = 1e-9;

Grant make_grant(const Offer& offer, double cpu, std::int64_t waited_slots, double slot_length,
                 bool from_deferred) {
  Grant g;
  g.offer = offer;
  g.cpu_initial = g.cpu = cpu;
  g.processing_time_initial = g.processing_time =
      pricing::processing_time(offer.device.cycles_per_bit, offer.decision.offload_bits, cpu);
  g.waited_slots = waited_slots;
  g.from_deferred = from_deferred;
  g.latency = planned_latency(offer, cpu, static_cast<double>(waited_slots) * slot_length);
  return g;
}

bool can_wait_another_slot(const Offer& offer, std::int64_t waited_slots, double slot_length) {
  const double waited = static_cast<double>(waited_slots + 1) * slot_length;
  return planned_latency(offer, offer.requested_cpu, waited) <= offer.task.deadline + kTimeTolerance;
}

}  // namespace

double planned_latency(const Offer& offer, double cpu, double waited) {
  const auto& d = offer.decision;
  const double t_off = offload::offload_latency(d.offload_bits, cpu, offer.wait_estimate, offer.device);
  const double t_loc = energy::local_time(offer.device, offer.task.data_bits, d.offload_bits);
  return waited + std::max(t_loc, t_off);
}

ServerState make_server(double installed, double epsilon, double gamma, double slot_length) {
  if (!(installed >= 0.0)) throw DomainError("server: capacity must be non-negative");
  if (!(epsilon >= 0.0)) throw DomainError("server: epsilon must be non-negative");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("server: gamma must lie in (0,1)");
  if (!(slot_length > 0.0)) throw DomainError("server: slot length must be positive");
  ServerState s;
  s.installed = s.remaining = installed;
  s.epsilon = epsilon;
  s.gamma = gamma;
  s.slot_length = slot_length;
  return s;
}

std::string_view name(EventKind k) {
  switch (k) {
    case EventKind::kGrant: return "grant";
    case EventKind::kDefer: return "defer";
    case EventKind::kDrop: return "drop";
    case EventKind::kRedistribute: return "redistribute";
  }
  return "unknown";
}

double penalty(std::span<const double> dropped_payments, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("penalty: gamma must lie in (0,1)");
  return gamma * std::accumulate(dropped_payments.begin(), dropped_payments.end(), 0.0);
}

double server_utility(std::span<const double> payments, double penalty) {
  return std::accumulate(payments.begin(), payments.end(), 0.0) - penalty;
}

void redistribute_surplus(ServerState& state, double fraction) {
  if (state.served.empty() || !(state.remaining > 0.0)) return;
  double total_bits = 0.0;
  for (const auto& g : state.served) total_bits += g.offer.decision.offload_bits;
  if (!(total_bits > 0.0)) return;

  const double handed_out = state.remaining * fraction;
  for (auto& g : state.served) {
    g.cpu += handed_out * (g.offer.decision.offload_bits / total_bits);
    g.processing_time =
        pricing::processing_time(g.offer.device.cycles_per_bit, g.offer.decision.offload_bits, g.cpu);
    g.latency = planned_latency(g.offer, g.cpu,
                                static_cast<double>(g.waited_slots) * state.slot_length);
  }
  state.remaining = fraction == 1.0 ? 0.0 : state.remaining - handed_out;
}

SlotOutcome run_slot(ServerState& state, std::span<const Offer> arrivals, const Pricer& pricer,
                     const SchedulerOptions& options) {
  for (const auto& offer : arrivals) {
    if (offer.decision.kind != offload::DecisionKind::kPartial) {
      throw ContractViolation("server: task " + std::to_string(offer.task.task_id) +
                              " is not a partial-offload decision");
    }
    if (!(offer.requested_cpu > 0.0)) {
      throw ContractViolation("server: task " + std::to_string(offer.task.task_id) +
                              " requests no capacity");
    }
  }

  SlotOutcome out;
  out.slot = state.slot;
  state.remaining = state.installed;
  state.served.clear();

  // Events are recorded in order; payments are filled in at settlement.
  struct PendingEvent {
    EventKind kind;
    const Offer* offer;
    std::size_t grant_index;
    std::string reason;
  };
  std::vector<PendingEvent> log;
  std::vector<Offer> dropped_offers;
  std::vector<std::string> drop_reasons;

  auto grant = [&](const Offer& offer, double cpu, std::int64_t waited, bool from_deferred) {
    state.remaining -= cpu;
    state.served.push_back(make_grant(offer, cpu, waited, state.slot_length, from_deferred));
    out.remaining_after_grant.push_back(state.remaining);
  };
  auto drop = [&](const Offer& offer, std::string reason) {
    dropped_offers.push_back(offer);
    drop_reasons.push_back(std::move(reason));
  };

  // Class 2 first, in FCFS order. Expired tasks leave the queue here, once.
  std::deque<Pending> still_waiting;
  bool blocked = false;
  for (auto& p : state.deferred) {
    const std::int64_t waited = state.slot - p.enqueued_slot;
    const double waited_s = static_cast<double>(waited) * state.slot_length;
    if (planned_latency(p.offer, p.offer.requested_cpu, waited_s) >
        p.offer.task.deadline + kTimeTolerance) {
      drop(p.offer, "expired");
      continue;
    }
    if (!blocked && state.remaining > state.epsilon && state.remaining >= p.offer.requested_cpu) {
      grant(p.offer, p.offer.requested_cpu, waited, true);
      continue;
    }
    blocked = true;
    still_waiting.push_back(std::move(p));
  }
  state.deferred = std::move(still_waiting);

  if (options.discipline == Discipline::kEqualShare && !arrivals.empty()) {
    const double share = state.installed / static_cast<double>(arrivals.size());
    for (const auto& offer : arrivals) grant(offer, share, 0, false);
    state.remaining = 0.0;
    arrivals = {};
  }

  // Class 1: fresh arrivals.
  for (const auto& offer : arrivals) {
    if (state.remaining > state.epsilon && state.remaining > offer.requested_cpu) {
      grant(offer, offer.requested_cpu, 0, false);
    } else if (can_wait_another_slot(offer, 0, state.slot_length)) {
      state.deferred.push_back({offer, state.slot});
      out.deferred.push_back(offer);
    } else {
      drop(offer, state.remaining > state.epsilon ? "capacity" : "saturated");
    }
  }

  // Surplus goes back to the served users once no admissible task is left.
  const double before = state.remaining;
  if (options.redistribute && !state.served.empty() && state.remaining > 0.0) {
    redistribute_surplus(state, options.surplus_fraction);
    out.redistributed = true;
    out.surplus = before - state.remaining;
  }
  out.idle_capacity = state.remaining;

  // Settlement: each served user pays once, at its final capacity.
  std::vector<double> payments;
  for (auto& g : state.served) {
    g.payment_initial = pricer(g.offer, g.cpu_initial).payment;
    g.payment = out.redistributed ? pricer(g.offer, g.cpu).payment : g.payment_initial;
    payments.push_back(g.payment);
  }
  std::vector<double> dropped_payments;
  for (std::size_t i = 0; i < dropped_offers.size(); ++i) {
    const Offer& o = dropped_offers[i];
    const double cpu = std::min(o.decision.required_cpu, state.installed);
    const double priced = cpu > 0.0 ? pricer(o, cpu).payment : 0.0;
    dropped_payments.push_back(priced);
    out.dropped.push_back({o, priced, drop_reasons[i]});
  }
  out.revenue = std::accumulate(payments.begin(), payments.end(), 0.0);
  out.penalty = penalty(dropped_payments, state.gamma);
  out.server_utility = server_utility(payments, out.penalty);

  for (const auto& g : state.served) {
    out.events.push_back({out.slot, g.offer.task.user_id, g.offer.task.task_id, EventKind::kGrant,
                          g.cpu_initial, g.offer.decision.offload_bits, g.payment_initial,
                          g.from_deferred ? "deferred" : ""});
  }
  for (const auto& o : out.deferred) {
    out.events.push_back({out.slot, o.task.user_id, o.task.task_id, EventKind::kDefer,
                          o.requested_cpu, o.decision.offload_bits, 0.0, "capacity"});
  }
  for (const auto& d : out.dropped) {
    out.events.push_back({out.slot, d.offer.task.user_id, d.offer.task.task_id, EventKind::kDrop,
                          std::min(d.offer.decision.required_cpu, state.installed),
                          d.offer.decision.offload_bits, d.priced_payment, d.reason});
  }
  if (out.redistributed) {
    for (const auto& g : state.served) {
      out.events.push_back({out.slot, g.offer.task.user_id, g.offer.task.task_id,
                            EventKind::kRedistribute, g.cpu, g.offer.decision.offload_bits,
                            g.payment, ""});
    }
  }

  out.served = state.served;
  ++state.slot;
  return out;
}

}  // namespace ddps::sched
