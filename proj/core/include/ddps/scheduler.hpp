#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddps/energy.hpp"
#include "ddps/offload.hpp"
#include "ddps/pricing.hpp"

// Single edge server with two FCFS classes. Each slot the deferred class is
// drained first, then fresh arrivals are admitted while capacity lasts; any
// surplus can be handed back to the served users in proportion to their
// offloaded bits before payments are settled.
namespace ddps::sched {

// A partial-offload task presented to the server.
struct Offer {
  offload::TaskRequest task;
  offload::OffloadDecision decision;
  energy::EnergyParams device;  // device.local_cpu == task.local_cpu
  double wait_estimate = 0.0;   // t_w used when planning
  double requested_cpu = 0.0;   // capacity asked for; >= decision.required_cpu
  double posted_price = 0.0;    // uniform price in force when the offer was made
};

// Latency of an offer if it holds `cpu` after waiting `waited` seconds.
[[nodiscard]] double planned_latency(const Offer& offer, double cpu, double waited = 0.0);

struct Grant {
  Offer offer;
  double cpu_initial = 0.0;
  double cpu = 0.0;
  double processing_time_initial = 0.0;
  double processing_time = 0.0;  // t_fact
  double payment_initial = 0.0;
  double payment = 0.0;
  double latency = 0.0;          // includes slots spent in the deferred class
  std::int64_t waited_slots = 0;
  bool from_deferred = false;
};

struct Pending {
  Offer offer;
  std::int64_t enqueued_slot = 0;
};

struct ServerState {
  double installed = 6e9;   // F_total
  double remaining = 6e9;   // F_t
  double epsilon = 1e7;     // admission cutoff
  double gamma = 0.5;       // penalty weight
  double slot_length = 1.0; // seconds
  std::int64_t slot = 0;
  std::deque<Pending> deferred;  // class 2
  std::vector<Grant> served;     // X_s for the current slot
};

[[nodiscard]] ServerState make_server(double installed, double epsilon, double gamma,
                                      double slot_length = 1.0);

enum class EventKind { kGrant, kDefer, kDrop, kRedistribute };
[[nodiscard]] std::string_view name(EventKind k);

struct Event {
  std::int64_t slot = 0;
  int user_id = 0;
  std::int64_t task_id = 0;
  EventKind kind = EventKind::kGrant;
  double cpu = 0.0;
  double bits = 0.0;
  double payment = 0.0;
  std::string reason;
};

struct Dropped {
  Offer offer;
  double priced_payment = 0.0;  // priced at the deadline-derived capacity
  std::string reason;
};

struct SlotOutcome {
  std::int64_t slot = 0;
  std::vector<Grant> served;
  std::vector<Offer> deferred;
  std::vector<Dropped> dropped;
  std::vector<Event> events;
  // Remaining capacity after every grant, in grant order (capacity audit).
  std::vector<double> remaining_after_grant;
  bool redistributed = false;
  double surplus = 0.0;         // capacity handed out by redistribution
  double idle_capacity = 0.0;   // capacity left unused at slot end
  double revenue = 0.0;
  double penalty = 0.0;
  double server_utility = 0.0;
};

using Pricer = std::function<pricing::Quote(const Offer&, double cpu)>;

// kAdmission is the two-class FCFS admission loop. kEqualShare admits every
// arrival at once and splits the installed capacity evenly among them, with
// no deferral and no drops; late tasks simply finish late.
enum class Discipline { kAdmission, kEqualShare };

struct SchedulerOptions {
  Discipline discipline = Discipline::kAdmission;
  bool redistribute = true;
  // Fraction of the surplus handed out; anything but 1 breaks full
  // utilization and exists for fault-injection checks.
  double surplus_fraction = 1.0;
};

// Runs one slot. Arrivals must be partial-offload decisions; anything else is
// a ContractViolation.
[[nodiscard]] SlotOutcome run_slot(ServerState& state, std::span<const Offer> arrivals,
                                   const Pricer& pricer, const SchedulerOptions& options = {});

// Adds F_t * q_i / sum(q) to every served user and zeroes F_t. No-op when
// nothing was served or nothing is left.
void redistribute_surplus(ServerState& state, double fraction = 1.0);

// gamma * sum(payments); gamma must lie in (0,1).
[[nodiscard]] double penalty(std::span<const double> dropped_payments, double gamma);
// sum(payments) - penalty.
[[nodiscard]] double server_utility(std::span<const double> payments, double penalty);

}  // namespace ddps::sched
