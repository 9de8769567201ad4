#include "ddps/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>
#include <tuple>

#include "ddps/errors.hpp"
#include "ddps/queue.hpp"

namespace ddps::sim {
namespace {

constexpr double kDeadlineTolerance = 1e-9;
constexpr std::uint64_t kTasksPerSlot = 1u << 16;

// Stream layout: one block of streams per user.
enum Stream : std::uint64_t { kProfile = 0, kCount = 1, kSize = 2, kDeadline = 3, kOrder = 4 };

std::uint64_t stream(int user, Stream s) { return (static_cast<std::uint64_t>(user) + 1) << 8 | s; }

struct Arrival {
  offload::TaskRequest task;
  double key = 0.0;
};

struct Decided {
  offload::TaskRequest task;
  offload::OffloadDecision decision;
  double budget = 0.0;  // user's spendable energy before this task
};

offload::OffloadDecision as_local(const offload::TaskRequest& task, const energy::EnergyParams& d) {
  offload::OffloadDecision out;
  out.kind = offload::DecisionKind::kLocalOnly;
  out.branch = offload::Branch::kLocal;
  out.expected_latency = energy::local_time(d, task.data_bits, 0.0);
  out.energy = energy::local_energy(d, task.data_bits, 0.0);
  return out;
}

offload::OffloadDecision as_drop(offload::DropReason reason) {
  offload::OffloadDecision out;
  out.kind = offload::DecisionKind::kDrop;
  out.branch = offload::Branch::kDrop;
  out.reason = reason;
  return out;
}

[[noreturn]] void violation(std::int64_t slot, int user, const std::string& what) {
  throw ContractViolation("slot " + std::to_string(slot) + ", user " + std::to_string(user) +
                          ": " + what);
}

class Tally {
 public:
  void add(TaskFate fate, double deadline, double actual) {
    const auto t = task_latency(fate, deadline, actual);
    latency_sum_ += t.latency;
    if (t.on_time) ++on_time_;
    ++tasks_;
  }
  [[nodiscard]] std::int64_t tasks() const { return tasks_; }
  [[nodiscard]] std::int64_t on_time() const { return on_time_; }
  [[nodiscard]] double latency_sum() const { return latency_sum_; }

 private:
  double latency_sum_ = 0.0;
  std::int64_t on_time_ = 0;
  std::int64_t tasks_ = 0;
};

}  // namespace

TaskLatency task_latency(TaskFate fate, double deadline, double actual) {
  switch (fate) {
    case TaskFate::kLocal:
    case TaskFate::kServed:
      return {actual, actual <= deadline + kDeadlineTolerance};
    case TaskFate::kDeviceDrop:
    case TaskFate::kServerDrop:
    case TaskFate::kUnserved:
      return {deadline, false};
  }
  return {deadline, false};
}

std::vector<UserProfile> make_users(const Scenario& s) {
  const queue::CounterRng rng(s.seed);
  const auto& w = s.workload;
  const double mean_bits = 0.5 * (w.data_min_kb + w.data_max_kb) * w.bits_per_kb;
  std::vector<UserProfile> users;
  users.reserve(static_cast<std::size_t>(s.n_users));
  for (int i = 0; i < s.n_users; ++i) {
    UserProfile u;
    u.id = i;
    u.device = s.energy;
    const auto n = w.local_cpu_ghz.size();
    const auto pick = std::min<std::size_t>(
        n - 1, static_cast<std::size_t>(rng.uniform(stream(i, kProfile), 0) * static_cast<double>(n)));
    u.device.local_cpu = w.local_cpu_ghz[pick] * 1e9;
    const double delay =
        w.tx_delay_min_s + (w.tx_delay_max_s - w.tx_delay_min_s) * rng.uniform(stream(i, kProfile), 1);
    u.device.uplink_rate = u.device.downlink_rate = mean_bits / delay;
    users.push_back(u);
  }
  return users;
}

std::vector<offload::TaskRequest> arrivals_for_slot(const Scenario& s,
                                                    std::span<const UserProfile> users,
                                                    std::int64_t slot) {
  const queue::CounterRng rng(s.seed);
  const auto& w = s.workload;
  const auto t = static_cast<std::uint64_t>(slot);
  std::vector<Arrival> arrivals;
  for (const auto& u : users) {
    const int n = queue::poisson_inverse_cdf(s.lambda, rng.uniform(stream(u.id, kCount), t));
    if (static_cast<std::uint64_t>(n) >= kTasksPerSlot) violation(slot, u.id, "too many arrivals");
    for (int k = 0; k < n; ++k) {
      const std::uint64_t c = t * kTasksPerSlot + static_cast<std::uint64_t>(k);
      Arrival a;
      a.task.task_id = static_cast<std::int64_t>(c) * std::max(1, s.n_users) + u.id;
      a.task.user_id = u.id;
      a.task.arrival_slot = slot;
      a.task.local_cpu = u.device.local_cpu;
      const double kb = w.data_min_kb + (w.data_max_kb - w.data_min_kb) * rng.uniform(stream(u.id, kSize), c);
      a.task.data_bits = kb * w.bits_per_kb;
      const double jitter = 2.0 * rng.uniform(stream(u.id, kDeadline), c) - 1.0;
      a.task.deadline = w.deadline_s * (1.0 + w.deadline_jitter * jitter);
      a.key = rng.uniform(stream(u.id, kOrder), c);
      arrivals.push_back(a);
    }
  }
  std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& x, const Arrival& y) {
    return std::tie(x.key, x.task.task_id) < std::tie(y.key, y.task.task_id);
  });
  std::vector<offload::TaskRequest> out;
  out.reserve(arrivals.size());
  for (auto& a : arrivals) out.push_back(a.task);
  return out;
}

RunResult run(const Scenario& s, const RunOptions& options) {
  validate(s);
  RunResult result;
  result.scenario = s;
  auto& m = result.metrics;

  const auto strategy = s.strategy;
  const auto users = make_users(s);
  std::vector<energy::BatteryState> batteries(users.size(), energy::BatteryState{s.initial_charge, 0});
  auto server = sched::make_server(s.capacity, s.epsilon, s.gamma, s.slot_length);

  sched::SchedulerOptions sched_opts = options.scheduler;
  sched_opts.redistribute = sched_opts.redistribute && pricing::redistributes(strategy);
  if (pricing::shares_equally(strategy)) sched_opts.discipline = sched::Discipline::kEqualShare;

  const sched::Pricer pricer = [&](const sched::Offer& o, double cpu) {
    pricing::QuoteInputs in;
    in.cycles_per_bit = o.device.cycles_per_bit;
    in.bits = o.decision.offload_bits;
    in.cpu = cpu;
    in.capacity = s.price_capacity;
    in.local_cpu = o.device.local_cpu;
    in.uniform_price = o.posted_price;
    return pricing::quote(strategy, s.pricing, in);
  };

  Tally tally;
  double wait_estimate_sum = 0.0;
  double queue_wait_sum = 0.0;
  double local_latency_sum = 0.0;
  double served_latency_sum = 0.0;
  auto event = [&](std::int64_t slot, const offload::TaskRequest& t, std::string kind, double cpu,
                   double bits, double payment, std::string reason) {
    if (!options.trace) return;
    result.events.push_back({slot, t.user_id, t.task_id, std::move(kind), cpu, bits, payment,
                             std::move(reason)});
  };

  for (std::int64_t slot = 0; slot < s.slots; ++slot) {
    const auto tasks = arrivals_for_slot(s, users, slot);
    SlotRecord rec;
    rec.slot = slot;
    rec.arrivals = static_cast<int>(tasks.size());

    // Planning wait from the deadlines queued this slot.
    double t_w = 0.0;
    if (!tasks.empty()) {
      std::vector<double> deadlines;
      for (const auto& t : tasks) deadlines.push_back(t.deadline);
      const double mu = queue::service_rate(deadlines, s.max_concurrent);
      // The server queue sees the aggregate arrival rate of all users.
      const double offered_load = s.lambda * static_cast<double>(s.n_users);
      try {
        t_w = queue::mm1_wait(offered_load, mu);
      } catch (const InstabilityError&) {
        t_w = std::numeric_limits<double>::infinity();
      }
    }
    rec.wait_estimate = t_w;

    std::vector<double> spent(users.size(), 0.0);
    auto available = [&](int user) {
      return batteries[user].stored + energy::harvest_energy(users[user].device);
    };

    std::vector<Decided> decided;
    decided.reserve(tasks.size());
    for (const auto& t : tasks) {
      const auto& dev = users[t.user_id].device;
      const double budget = std::max(0.0, available(t.user_id) - spent[t.user_id]);
      auto d = offload::decide_with_budget(t, budget, dev, t_w);
      if (d.kind != offload::DecisionKind::kDrop) spent[t.user_id] += d.energy;
      decided.push_back({t, d, budget});
    }

    auto requested = [](const offload::OffloadDecision& d) { return d.required_cpu; };

    double posted_price = 0.0;
    if (strategy == pricing::Strategy::kUniform) {
      std::vector<pricing::UniformCandidate> candidates;
      std::vector<std::size_t> index;
      for (std::size_t i = 0; i < decided.size(); ++i) {
        const auto& x = decided[i];
        if (x.decision.kind != offload::DecisionKind::kPartial) continue;
        const auto& dev = users[x.task.user_id].device;
        candidates.push_back({dev.cycles_per_bit, x.decision.offload_bits, dev.local_cpu,
                              requested(x.decision)});
        index.push_back(i);
      }
      if (!candidates.empty()) {
        const auto outcome = pricing::uniform_payment(candidates, s.capacity, s.pricing.uniform_price_set);
        posted_price = outcome.price;
        for (std::size_t j = 0; j < index.size(); ++j) {
          if (outcome.offloads[j]) continue;
          // Priced out: fall back to local execution if the battery allows it.
          auto& x = decided[index[j]];
          const auto& dev = users[x.task.user_id].device;
          const auto local = as_local(x.task, dev);
          const int u = x.task.user_id;
          spent[u] = std::max(0.0, spent[u] - x.decision.energy);
          if (spent[u] + local.energy <= available(u) * (1.0 + 1e-12)) {
            x.decision = local;
            spent[u] += local.energy;
          } else {
            x.decision = as_drop(offload::DropReason::kEnergyInfeasible);
          }
        }
      }
    }

    std::vector<sched::Offer> offers;
    for (const auto& x : decided) {
      const auto& dev = users[x.task.user_id].device;
      switch (x.decision.kind) {
        case offload::DecisionKind::kLocalOnly:
          ++m.local_count;
          ++rec.local;
          tally.add(TaskFate::kLocal, x.task.deadline, x.decision.expected_latency);
          local_latency_sum += x.decision.expected_latency;
          event(slot, x.task, "local", 0.0, 0.0, 0.0, "");
          break;
        case offload::DecisionKind::kDrop:
          ++m.device_drop_count;
          ++rec.dropped;
          tally.add(TaskFate::kDeviceDrop, x.task.deadline, 0.0);
          event(slot, x.task, "drop", 0.0, 0.0, 0.0, std::string(offload::name(x.decision.reason)));
          break;
        case offload::DecisionKind::kPartial: {
          sched::Offer o;
          o.task = x.task;
          o.decision = x.decision;
          o.device = dev;
          o.wait_estimate = t_w;
          o.requested_cpu = requested(x.decision);
          o.posted_price = posted_price;
          offers.push_back(o);
          wait_estimate_sum += t_w;
          break;
        }
      }
    }
    m.offered_count += static_cast<std::int64_t>(offers.size());
    rec.offered = static_cast<int>(offers.size());

    sched::SlotOutcome out;
    try {
      out = sched::run_slot(server, offers, pricer, sched_opts);
    } catch (const ContractViolation& e) {
      violation(slot, offers.empty() ? -1 : offers.front().task.user_id, e.what());
    } catch (const std::runtime_error& e) {
      violation(slot, offers.empty() ? -1 : offers.front().task.user_id, e.what());
    }
    if (options.on_slot) options.on_slot(out);

    for (const auto& g : out.served) {
      ++m.served_count;
      tally.add(TaskFate::kServed, g.offer.task.deadline, g.latency);
      served_latency_sum += g.latency;
      queue_wait_sum += static_cast<double>(g.waited_slots) * s.slot_length;
      rec.granted += g.cpu;
    }
    for (const auto& d : out.dropped) {
      ++m.server_drop_count;
      tally.add(TaskFate::kServerDrop, d.offer.task.deadline, 0.0);
    }
    m.deferred_count += static_cast<std::int64_t>(out.deferred.size());
    for (const auto& e : out.events) {
      offload::TaskRequest t;
      t.user_id = e.user_id;
      t.task_id = e.task_id;
      event(e.slot, t, std::string(sched::name(e.kind)), e.cpu, e.bits, e.payment, e.reason);
    }

    rec.served = static_cast<int>(out.served.size());
    rec.deferred = static_cast<int>(out.deferred.size());
    rec.dropped += static_cast<int>(out.dropped.size());
    rec.redistributed = out.redistributed;
    rec.idle = out.idle_capacity;
    rec.revenue = out.revenue;
    rec.penalty = out.penalty;
    rec.utility = out.server_utility;

    m.revenue += out.revenue;
    m.penalty += out.penalty;
    m.server_utility += out.server_utility;
    m.granted_capacity += rec.granted;
    m.idle_capacity += rec.idle;
    result.slot_utilities.push_back(out.server_utility);

    for (std::size_t u = 0; u < users.size(); ++u) {
      try {
        batteries[u] = energy::update_battery(batteries[u], users[u].device, spent[u]);
      } catch (const InsufficientEnergyError& e) {
        violation(slot, static_cast<int>(u), e.what());
      }
    }
    if (options.per_slot) result.per_slot.push_back(rec);
  }

  for (const auto& p : server.deferred) {
    ++m.unserved_count;
    tally.add(TaskFate::kUnserved, p.offer.task.deadline, 0.0);
  }

  m.tasks = tally.tasks();
  m.on_time_count = tally.on_time();
  m.drop_count = m.device_drop_count + m.server_drop_count;
  if (m.tasks > 0) {
    m.avg_latency = tally.latency_sum() / static_cast<double>(m.tasks);
    m.ros = static_cast<double>(m.on_time_count) / static_cast<double>(m.tasks);
  }
  if (m.served_count > 0) {
    m.mean_payment = m.revenue / static_cast<double>(m.served_count);
    m.mean_queue_wait = queue_wait_sum / static_cast<double>(m.served_count);
    m.mean_served_latency = served_latency_sum / static_cast<double>(m.served_count);
  }
  if (m.local_count > 0) m.mean_local_latency = local_latency_sum / static_cast<double>(m.local_count);
  if (m.offered_count > 0) m.mean_wait_estimate = wait_estimate_sum / static_cast<double>(m.offered_count);
  if (s.slots > 0) {
    m.capacity_utilization = m.granted_capacity / (s.capacity * static_cast<double>(s.slots));
  }
  return result;
}

double ratio_of_service(const RunResult& r) { return r.metrics.ros; }

Scenario with_axis(const Scenario& base, SweepAxis axis, double value) {
  Scenario s = base;
  s.sweep.reset();
  if (axis == SweepAxis::kCapacity) {
    s.capacity = value;
  } else {
    s.lambda = value;
  }
  return s;
}

MetricsRecord mean_of(std::span<const MetricsRecord> runs) {
  MetricsRecord out;
  if (runs.empty()) return out;
  const double n = static_cast<double>(runs.size());
  auto avg = [&](auto field) {
    double sum = 0.0;
    for (const auto& r : runs) sum += static_cast<double>(r.*field);
    return sum / n;
  };
  auto avg_count = [&](auto field) {
    double v = avg(field);
    return static_cast<std::int64_t>(std::llround(v));
  };
  out.avg_latency = avg(&MetricsRecord::avg_latency);
  out.server_utility = avg(&MetricsRecord::server_utility);
  out.ros = avg(&MetricsRecord::ros);
  out.tasks = avg_count(&MetricsRecord::tasks);
  out.local_count = avg_count(&MetricsRecord::local_count);
  out.offered_count = avg_count(&MetricsRecord::offered_count);
  out.served_count = avg_count(&MetricsRecord::served_count);
  out.drop_count = avg_count(&MetricsRecord::drop_count);
  out.device_drop_count = avg_count(&MetricsRecord::device_drop_count);
  out.server_drop_count = avg_count(&MetricsRecord::server_drop_count);
  out.deferred_count = avg_count(&MetricsRecord::deferred_count);
  out.unserved_count = avg_count(&MetricsRecord::unserved_count);
  out.on_time_count = avg_count(&MetricsRecord::on_time_count);
  out.mean_payment = avg(&MetricsRecord::mean_payment);
  out.capacity_utilization = avg(&MetricsRecord::capacity_utilization);
  out.revenue = avg(&MetricsRecord::revenue);
  out.penalty = avg(&MetricsRecord::penalty);
  out.mean_local_latency = avg(&MetricsRecord::mean_local_latency);
  out.mean_served_latency = avg(&MetricsRecord::mean_served_latency);
  out.mean_wait_estimate = avg(&MetricsRecord::mean_wait_estimate);
  out.mean_queue_wait = avg(&MetricsRecord::mean_queue_wait);
  out.granted_capacity = avg(&MetricsRecord::granted_capacity);
  out.idle_capacity = avg(&MetricsRecord::idle_capacity);
  return out;
}

std::vector<SweepRow> sweep(const Scenario& base, SweepAxis axis, std::span<const double> values,
                            std::span<const pricing::Strategy> strategies,
                            std::span<const std::uint64_t> seeds, unsigned threads,
                            const RunOptions& options) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  if (strategies.empty()) throw ConfigError("sweep: no strategies given");
  if (seeds.empty()) throw ConfigError("sweep: no seeds given");

  struct Job {
    Scenario scenario;
    std::size_t cell;
  };
  std::vector<Job> jobs;
  for (double v : values) {
    for (auto st : strategies) {
      const std::size_t cell = jobs.size() / seeds.size();
      for (auto seed : seeds) {
        Scenario s = with_axis(base, axis, v);
        s.strategy = st;
        s.seed = seed;
        validate(s);
        jobs.push_back({std::move(s), cell});
      }
    }
  }

  RunOptions per_run = options;
  per_run.trace = false;
  per_run.per_slot = false;
  per_run.on_slot = nullptr;

  std::vector<MetricsRecord> metrics(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        metrics[i] = run(jobs[i].scenario, per_run).metrics;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < jobs.size(); i += seeds.size()) {
    SweepRow row;
    row.axis = axis;
    row.value = axis == SweepAxis::kCapacity ? jobs[i].scenario.capacity : jobs[i].scenario.lambda;
    row.strategy = jobs[i].scenario.strategy;
    row.seeds = seeds.size();
    row.mean = mean_of(std::span(metrics).subspan(i, seeds.size()));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ddps::sim
