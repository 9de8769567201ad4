#include "ddps/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "ddps/energy.hpp"
#include "ddps/errors.hpp"
#include "ddps/offload.hpp"
#include "ddps/pricing.hpp"
#include "ddps/queue.hpp"
#include "ddps/report.hpp"
#include "ddps/scenario.hpp"
#include "ddps/scheduler.hpp"
#include "ddps/simulator.hpp"

namespace ddps::verify {
namespace {

using Clock = std::chrono::steady_clock;
using pricing::Strategy;

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

CheckResult pass(std::string name, std::string detail) {
  return {std::move(name), true, std::move(detail)};
}
CheckResult fail(std::string name, std::string detail) {
  return {std::move(name), false, std::move(detail)};
}

// Checks that throw are failures, not crashes.
CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return fail(name, std::string("threw: ") + e.what());
  }
}

double log_offset_for(const Options& o) { return o.fault == Fault::kPricingOffset ? 0.5 : 1.0; }

double surplus_fraction_for(const Options& o) {
  return o.fault == Fault::kPartialRedistribution ? 0.5 : 1.0;
}

// Random device parameters spanning a few orders of magnitude around the
// simulation defaults.
energy::EnergyParams random_device(std::mt19937_64& rng) {
  auto logu = [&](double lo, double hi) {
    return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
  };
  energy::EnergyParams p;
  p.switched_capacitance = logu(1e-28, 1e-26);
  p.cycles_per_bit = logu(10.0, 2000.0);
  p.local_cpu = logu(1e8, 2e9);
  p.panel_area = logu(1e-4, 1e-2);
  p.irradiance = logu(100.0, 1000.0);
  p.efficiency = std::uniform_real_distribution<double>(0.05, 0.4)(rng);
  p.correction = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
  p.uplink_power = logu(0.01, 1.0);
  p.downlink_power = logu(0.1, 2.0);
  p.uplink_rate = logu(1e5, 1e8);
  p.downlink_rate = logu(1e5, 1e8);
  p.output_ratio = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
  p.battery_capacity = logu(0.1, 10.0);
  return p;
}

// The example device: l_c = 1.8e6, l_m = 6e6 bits.
energy::EnergyParams example_device() {
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

const std::vector<std::uint64_t>& trend_seeds() {
  static const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  return seeds;
}

struct Trends {
  std::vector<double> capacities{1e9, 2e9, 3e9, 4e9, 5e9, 6e9};
  std::vector<double> lambdas{0.1, 0.2, 0.3};
  std::map<Strategy, std::vector<sim::MetricsRecord>> by_capacity;
  std::map<Strategy, std::vector<sim::MetricsRecord>> by_lambda;
  double capacity_sweep_seconds = 0.0;
};

// Both paper-default sweeps, computed once per process.
const Trends& trends(unsigned threads) {
  static const Trends t = [threads] {
    Trends r;
    const Scenario base = paper_defaults();
    const std::vector<Strategy> all(pricing::kAllStrategies.begin(),
                                    pricing::kAllStrategies.end());
    const auto t0 = Clock::now();
    for (const auto& row :
         sim::sweep(base, SweepAxis::kCapacity, r.capacities, all, trend_seeds(), threads))
      r.by_capacity[row.strategy].push_back(row.mean);
    r.capacity_sweep_seconds = seconds_since(t0);
    Scenario at_max = base;
    at_max.capacity = 6e9;
    for (const auto& row :
         sim::sweep(at_max, SweepAxis::kLambda, r.lambdas, all, trend_seeds(), threads))
      r.by_lambda[row.strategy].push_back(row.mean);
    return r;
  }();
  return t;
}

std::string series(const std::vector<sim::MetricsRecord>& v, double sim::MetricsRecord::*f) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt("%.6g", v[i].*f);
  }
  return out + "]";
}

// ---- acceptance -----------------------------------------------------------

CheckResult c1_thresholds() {
  const std::string name = "criterion 1: closed-form thresholds satisfy their balance equations";
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  int balanced_checked = 0;
  for (int i = 0; i < 1000; ++i) {
    auto p = random_device(rng);
    if (rel_err(energy::local_energy_slope(p), energy::offload_energy_slope(p)) < 1e-6) continue;
    const double e_h = energy::harvest_energy(p);
    const double l_c = energy::critical_data(p);
    const double l_m = energy::max_offload(p);
    worst = std::max(worst, rel_err(energy::local_energy(p, l_c, 0.0), e_h));
    worst = std::max(worst, rel_err(energy::transmission_energy(p, l_m).total(), e_h));
    const double l = l_c * std::uniform_real_distribution<double>(1.0, 4.0)(rng);
    const double q = energy::balance_point(p, l);
    if (q > 0.0 && q <= l) {
      // E_h = E_loc + E_u + E_d at the balance point.
      worst = std::max(worst, rel_err(energy::total_energy(p, l, q), e_h));
      ++balanced_checked;
    }
  }
  const double secs = seconds_since(t0);
  const std::string detail = fmt("worst rel err %.3g over 1000 draws (%g balance points), %.3f s",
                                 worst, balanced_checked, secs);
  return (worst <= 1e-9 && balanced_checked > 0 && secs < 1.0) ? pass(name, detail)
                                                               : fail(name, detail);
}

CheckResult c2_lemma1(const Options& o) {
  const std::string name = "criterion 2: DDPS payment partials match finite differences";
  const auto t0 = Clock::now();
  const double d = log_offset_for(o);
  pricing::PricingParams params;
  params.log_offset = d;
  pricing::validate(params);
  const double h = 100.0, cap = 1e12;
  double worst = 0.0, min_partial = INFINITY;
  for (int i = 0; i < 100; ++i) {
    const double q = 1e3 * std::pow(1e4, i / 99.0);
    for (int j = 0; j < 100; ++j) {
      const double f = 1e6 * std::pow(6e3, j / 99.0);
      const double dq = q * 1e-4, df = f * 1e-4;
      const double fd_q = (pricing::ddps_payment(h, q + dq, f, cap, d).payment -
                           pricing::ddps_payment(h, q - dq, f, cap, d).payment) / (2 * dq);
      const double fd_f = (pricing::ddps_payment(h, q, f + df, cap, d).payment -
                           pricing::ddps_payment(h, q, f - df, cap, d).payment) / (2 * df);
      const double an_q = pricing::ddps_payment_dq(h, f, cap, d);
      const double an_f = pricing::ddps_payment_dcpu(h, q, f, cap, d);
      worst = std::max({worst, rel_err(fd_q, an_q), rel_err(fd_f, an_f)});
      min_partial = std::min({min_partial, an_q, an_f});
    }
  }
  // The offset keeps lg(F_i + d) non-negative down to F_i = 0.
  const double floor_value = std::log10(d);
  const double secs = seconds_since(t0);
  const std::string detail = fmt("worst rel err %.3g, min partial %.3g, %.3f s", worst,
                                 min_partial, secs);
  return (worst < 1e-6 && min_partial >= 0.0 && floor_value >= 0.0 && secs < 1.0)
             ? pass(name, detail)
             : fail(name, detail);
}

// Event-driven FCFS service of N identical jobs in batches of K, each job in
// a batch holding F/K.
double simulate_batches(int n, int k, double h, double l, double f) {
  double clock = 0.0, total = 0.0;
  int done = 0;
  while (done < n) {
    const int in_batch = std::min(k, n - done);
    clock += h * l / (f / in_batch);
    total += clock * in_batch;
    done += in_batch;
  }
  return total / n;
}

CheckResult c3_appendix_b() {
  const std::string name = "criterion 3: equal share is never faster than FCFS batches";
  int pairs = 0;
  double worst_sim = 0.0;
  for (int n = 1; n <= 64; ++n) {
    for (int k = 1; k <= n; ++k) {
      if (n % k) continue;
      ++pairs;
      const auto b = queue::batch_latencies(n, k, 1.0, 1.0, 1.0);
      const bool equal = rel_err(b.equal_share, b.fcfs_batches) < 1e-12;
      if (b.equal_share < b.fcfs_batches || equal != (n == k)) {
        return fail(name, "N=" + std::to_string(n) + " K=" + std::to_string(k) + " violates");
      }
      const auto real = queue::batch_latencies(n, k, 100.0, 8e5, 6e9);
      worst_sim = std::max(worst_sim,
                           rel_err(simulate_batches(n, k, 100.0, 8e5, 6e9), real.fcfs_batches));
    }
  }
  const std::string detail =
      std::to_string(pairs) + " (N,K) pairs" + fmt(", simulation rel err %.3g", worst_sim);
  return worst_sim <= 1e-9 ? pass(name, detail) : fail(name, detail);
}


CheckResult c4_redistribution(const Options& o) {
  const std::string name = "criterion 4: redistribution fills the server exactly";
  const Scenario base = paper_defaults();
  int fired = 0, affected = 0;
  double worst = 0.0;
  std::string first_bad;
  for (auto seed : trend_seeds()) {
    Scenario s = base;
    s.seed = seed;
    s.strategy = Strategy::kDdps;
    sim::RunOptions ro;
    ro.scheduler.surplus_fraction = surplus_fraction_for(o);
    ro.on_slot = [&](const sched::SlotOutcome& out) {
      if (!out.redistributed) return;
      ++fired;
      double total = 0.0;
      for (const auto& g : out.served) total += g.cpu;
      worst = std::max(worst, rel_err(total, s.capacity));
      for (const auto& g : out.served) {
        if (!(g.cpu > g.cpu_initial)) continue;
        ++affected;
        if (!(g.payment > g.payment_initial && g.processing_time < g.processing_time_initial) &&
            first_bad.empty()) {
          first_bad = "seed " + std::to_string(seed) + " slot " + std::to_string(out.slot) +
                      " task " + std::to_string(g.offer.task.task_id);
        }
      }
    };
    (void)sim::run(s, ro);
  }
  std::string detail = std::to_string(fired) + " redistributing slots, " +
                       std::to_string(affected) + " raised grants" +
                       fmt(", worst |sum F_i - F_total| rel %.3g", worst);
  if (!first_bad.empty()) detail += "; payment/t_fact not improved at " + first_bad;
  return (fired > 0 && worst <= 1e-6 && first_bad.empty()) ? pass(name, detail)
                                                           : fail(name, detail);
}

struct BranchCase {
  offload::TaskRequest task;
  double stored = 0.0;
  double wait = 0.0;
};

// Hand-built inputs, one per arm, on the example device.
std::vector<BranchCase> branch_battery() {
  auto task = [](double bits, double deadline) {
    offload::TaskRequest t;
    t.data_bits = bits;
    t.deadline = deadline;
    t.local_cpu = 1e9;
    return t;
  };
  return {
      {task(0.9e6, 3.0), 0.0, 0.0},  // local: l < l_c
      {task(3e6, 3.0), 0.0, 0.0},    // balanced: q = 1.714e6
      {task(3e6, 3.0), 2.0, 0.0},    // minimal: stored energy covers q = l - l_c
      {task(7e6, 3.0), 0.0, 0.0},    // drop: l > l_m
      {task(3e6, 1.2), 0.0, 0.5},    // drop: no time left after upload and wait
  };
}

struct DecisionAudit {
  bool feasible = true;
  bool honest = true;
  bool minimal = true;
  std::string problem;
};

DecisionAudit audit(const offload::OffloadDecision& d, const offload::TaskRequest& t,
                    const energy::EnergyParams& device, double stored, double wait) {
  DecisionAudit a;
  if (d.kind == offload::DecisionKind::kDrop) return a;
  try {
    (void)energy::update_battery({stored, 0}, device, d.energy);
  } catch (const InsufficientEnergyError& e) {
    a.feasible = false;
    a.problem = e.what();
  }
  if (d.kind != offload::DecisionKind::kPartial) return a;
  const double t_off = offload::offload_latency(d.offload_bits, d.required_cpu, wait, device);
  const double t_loc = energy::local_time(device, t.data_bits, d.offload_bits);
  if (std::max(t_off, t_loc) > t.deadline + 1e-9) {
    a.honest = false;
    a.problem = fmt("t_e %.6g > t_req %.6g", std::max(t_off, t_loc), t.deadline);
  }
  if (!(offload::offload_latency(d.offload_bits, 0.99 * d.required_cpu, wait, device) > t.deadline)) {
    a.minimal = false;
    a.problem = "1% less capacity still meets the deadline";
  }
  return a;
}

CheckResult c5_branches() {
  const std::string name = "criterion 5: offload decision covers all branches honestly";
  std::set<offload::Branch> seen;
  int checked = 0;
  auto run_case = [&](const offload::TaskRequest& t, const energy::EnergyParams& dev,
                      double stored, double wait) -> std::string {
    energy::EnergyParams p = dev;
    p.local_cpu = t.local_cpu;
    const auto d = offload::decide(t, {stored, 0}, p, wait);
    if (!(offload::decide(t, {stored, 0}, p, wait).offload_bits == d.offload_bits))
      return "decide is not deterministic";
    seen.insert(d.branch);
    ++checked;
    const auto a = audit(d, t, p, stored, wait);
    if (!(a.feasible && a.honest && a.minimal))
      return std::string(offload::name(d.branch)) + ": " + a.problem;
    return {};
  };
  const auto dev = example_device();
  for (const auto& c : branch_battery()) {
    if (auto err = run_case(c.task, dev, c.stored, c.wait); !err.empty()) return fail(name, err);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    auto p = random_device(rng);
    offload::TaskRequest t;
    t.local_cpu = p.local_cpu;
    t.data_bits = energy::critical_data(p) * (0.2 + 4.0 * u(rng));
    t.deadline = 0.05 + 3.0 * u(rng);
    const double stored = p.battery_capacity * u(rng);
    if (auto err = run_case(t, p, stored, 0.3 * u(rng)); !err.empty()) return fail(name, err);
  }
  std::string detail = std::to_string(checked) + " decisions, branches:";
  for (auto b : seen) detail += " " + std::string(offload::name(b));
  return seen.size() == 4 ? pass(name, detail) : fail(name, detail);
}

CheckResult c6_fig3(unsigned threads) {
  const std::string name = "criterion 6: latency falls as server capacity grows";
  const auto& t = trends(threads);
  for (const auto& [s, v] : t.by_capacity) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].avg_latency > v[i - 1].avg_latency) {
        return fail(name, std::string(pricing::name(s)) + " latency rises: " +
                              series(v, &sim::MetricsRecord::avg_latency));
      }
    }
  }
  const auto& d = t.by_capacity.at(Strategy::kDdps);
  const double margin = d.front().avg_latency - d.back().avg_latency;
  const std::string detail = "ddps " + series(d, &sim::MetricsRecord::avg_latency) +
                             fmt(", 1e9 to 6e9 drop %.4g s, sweep %.2f s", margin,
                                 t.capacity_sweep_seconds);
  return (margin > 0.0 && t.capacity_sweep_seconds < 30.0) ? pass(name, detail)
                                                           : fail(name, detail);
}

// DDPS utility is the strict maximum at every point of a sweep.
std::string ddps_utility_gap(const std::map<Strategy, std::vector<sim::MetricsRecord>>& by,
                             const std::vector<double>& values, double* min_gap) {
  const auto& d = by.at(Strategy::kDdps);
  for (const auto& [s, v] : by) {
    if (s == Strategy::kDdps) continue;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double gap = d[i].server_utility - v[i].server_utility;
      *min_gap = std::min(*min_gap, gap);
      if (!(gap > 0.0)) {
        return std::string(pricing::name(s)) + fmt(" reaches %.6g vs ddps %.6g at %g",
                                                   v[i].server_utility, d[i].server_utility,
                                                   values[i]);
      }
    }
  }
  return {};
}

CheckResult c7_fig46(unsigned threads) {
  const std::string name = "criterion 7: DDPS earns the highest server utility";
  const auto& t = trends(threads);
  double gap = INFINITY;
  if (auto e = ddps_utility_gap(t.by_capacity, t.capacities, &gap); !e.empty())
    return fail(name, "capacity sweep: " + e);
  if (auto e = ddps_utility_gap(t.by_lambda, t.lambdas, &gap); !e.empty())
    return fail(name, "lambda sweep: " + e);
  return pass(name, fmt("smallest lead %.4g over 9 grid points", gap));
}

double ros_range(const std::vector<sim::MetricsRecord>& v) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& m : v) {
    lo = std::min(lo, m.ros);
    hi = std::max(hi, m.ros);
  }
  return hi - lo;
}

CheckResult c8_fig7(unsigned threads) {
  const std::string name = "criterion 8: DDPS ratio of service is the most stable";
  const auto& t = trends(threads);
  for (const auto& [s, v] : t.by_lambda)
    for (const auto& m : v)
      if (m.ros < 0.0 || m.ros > 1.0)
        return fail(name, std::string(pricing::name(s)) + fmt(" RoS %.6g outside [0,1]", m.ros));
  const double rd = ros_range(t.by_lambda.at(Strategy::kDdps));
  const double ru = ros_range(t.by_lambda.at(Strategy::kUniform));
  const double rf = ros_range(t.by_lambda.at(Strategy::kDifferentiated));
  double max_ros = 0.0;
  for (const auto& m : t.by_lambda.at(Strategy::kDdps)) max_ros = std::max(max_ros, m.ros);
  const std::string detail =
      fmt("RoS spread ddps %.4g, uniform %.4g, differentiated %.4g", rd, ru, rf) +
      fmt(", ddps max RoS %.4g", max_ros);
  return (rd <= ru && rd <= rf && max_ros < 1.0) ? pass(name, detail) : fail(name, detail);
}

CheckResult c9_determinism(const Options& o) {
  const std::string name = "criterion 9: runs are reproducible and seeded faults are caught";
  Scenario s = paper_defaults();
  std::string mismatch;
  for (auto strategy : pricing::kAllStrategies) {
    s.strategy = strategy;
    const auto a = report::metrics_csv(sim::run(s));
    const auto b = report::metrics_csv(sim::run(s));
    if (a != b) mismatch = std::string(pricing::name(strategy));
  }
  const std::vector<double> values{2e9, 6e9};
  const std::vector<Strategy> all(pricing::kAllStrategies.begin(), pricing::kAllStrategies.end());
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto serial = report::sweep_csv(sim::sweep(s, SweepAxis::kCapacity, values, all, seeds, 1));
  const auto parallel =
      report::sweep_csv(sim::sweep(s, SweepAxis::kCapacity, values, all, seeds, o.threads));
  if (serial != parallel) mismatch += " sweep(thread count)";
  if (!mismatch.empty()) return fail(name, "metrics differ between identical runs: " + mismatch);

  // Each seeded fault has to trip its own check.
  const bool offset_caught =
      !guarded("", [] { return c2_lemma1({Fault::kPricingOffset, 0}); }).passed;
  const bool surplus_caught =
      !guarded("", [] { return c4_redistribution({Fault::kPartialRedistribution, 0}); }).passed;
  const std::string detail = std::string("byte-identical metrics CSV; pricing-offset fault ") +
                             (offset_caught ? "caught" : "missed") +
                             ", partial-redistribution fault " +
                             (surplus_caught ? "caught" : "missed");
  return (offset_caught && surplus_caught) ? pass(name, detail) : fail(name, detail);
}

CheckResult c10_queue() {
  const std::string name = "criterion 10: queue formulas match simulation";
  // Lindley recursion with exponential service, independent of the project RNG.
  std::mt19937_64 rng(99);
  std::string detail;
  bool ok = true;
  for (auto [lambda, mu] : {std::pair{0.3, 1.0}, std::pair{0.5, 2.0}}) {
    std::exponential_distribution<double> arrive(lambda), serve(mu);
    double w = 0.0, sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      sum += w;
      w = std::max(0.0, w + serve(rng) - arrive(rng));
    }
    const double simulated = sum / n, formula = queue::mm1_wait(lambda, mu);
    const double err = rel_err(simulated, formula);
    ok = ok && err < 0.05;
    detail += fmt("M/M/1(%g,%g) ", lambda, mu) + fmt("rel err %.4f; ", err);
  }
  const std::size_t slots = 1000000;
  const auto counts = queue::sample_arrivals(0.3, 12345, slots);
  double total = 0.0;
  for (int c : counts) total += c;
  const double mean = total / static_cast<double>(slots);
  const double bound = 3.0 * std::sqrt(0.3 / static_cast<double>(slots));
  ok = ok && std::abs(mean - 0.3) < bound;
  detail += fmt("Poisson mean %.6f (3 sigma %.6f)", mean, bound);
  return ok ? pass(name, detail) : fail(name, detail);
}

// ---- invariants -----------------------------------------------------------

CheckResult inv_energy_monotone() {
  const std::string name = "energy: total energy is monotone in the offloaded bits";
  std::mt19937_64 rng(11);
  int grids = 0;
  for (int i = 0; i < 200; ++i) {
    const auto p = random_device(rng);
    const double slope = energy::local_energy_slope(p) - energy::offload_energy_slope(p);
    const double l = energy::critical_data(p) * 2.0;
    double prev = energy::total_energy(p, l, 0.0);
    for (int j = 1; j <= 100; ++j) {
      const double e = energy::total_energy(p, l, j == 100 ? l : l * j / 100.0);
      const double tol = 1e-12 * std::max(std::abs(e), std::abs(prev));
      if ((slope > 0.0 && e > prev + tol) || (slope < 0.0 && e < prev - tol))
        return fail(name, "direction flips on draw " + std::to_string(i));
      prev = e;
    }
    ++grids;
  }
  return pass(name, std::to_string(grids) + " grids of 101 points");
}

CheckResult inv_battery_bounds() {
  const std::string name = "energy: battery stays within [0, E_b]";
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int updates = 0;
  for (int i = 0; i < 100; ++i) {
    const auto p = random_device(rng);
    energy::BatteryState b{0.0, 0};
    for (int k = 0; k < 200; ++k) {
      const double budget = b.stored + energy::harvest_energy(p);
      b = energy::update_battery(b, p, budget * u(rng));
      ++updates;
      if (b.stored < 0.0 || b.stored > p.battery_capacity)
        return fail(name, fmt("stored %.6g outside [0, %.6g]", b.stored, p.battery_capacity));
    }
  }
  return pass(name, std::to_string(updates) + " updates");
}

CheckResult inv_balanced_offload() {
  const std::string name = "energy: unclamped balanced offload uses exactly one harvest";
  std::mt19937_64 rng(13);
  double worst = 0.0;
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_device(rng);
    const double l = energy::critical_data(p) * std::uniform_real_distribution<double>(1.0, 3.0)(rng);
    const auto q = energy::balanced_offload(p, l);
    const double raw = energy::balance_point(p, l);
    if (!q || *q != raw) continue;
    worst = std::max(worst, rel_err(energy::total_energy(p, l, *q), energy::harvest_energy(p)));
    ++checked;
  }
  const std::string detail = std::to_string(checked) + fmt(" unclamped draws, worst rel err %.3g", worst);
  return (checked > 0 && worst <= 1e-9) ? pass(name, detail) : fail(name, detail);
}

CheckResult inv_discount() {
  const std::string name = "pricing: ten-fold capacity costs a logarithmic premium";
  const double h = 100.0, q = 1e6, cap = 1e12;
  for (int n = 3; n <= 10; ++n) {
    for (int m = n + 1; m <= 11; ++m) {
      const double wn = pricing::ddps_payment(h, q, std::pow(10.0, n), cap, 1.0).payment;
      const double wm = pricing::ddps_payment(h, q, std::pow(10.0, m), cap, 1.0).payment;
      if (wm / wn > (m + 0.01) / n)
        return fail(name, "ratio " + fmt("%.6g", wm / wn) + " for n=" + std::to_string(n) +
                              " m=" + std::to_string(m));
    }
  }
  return pass(name, "W(10^m)/W(10^n) <= (m+0.01)/n for 3 <= n < m <= 11");
}

CheckResult inv_pricing_consistency(const Options& o) {
  const std::string name = "pricing: zero bits cost nothing and payment = unit price x time";
  pricing::PricingParams params;
  params.log_offset = log_offset_for(o);
  pricing::QuoteInputs in;
  in.cycles_per_bit = 100.0;
  in.capacity = 6e9;
  in.local_cpu = 5e8;
  in.uniform_price = 1.0 / 5e8;
  for (auto s : pricing::kAllStrategies) {
    in.bits = 0.0;
    in.cpu = 1e9;
    if (pricing::quote(s, params, in).payment != 0.0)
      return fail(name, std::string(pricing::name(s)) + " charges for q = 0");
    for (double bits : {1e4, 1e6, 4e6}) {
      for (double cpu : {1e7, 1e9, 6e9}) {
        in.bits = bits;
        in.cpu = cpu;
        const auto qt = pricing::quote(s, params, in);
        if (qt.payment != qt.unit_price * qt.processing_time)
          return fail(name, std::string(pricing::name(s)) + " payment is not unit x time");
      }
    }
  }
  double worst = 0.0;
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0, dx = 1e-3;
    const double second = pricing::nonlinear_unit_price(x + dx, 1.0, 0.1) -
                           2 * pricing::nonlinear_unit_price(x, 1.0, 0.1) +
                           pricing::nonlinear_unit_price(x - dx, 1.0, 0.1);
    worst = std::min(worst, second);
  }
  if (worst < -1e-12) return fail(name, fmt("nonlinear second difference %.3g", worst));
  return pass(name, "five strategies, nonlinear unit price convex");
}

// An offer asking for at least `cpu` on a fast link.
sched::Offer make_offer(std::int64_t id, double cpu, double deadline) {
  sched::Offer o;
  o.device = energy::EnergyParams{};
  o.device.cycles_per_bit = 100.0;
  o.device.uplink_rate = o.device.downlink_rate = 1e9;
  o.device.local_cpu = 1e9;
  o.task.task_id = id;
  o.task.user_id = static_cast<int>(id);
  o.task.local_cpu = 1e9;
  o.task.deadline = deadline;
  o.decision.kind = offload::DecisionKind::kPartial;
  o.decision.branch = offload::Branch::kPartialBalanced;
  o.decision.offload_bits = 1e6;
  o.task.data_bits = 1e6;
  o.decision.required_cpu = offload::required_capacity(1e6, deadline, 0.0, o.device);
  o.requested_cpu = std::max(cpu, o.decision.required_cpu);
  o.decision.energy = energy::total_energy(o.device, 1e6, 1e6);
  return o;
}

// Short slots against long deadlines, so tasks defer, wait and expire.
CheckResult inv_scheduler_audit() {
  const std::string name = "scheduler: conservation, class-2 priority, FCFS order, drop finality";
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto state = sched::make_server(6e9, 1e7, 0.5, 0.05);
  const sched::Pricer pricer = [](const sched::Offer& o, double cpu) {
    return pricing::ddps_payment(o.device.cycles_per_bit, o.decision.offload_bits, cpu, 6e9, 1.0);
  };
  std::int64_t next_id = 0;
  std::set<std::int64_t> finished;
  int grants = 0, deferred_grants = 0, expiries = 0;
  for (int slot = 0; slot < 400; ++slot) {
    std::vector<sched::Offer> arrivals;
    const int n = static_cast<int>(u(rng) * 10);
    for (int i = 0; i < n; ++i)
      arrivals.push_back(make_offer(next_id++, 5e8 + 2.5e9 * u(rng), 0.4 + 0.6 * u(rng)));
    std::vector<std::int64_t> queued_before;
    for (const auto& p : state.deferred) queued_before.push_back(p.offer.task.task_id);

    const auto out = sched::run_slot(state, arrivals, pricer);
    // Conservation along the grant log.
    double granted = 0.0;
    for (std::size_t i = 0; i < out.served.size(); ++i) {
      granted += out.served[i].cpu_initial;
      if (rel_err(granted + out.remaining_after_grant[i], 6e9) > 1e-12)
        return fail(name, "capacity not conserved in slot " + std::to_string(slot));
    }
    // Deferred grants come first and in queue order.
    bool fresh_seen = false;
    std::size_t queue_pos = 0;
    for (const auto& g : out.served) {
      ++grants;
      if (!g.from_deferred) {
        fresh_seen = true;
        continue;
      }
      ++deferred_grants;
      if (fresh_seen) return fail(name, "class-1 grant before class-2 grant");
      while (queue_pos < queued_before.size() && queued_before[queue_pos] != g.offer.task.task_id)
        ++queue_pos;
      if (queue_pos == queued_before.size()) return fail(name, "class-2 grant out of order");
    }
    double total = 0.0;
    for (const auto& g : out.served) total += g.cpu;
    if (out.redistributed && rel_err(total, 6e9) > 1e-6)
      return fail(name, "redistribution leaves capacity unused");
    for (const auto& g : out.served)
      if (g.processing_time > g.processing_time_initial)
        return fail(name, "redistribution slowed a task");
    for (const auto& g : out.served)
      if (!finished.insert(g.offer.task.task_id).second)
        return fail(name, "task served twice");
    for (const auto& d : out.dropped) {
      if (d.reason == "expired") ++expiries;
      if (!finished.insert(d.offer.task.task_id).second)
        return fail(name, "task left the server twice");
    }
  }
  const std::string detail = std::to_string(grants) + " grants, " +
                             std::to_string(deferred_grants) + " from class 2, " +
                             std::to_string(expiries) + " expiries";
  return (deferred_grants > 0 && expiries > 0) ? pass(name, detail) : fail(name, detail);
}

CheckResult inv_simulator_accounting() {
  const std::string name = "simulator: capacity and utility accounting close";
  Scenario s = paper_defaults();
  for (auto strategy : pricing::kAllStrategies) {
    s.strategy = strategy;
    const auto r = sim::run(s);
    const auto& m = r.metrics;
    if (rel_err(m.granted_capacity + m.idle_capacity, s.capacity * s.slots) > 1e-9)
      return fail(name, std::string(pricing::name(strategy)) + " capacity does not close");
    double sum = 0.0;
    for (double u : r.slot_utilities) sum += u;
    if (sum != m.server_utility)
      return fail(name, std::string(pricing::name(strategy)) + " utility does not add up");
    if (m.ros < 0.0 || m.ros > 1.0 || m.capacity_utilization > 1.0 + 1e-12 || m.avg_latency < 0.0)
      return fail(name, std::string(pricing::name(strategy)) + " metric out of range");
  }
  Scenario empty = paper_defaults();
  empty.n_users = 0;
  const auto r = sim::run(empty);
  if (r.metrics.tasks != 0 || r.metrics.server_utility != 0.0)
    return fail(name, "zero users still produce activity");
  return pass(name, "five strategies at paper defaults, plus an empty population");
}

CheckResult trend_b(unsigned threads) {
  const std::string name = "trend (b): DDPS utility grows with capacity and leads";
  const auto& v = trends(threads).by_capacity.at(Strategy::kDdps);
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i].server_utility < v[i - 1].server_utility)
      return fail(name, series(v, &sim::MetricsRecord::server_utility));
  double gap = INFINITY;
  if (auto e = ddps_utility_gap(trends(threads).by_capacity, trends(threads).capacities, &gap);
      !e.empty())
    return fail(name, e);
  return pass(name, "ddps " + series(v, &sim::MetricsRecord::server_utility));
}

CheckResult trend_c(unsigned threads) {
  const std::string name = "trend (c): DDPS latency grows with load and stays lowest";
  const auto& t = trends(threads);
  const auto& d = t.by_lambda.at(Strategy::kDdps);
  for (std::size_t i = 1; i < d.size(); ++i)
    if (d[i].avg_latency < d[i - 1].avg_latency)
      return fail(name, "ddps " + series(d, &sim::MetricsRecord::avg_latency));
  for (const auto& [s, v] : t.by_lambda) {
    if (s == Strategy::kDdps) continue;
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i].avg_latency < d[i].avg_latency)
        return fail(name, std::string(pricing::name(s)) + " beats ddps at lambda " +
                              fmt("%g", t.lambdas[i]));
  }
  return pass(name, "ddps " + series(d, &sim::MetricsRecord::avg_latency));
}

}  // namespace

std::string_view name(Fault f) {
  switch (f) {
    case Fault::kNone: return "none";
    case Fault::kPricingOffset: return "pricing-offset";
    case Fault::kPartialRedistribution: return "partial-redistribution";
  }
  return "unknown";
}

std::optional<Fault> parse_fault(std::string_view text) {
  for (auto f : {Fault::kNone, Fault::kPricingOffset, Fault::kPartialRedistribution})
    if (text == name(f)) return f;
  return std::nullopt;
}

CheckResult criterion(int number, const Options& o) {
  const std::string label = "criterion " + std::to_string(number);
  return guarded(label, [&]() -> CheckResult {
    switch (number) {
      case 1: return c1_thresholds();
      case 2: return c2_lemma1(o);
      case 3: return c3_appendix_b();
      case 4: return c4_redistribution(o);
      case 5: return c5_branches();
      case 6: return c6_fig3(o.threads);
      case 7: return c7_fig46(o.threads);
      case 8: return c8_fig7(o.threads);
      case 9: return c9_determinism(o);
      case 10: return c10_queue();
    }
    throw ContractViolation("no acceptance criterion " + std::to_string(number));
  });
}

std::vector<CheckResult> acceptance(const Options& o) {
  std::vector<CheckResult> out;
  for (int i = 1; i <= 10; ++i) out.push_back(criterion(i, o));
  return out;
}

std::vector<CheckResult> invariants(const Options& o) {
  std::vector<std::pair<std::string, std::function<CheckResult()>>> checks{
      {"energy monotone", inv_energy_monotone},
      {"battery bounds", inv_battery_bounds},
      {"balanced offload", inv_balanced_offload},
      {"pricing discount", inv_discount},
      {"pricing consistency", [&] { return inv_pricing_consistency(o); }},
      {"scheduler audit", inv_scheduler_audit},
      {"simulator accounting", inv_simulator_accounting},
      {"trend b", [&] { return trend_b(o.threads); }},
      {"trend c", [&] { return trend_c(o.threads); }},
  };
  std::vector<CheckResult> out;
  for (auto& [label, body] : checks) out.push_back(guarded(label, body));
  return out;
}

std::vector<CheckResult> run_all(const Options& o) {
  auto out = invariants(o);
  auto acc = acceptance(o);
  out.insert(out.end(), acc.begin(), acc.end());
  return out;
}

}  // namespace ddps::verify
