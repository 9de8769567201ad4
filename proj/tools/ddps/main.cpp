// ddps: run scenarios, sweeps and the built-in checks.
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration error,
// 3 contract violation during a run.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddps/errors.hpp"
#include "ddps/report.hpp"
#include "ddps/scenario.hpp"
#include "ddps/simulator.hpp"
#include "ddps/verify.hpp"

namespace fs = std::filesystem;
using namespace ddps;

namespace {

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;
constexpr int kContractViolation = 3;

struct Args {
  std::string config;
  std::string out = "out";
  bool trace = false;
  bool per_slot = false;
  std::string axis;
  std::vector<double> values;
  std::vector<std::string> strategies;
  std::vector<std::string> seeds;
  std::string fault = "none";
  unsigned threads = 0;
};

std::uint64_t parse_seed(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + text + "' is not an unsigned 64-bit seed");
  }
}

// DDPS_SEED wins over the config file.
std::optional<std::uint64_t> env_seed() {
  const char* v = std::getenv("DDPS_SEED");
  if (!v || !*v) return std::nullopt;
  return parse_seed(v, "DDPS_SEED");
}

Scenario load(const Args& a) {
  Scenario s = load_scenario(a.config);
  if (auto seed = env_seed()) s.seed = *seed;
  return s;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("--out: cannot create '" + dir + "': " + ec.message());
  return fs::path(dir);
}

// An unwritable output directory is a configuration problem.
void emit(const fs::path& path, const std::string& text) {
  try {
    report::write_file(path.string(), text);
  } catch (const std::runtime_error& e) {
    throw ConfigError(std::string("--out: ") + e.what());
  }
}

int cmd_run(const Args& a) {
  const Scenario s = load(a);
  const fs::path out = prepare_out(a.out);
  sim::RunOptions opts;
  opts.trace = a.trace;
  opts.per_slot = a.per_slot;
  const auto r = sim::run(s, opts);
  emit(out / "metrics.csv", report::metrics_csv(r));
  emit(out / "metrics.json", report::metrics_json(r));
  if (a.trace) emit(out / "events.jsonl", report::events_jsonl(r.events));
  if (a.per_slot) emit(out / "per_slot.csv", report::per_slot_csv(r.per_slot));
  std::cout << pricing::name(s.strategy) << ": avg_latency " << report::format_double(r.metrics.avg_latency)
            << " s, server_utility " << report::format_double(r.metrics.server_utility) << ", ros "
            << report::format_double(r.metrics.ros) << "\n";
  return kOk;
}

int cmd_sweep(const Args& a) {
  const Scenario s = load(a);
  SweepSpec spec = s.sweep.value_or(SweepSpec{});
  if (!a.axis.empty()) spec.axis = parse_axis(a.axis);
  if (!a.values.empty()) spec.values = a.values;
  if (!a.strategies.empty()) {
    spec.strategies.clear();
    for (const auto& n : a.strategies) {
      auto st = pricing::parse_strategy(n);
      if (!st) {
        throw ConfigError("--strategies: unknown strategy '" + n + "'; valid: " +
                          pricing::strategy_names());
      }
      spec.strategies.push_back(*st);
    }
  }
  if (spec.strategies.empty())
    spec.strategies.assign(pricing::kAllStrategies.begin(), pricing::kAllStrategies.end());
  if (!a.seeds.empty()) {
    spec.seeds.clear();
    for (const auto& t : a.seeds) spec.seeds.push_back(parse_seed(t, "--seeds"));
  } else if (auto seed = env_seed()) {
    spec.seeds = {*seed};
  }
  if (spec.seeds.empty()) spec.seeds = {s.seed};
  if (spec.values.empty()) throw ConfigError("sweep: no values given (--values or sweep.values)");
  if (a.axis.empty() && !s.sweep) throw ConfigError("sweep: no axis given (--axis or sweep.axis)");

  const fs::path out = prepare_out(a.out);
  const auto rows = sim::sweep(s, spec.axis, spec.values, spec.strategies, spec.seeds, a.threads);
  emit(out / "sweep.csv", report::sweep_csv(rows));
  std::cout << rows.size() << " rows (" << spec.values.size() << " values x "
            << spec.strategies.size() << " strategies, " << spec.seeds.size()
            << " seeds each) -> " << (out / "sweep.csv").string() << "\n";
  return kOk;
}

int cmd_verify(const Args& a) {
  const auto fault = verify::parse_fault(a.fault);
  if (!fault) {
    throw ConfigError("--inject-fault: unknown fault '" + a.fault +
                      "'; valid: none, pricing-offset, partial-redistribution");
  }
  const auto results = verify::run_all({*fault, a.threads});
  const verify::CheckResult* first_failure = nullptr;
  for (const auto& r : results) {
    std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    if (!r.passed && !first_failure) first_failure = &r;
  }
  if (first_failure) {
    std::cerr << "verify failed: " << first_failure->name << "\n";
    return kVerifyFailed;
  }
  std::cout << "all " << results.size() << " checks passed\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pricing and offloading simulator for an energy-harvesting edge server"};
  app.require_subcommand(1);
  Args a;

  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", a.config, "Scenario JSON")->required();
  run->add_option("--out", a.out, "Output directory");
  run->add_flag("--trace", a.trace, "Write events.jsonl");
  run->add_flag("--per-slot", a.per_slot, "Write per_slot.csv");

  auto* sweep = app.add_subcommand("sweep", "Sweep F_total or lambda across strategies and seeds");
  sweep->add_option("--config", a.config, "Scenario JSON")->required();
  sweep->add_option("--out", a.out, "Output directory");
  sweep->add_option("--axis", a.axis, "F_total or lambda");
  sweep->add_option("--values", a.values, "Comma-separated axis values")->delimiter(',');
  sweep->add_option("--strategies", a.strategies, "Comma-separated strategy names")->delimiter(',');
  sweep->add_option("--seeds", a.seeds, "Comma-separated seeds")->delimiter(',');
  sweep->add_option("--threads", a.threads, "Worker threads (0 = all cores)");

  auto* ver = app.add_subcommand("verify", "Run property checks and acceptance criteria");
  ver->add_option("--inject-fault", a.fault, "none, pricing-offset or partial-redistribution");
  ver->add_option("--threads", a.threads, "Worker threads (0 = all cores)");

  auto* schema = app.add_subcommand("schema", "Print the scenario and output schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(a);
    if (*sweep) return cmd_sweep(a);
    if (*ver) return cmd_verify(a);
    if (*schema) {
      std::cout << report::output_schema();
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kContractViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kContractViolation;
  }
  return kOk;
}
