#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ddps/energy.hpp"
#include "ddps/pricing.hpp"

namespace ddps {

inline constexpr int kScenarioSchemaVersion = 1;

// How per-user and per-task quantities are drawn.
struct WorkloadRanges {
  std::vector<double> local_cpu_ghz = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double data_min_kb = 100.0;
  double data_max_kb = 500.0;
  double bits_per_kb = 8000.0;
  double deadline_s = 0.5;
  double deadline_jitter = 0.2;  // t_req = deadline_s * (1 + jitter * U[-1,1])
  // Uplink delay of a mean-sized task; R_u and R_d follow from it per user.
  double tx_delay_min_s = 0.1;
  double tx_delay_max_s = 0.3;
};

enum class SweepAxis { kCapacity, kLambda };

[[nodiscard]] std::string_view name(SweepAxis a);
// Accepts "F_total" and "lambda"; throws ConfigError otherwise.
[[nodiscard]] SweepAxis parse_axis(std::string_view text);

struct SweepSpec {
  SweepAxis axis = SweepAxis::kCapacity;
  std::vector<double> values;
  std::vector<pricing::Strategy> strategies;
  std::vector<std::uint64_t> seeds;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name = "paper-defaults";
  int n_users = 60;
  double lambda = 0.3;       // per-user arrivals per slot
  double capacity = 6e9;     // F_total
  double price_capacity = 6e9;  // F_t in the pricing rules; >= F_total
  int slots = 60;
  double slot_length = 1.0;
  pricing::Strategy strategy = pricing::Strategy::kDdps;
  std::uint64_t seed = 1;
  std::string rng = "splitmix64-counter";
  double gamma = 0.3;
  double epsilon = 1e7;
  int max_concurrent = 18;   // max_N
  double initial_charge = 0.0;
  pricing::PricingParams pricing;
  energy::EnergyParams energy;  // template; rates and F_loc are set per user
  WorkloadRanges workload;
  std::optional<SweepSpec> sweep;
};

[[nodiscard]] Scenario paper_defaults();

// Throws ConfigError naming the offending field.
void validate(const Scenario& s);

// Strict JSON loading: unknown keys, wrong types and out-of-range values are
// ConfigErrors carrying the field path and, where known, the line number.
[[nodiscard]] Scenario parse_scenario(std::string_view json_text);
[[nodiscard]] Scenario load_scenario(const std::string& path);
[[nodiscard]] std::string to_json(const Scenario& s, int indent = 2);

// JSON Schema describing scenario files.
[[nodiscard]] std::string scenario_schema();

}  // namespace ddps
