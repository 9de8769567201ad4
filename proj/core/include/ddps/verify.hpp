#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Built-in property and acceptance checks, shared by `ddps verify` and the
// acceptance test binary.
namespace ddps::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class Fault {
  kNone,
  kPricingOffset,          // DDPS log offset d = 0.5
  kPartialRedistribution,  // only half the surplus is handed back
};

[[nodiscard]] std::string_view name(Fault f);
// "none", "pricing-offset", "partial-redistribution"
[[nodiscard]] std::optional<Fault> parse_fault(std::string_view text);

struct Options {
  Fault fault = Fault::kNone;
  unsigned threads = 0;
};

// Acceptance criteria, numbered 1..10.
[[nodiscard]] CheckResult criterion(int number, const Options& options = {});
[[nodiscard]] std::vector<CheckResult> acceptance(const Options& options = {});

// Module invariants and simulator trend properties.
[[nodiscard]] std::vector<CheckResult> invariants(const Options& options = {});

// Invariants followed by acceptance criteria.
[[nodiscard]] std::vector<CheckResult> run_all(const Options& options = {});

}  // namespace ddps::verify
