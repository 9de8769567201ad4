#include "ddps/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ddps/errors.hpp"

namespace ddps::pricing {
namespace {

void require_cpu(double cpu, double capacity) {
  if (!(cpu > 0.0)) throw DomainError("requested capacity must be positive");
  // Redistribution can land a few ulps above the capacity.
  if (cpu > capacity * (1.0 + 1e-12)) throw CapacityError("requested capacity exceeds server capacity");
}

Quote make_quote(Strategy s, double unit_price, double time) {
  return {s, unit_price, time, unit_price * time};
}

}  // namespace

std::string_view name(Strategy s) {
  switch (s) {
    case Strategy::kDdps: return "ddps";
    case Strategy::kUniform: return "uniform";
    case Strategy::kDifferentiated: return "differentiated";
    case Strategy::kLinear: return "linear";
    case Strategy::kNonlinear: return "nonlinear";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  for (Strategy s : kAllStrategies) {
    if (name(s) == text) return s;
  }
  return std::nullopt;
}

std::string strategy_names() {
  std::string out;
  for (Strategy s : kAllStrategies) {
    if (!out.empty()) out += ", ";
    out += name(s);
  }
  return out;
}

bool shares_equally(Strategy s) {
  return s == Strategy::kUniform || s == Strategy::kDifferentiated;
}

bool redistributes(Strategy s) { return s == Strategy::kDdps; }

void validate(const PricingParams& p) {
  if (!(p.log_offset >= 1.0)) throw DomainError("pricing: log offset d must be >= 1");
  if (!(p.a >= 0.0) || !(p.b >= 0.0)) throw DomainError("pricing: a and b must be non-negative");
  for (double price : p.uniform_price_set) {
    if (!(price > 0.0)) throw DomainError("pricing: uniform prices must be positive");
  }
}

double processing_time(double cycles_per_bit, double bits, double cpu) {
  if (!(cpu > 0.0)) throw DomainError("processing time: capacity must be positive");
  if (!(bits >= 0.0)) throw DomainError("processing time: bits must be non-negative");
  return cycles_per_bit * bits / cpu;
}

Quote ddps_payment(double cycles_per_bit, double bits, double cpu, double capacity,
                   double log_offset) {
  if (!(log_offset >= 1.0)) throw DomainError("ddps: log offset d must be >= 1");
  require_cpu(cpu, capacity);
  const double unit = (cpu / capacity) * std::log10(cpu + log_offset);
  return make_quote(Strategy::kDdps, unit, processing_time(cycles_per_bit, bits, cpu));
}

double ddps_payment_dq(double cycles_per_bit, double cpu, double capacity, double log_offset) {
  return cycles_per_bit / capacity * std::log10(cpu + log_offset);
}

double ddps_payment_dcpu(double cycles_per_bit, double bits, double cpu, double capacity,
                         double log_offset) {
  return cycles_per_bit * bits / capacity / ((cpu + log_offset) * std::numbers::ln10);
}

Quote differentiated_payment(double cycles_per_bit, double bits, double local_cpu, double cpu,
                             double capacity) {
  if (!(local_cpu > 0.0)) throw DomainError("differentiated: local cpu must be positive");
  require_cpu(cpu, capacity);
  return make_quote(Strategy::kDifferentiated, 1.0 / local_cpu,
                    processing_time(cycles_per_bit, bits, cpu));
}

Quote linear_payment(double cycles_per_bit, double bits, double cpu, double capacity, double a,
                     double b) {
  require_cpu(cpu, capacity);
  const double x = cpu / capacity;
  return make_quote(Strategy::kLinear, a * x + b, processing_time(cycles_per_bit, bits, cpu));
}

double nonlinear_unit_price(double x, double a, double b) {
  if (!(a >= 0.0) || !(b >= 0.0)) throw DomainError("nonlinear: a and b must be non-negative");
  return a * x * x + b * x;
}

Quote nonlinear_payment(double cycles_per_bit, double bits, double cpu, double capacity, double a,
                        double b) {
  const double unit = nonlinear_unit_price(cpu / std::max(capacity, 0.0), a, b);
  require_cpu(cpu, capacity);
  return make_quote(Strategy::kNonlinear, unit, processing_time(cycles_per_bit, bits, cpu));
}

UniformOutcome uniform_payment(std::span<const UniformCandidate> users, double capacity,
                               std::span<const double> price_set) {
  if (users.empty()) throw DomainError("uniform pricing needs at least one user");

  std::vector<double> prices;
  if (price_set.empty()) {
    for (const auto& u : users) {
      if (!(u.local_cpu > 0.0)) throw DomainError("uniform: local cpu must be positive");
      prices.push_back(1.0 / u.local_cpu);
    }
  } else {
    prices.assign(price_set.begin(), price_set.end());
  }
  // Announced from the highest price down.
  std::sort(prices.begin(), prices.end(), std::greater<>());
  prices.erase(std::unique(prices.begin(), prices.end()), prices.end());

  UniformOutcome best;
  best.offloads.assign(users.size(), false);
  best.payments.assign(users.size(), 0.0);
  std::size_t best_count = 0;
  bool found = false;

  for (double mu : prices) {
    double demand = 0.0;
    double revenue = 0.0;
    std::size_t count = 0;
    for (const auto& u : users) {
      if (1.0 / u.local_cpu >= mu) {
        demand += u.requested_cpu;
        revenue += mu * processing_time(u.cycles_per_bit, u.bits, u.requested_cpu);
        ++count;
      }
    }
    if (count == 0 || !(demand < capacity)) continue;
    if (!found || revenue > best.revenue || (revenue == best.revenue && count > best_count)) {
      found = true;
      best.price = mu;
      best.revenue = revenue;
      best_count = count;
    }
  }

  if (found) {
    best.revenue = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      const auto& u = users[i];
      if (1.0 / u.local_cpu >= best.price) {
        best.offloads[i] = true;
        best.payments[i] =
            best.price * processing_time(u.cycles_per_bit, u.bits, u.requested_cpu);
        best.revenue += best.payments[i];
      }
    }
  }
  return best;
}

Quote quote(Strategy s, const PricingParams& params, const QuoteInputs& in) {
  switch (s) {
    case Strategy::kDdps:
      return ddps_payment(in.cycles_per_bit, in.bits, in.cpu, in.capacity, params.log_offset);
    case Strategy::kUniform: {
      require_cpu(in.cpu, in.capacity);
      return make_quote(Strategy::kUniform, in.uniform_price,
                        processing_time(in.cycles_per_bit, in.bits, in.cpu));
    }
    case Strategy::kDifferentiated:
      return differentiated_payment(in.cycles_per_bit, in.bits, in.local_cpu, in.cpu,
                                    in.capacity);
    case Strategy::kLinear:
      return linear_payment(in.cycles_per_bit, in.bits, in.cpu, in.capacity, params.a, params.b);
    case Strategy::kNonlinear:
      return nonlinear_payment(in.cycles_per_bit, in.bits, in.cpu, in.capacity, params.a,
                               params.b);
  }
  throw DomainError("unknown pricing strategy");
}

}  // namespace ddps::pricing
