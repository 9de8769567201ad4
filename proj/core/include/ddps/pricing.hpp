#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddps::pricing {

enum class Strategy { kDdps, kUniform, kDifferentiated, kLinear, kNonlinear };

inline constexpr std::array<Strategy, 5> kAllStrategies = {
    Strategy::kDdps, Strategy::kUniform, Strategy::kDifferentiated, Strategy::kLinear,
    Strategy::kNonlinear};

[[nodiscard]] std::string_view name(Strategy s);
[[nodiscard]] std::optional<Strategy> parse_strategy(std::string_view text);
// "ddps, uniform, differentiated, linear, nonlinear"
[[nodiscard]] std::string strategy_names();

// Uniform and differentiated pricing carry no admission control: the server
// splits its capacity evenly among everyone who offloads in a slot.
[[nodiscard]] bool shares_equally(Strategy s);
// Only DDPS hands surplus capacity back to served users.
[[nodiscard]] bool redistributes(Strategy s);

struct PricingParams {
  double log_offset = 1.0;  // d, must be >= 1
  double a = 1.0;           // linear slope / quadratic coefficient
  double b = 0.1;           // linear intercept / nonlinear linear term
  std::vector<double> uniform_price_set;  // empty: derive {1/F_loc} per slot
};

void validate(const PricingParams& p);

// Unit price is per second of server processing; payment = unit * time.
struct Quote {
  Strategy strategy = Strategy::kDdps;
  double unit_price = 0.0;
  double processing_time = 0.0;
  double payment = 0.0;
};

// h * q / F_i. Throws DomainError for F_i <= 0 or q < 0.
[[nodiscard]] double processing_time(double cycles_per_bit, double bits, double cpu);

// W = (h q / F_t) * lg(F_i + d); unit price (F_i / F_t) * lg(F_i + d).
[[nodiscard]] Quote ddps_payment(double cycles_per_bit, double bits, double cpu, double capacity,
                                 double log_offset);
// Analytic partials dW/dq and dW/dF_i.
[[nodiscard]] double ddps_payment_dq(double cycles_per_bit, double cpu, double capacity,
                                     double log_offset);
[[nodiscard]] double ddps_payment_dcpu(double cycles_per_bit, double bits, double cpu,
                                       double capacity, double log_offset);

[[nodiscard]] Quote differentiated_payment(double cycles_per_bit, double bits, double local_cpu,
                                           double cpu, double capacity);
[[nodiscard]] Quote linear_payment(double cycles_per_bit, double bits, double cpu, double capacity,
                                   double a, double b);
[[nodiscard]] Quote nonlinear_payment(double cycles_per_bit, double bits, double cpu,
                                      double capacity, double a, double b);
// Unit price a*x^2 + b*x of the utilization fraction x.
[[nodiscard]] double nonlinear_unit_price(double x, double a, double b);

struct UniformCandidate {
  double cycles_per_bit = 0.0;
  double bits = 0.0;
  double local_cpu = 0.0;
  double requested_cpu = 0.0;
};

struct UniformOutcome {
  double price = 0.0;  // mu*, 0 when nobody can be served
  std::vector<bool> offloads;
  std::vector<double> payments;
  double revenue = 0.0;
};

// Picks one price for everybody from the candidate set (the explicit set, or
// {1/F_loc} when `price_set` is empty). A user offloads at price mu iff
// 1/F_loc >= mu. The chosen price maximizes revenue among prices whose
// offloading set fits strictly inside `capacity`; ties go to the price that
// serves more users. Throws DomainError on an empty user list.
[[nodiscard]] UniformOutcome uniform_payment(std::span<const UniformCandidate> users,
                                             double capacity,
                                             std::span<const double> price_set = {});

struct QuoteInputs {
  double cycles_per_bit = 0.0;
  double bits = 0.0;
  double cpu = 0.0;
  double capacity = 0.0;
  double local_cpu = 0.0;
  double uniform_price = 0.0;
};

[[nodiscard]] Quote quote(Strategy s, const PricingParams& params, const QuoteInputs& in);

}  // namespace ddps::pricing
