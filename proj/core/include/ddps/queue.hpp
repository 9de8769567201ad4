#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace ddps::queue {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so any draw can be reproduced in isolation and
// results do not depend on evaluation order or platform.
class CounterRng {
 public:
  static constexpr std::string_view kName = "splitmix64-counter";

  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const;
  // Uniform on [0, 1) with 53 bits of resolution.
  [[nodiscard]] double uniform(std::uint64_t stream, std::uint64_t counter) const;
  // Uniform on (0, 1].
  [[nodiscard]] double uniform_open(std::uint64_t stream, std::uint64_t counter) const;

 private:
  std::uint64_t seed_;
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x);

// Inverse-CDF Poisson sample for a uniform variate u in [0,1). Monotone in
// both u and lambda.
[[nodiscard]] int poisson_inverse_cdf(double lambda, double u);

[[nodiscard]] std::vector<int> sample_arrivals(double lambda, std::uint64_t seed,
                                               std::size_t slots);

// M/M/1 mean waiting time (lambda/mu^2)/(1 - lambda/mu).
[[nodiscard]] double mm1_wait(double lambda, double mu);

// mu = max_N / t_ave where t_ave averages the first max_N deadlines (or all
// of them when fewer are given).
[[nodiscard]] double service_rate(std::span<const double> deadlines, int max_concurrent);

struct BatchLatencies {
  double equal_share = 0.0;  // every user holds F/N for the whole job
  double fcfs_batches = 0.0; // FCFS groups of K, each user holding F/K
};

// Closed forms hL/(F/N) and h(K+N)L/(2F). K must divide N.
[[nodiscard]] BatchLatencies batch_latencies(int users, int batch, double cycles_per_bit,
                                             double bits, double capacity);

}  // namespace ddps::queue
