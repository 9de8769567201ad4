#include "ddps/queue.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ddps/errors.hpp"

namespace ddps::queue {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t CounterRng::bits(std::uint64_t stream, std::uint64_t counter) const {
  return splitmix64(splitmix64(seed_ ^ splitmix64(stream)) + counter);
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t counter) const {
  return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open(std::uint64_t stream, std::uint64_t counter) const {
  return (static_cast<double>(bits(stream, counter) >> 11) + 1.0) * 0x1.0p-53;
}

int poisson_inverse_cdf(double lambda, double u) {
  if (!(lambda >= 0.0) || lambda > 500.0) throw DomainError("poisson: lambda outside [0, 500]");
  double p = std::exp(-lambda);
  double cdf = p;
  int k = 0;
  while (u >= cdf && k < 10000) {
    ++k;
    p *= lambda / k;
    const double next = cdf + p;
    if (next == cdf) break;  // tail below double resolution
    cdf = next;
  }
  return k;
}

std::vector<int> sample_arrivals(double lambda, std::uint64_t seed, std::size_t slots) {
  if (!(lambda > 0.0)) throw DomainError("arrivals: lambda must be positive");
  const CounterRng rng(seed);
  std::vector<int> counts(slots);
  for (std::size_t s = 0; s < slots; ++s) counts[s] = poisson_inverse_cdf(lambda, rng.uniform(0, s));
  return counts;
}

double mm1_wait(double lambda, double mu) {
  if (!(lambda >= 0.0) || !(mu > 0.0)) throw DomainError("mm1: rates must be non-negative");
  if (lambda >= mu) throw InstabilityError("mm1: arrival rate must be below service rate");
  const double rho = lambda / mu;
  return (lambda / (mu * mu)) / (1.0 - rho);
}

double service_rate(std::span<const double> deadlines, int max_concurrent) {
  if (max_concurrent < 1) throw DomainError("service rate: max_N must be >= 1");
  if (deadlines.empty()) throw DomainError("service rate: no deadlines");
  const std::size_t n = std::min<std::size_t>(deadlines.size(), max_concurrent);
  const double sum = std::accumulate(deadlines.begin(), deadlines.begin() + n, 0.0);
  if (!(sum > 0.0)) throw DomainError("service rate: deadlines must be positive");
  const double t_ave = sum / static_cast<double>(n);
  return static_cast<double>(max_concurrent) / t_ave;
}

BatchLatencies batch_latencies(int users, int batch, double cycles_per_bit, double bits,
                               double capacity) {
  if (users < 1 || batch < 1 || batch > users) throw DomainError("batch latencies: need 1 <= K <= N");
  if (users % batch != 0) throw DomainError("batch latencies: K must divide N");
  if (!(cycles_per_bit > 0.0) || !(bits > 0.0) || !(capacity > 0.0)) {
    throw DomainError("batch latencies: h, L and F must be positive");
  }
  const double n = users;
  const double k = batch;
  return {cycles_per_bit * bits / (capacity / n), cycles_per_bit * (k + n) * bits / (2.0 * capacity)};
}

}  // namespace ddps::queue
