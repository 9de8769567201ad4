#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ddps/errors.hpp"
#include "ddps/queue.hpp"

using namespace ddps;
using namespace ddps::queue;

TEST(Queue, Mm1Examples) {
  EXPECT_NEAR(mm1_wait(0.3, 1.0), 0.42857142857142857, 1e-15);
  EXPECT_NEAR(mm1_wait(0.5, 2.0), 1.0 / 6.0, 1e-15);
  EXPECT_EQ(mm1_wait(0.0, 1.0), 0.0);
  EXPECT_THROW((void)mm1_wait(1.0, 1.0), InstabilityError);
  EXPECT_THROW((void)mm1_wait(0.1, 0.0), DomainError);
}

TEST(Queue, ServiceRate) {
  const std::vector<double> d{0.5, 0.5, 1.0};
  EXPECT_NEAR(service_rate(d, 3), 4.5, 1e-12);
  EXPECT_DOUBLE_EQ(service_rate(std::vector<double>{0.5}, 1), 2.0);
  EXPECT_DOUBLE_EQ(service_rate(std::vector<double>(7, 0.25), 4), 16.0);
  EXPECT_THROW((void)service_rate(std::vector<double>{0.0, 0.0}, 2), DomainError);
  EXPECT_THROW((void)service_rate(std::vector<double>{}, 2), DomainError);
}

TEST(Queue, BatchLatencies) {
  auto b = batch_latencies(4, 2, 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(b.equal_share, 4.0);
  EXPECT_DOUBLE_EQ(b.fcfs_batches, 3.0);
  b = batch_latencies(6, 2, 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(b.equal_share, 6.0);
  EXPECT_DOUBLE_EQ(b.fcfs_batches, 4.0);
  b = batch_latencies(5, 5, 1.0, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(b.equal_share, b.fcfs_batches);
  EXPECT_THROW((void)batch_latencies(6, 4, 1.0, 1.0, 1.0), DomainError);
}

TEST(Queue, RngIsCounterBased) {
  CounterRng a(42), b(42);
  EXPECT_EQ(a.bits(3, 17), b.bits(3, 17));
  EXPECT_NE(a.bits(3, 17), a.bits(3, 18));
  EXPECT_NE(a.bits(3, 17), CounterRng(43).bits(3, 17));
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform(1, i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = a.uniform_open(1, i);
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(Queue, PoissonInverseCdf) {
  EXPECT_EQ(poisson_inverse_cdf(0.3, 0.0), 0);
  EXPECT_EQ(poisson_inverse_cdf(0.0, 0.99), 0);
  // P(X = 0) = e^-0.3 ~ 0.7408
  EXPECT_EQ(poisson_inverse_cdf(0.3, 0.74), 0);
  EXPECT_EQ(poisson_inverse_cdf(0.3, 0.75), 1);
  int prev = 0;
  for (int i = 0; i < 100; ++i) {
    const int k = poisson_inverse_cdf(2.0, i / 100.0);
    ASSERT_GE(k, prev);
    prev = k;
  }
}

TEST(Queue, PoissonMean) {
  const auto counts = sample_arrivals(0.3, 7, 1000000);
  double total = 0.0;
  for (int c : counts) total += c;
  EXPECT_LT(std::abs(total / 1e6 - 0.3), 0.0016431676725154983);
  EXPECT_EQ(counts, sample_arrivals(0.3, 7, 1000000));
}
