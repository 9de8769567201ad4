#pragma once

#include <stdexcept>
#include <string>

namespace ddps {

// Input outside the mathematical domain of an operation (negative sizes,
// q > l, d < 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A plan would drive the battery below zero.
class InsufficientEnergyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No finite server capacity can meet the deadline.
class DeadlineInfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested capacity exceeds what the server has.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Queue is not stable (lambda >= mu).
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed scenario or CLI configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A module received input that violates its documented contract.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ddps
