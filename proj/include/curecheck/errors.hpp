#pragma once

#include <stdexcept>
#include <string>

namespace curecheck {

// Bad input data: negative or non-finite times, unparseable cells, empty files.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameters or observations outside a family's domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An operation whose preconditions on the data are not met
// (no events, no converged fit, non-cure fit passed where a cure fit is needed).
class AssessmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace curecheck
