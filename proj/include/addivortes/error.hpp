#ifndef ADDIVORTES_ERROR_HPP
#define ADDIVORTES_ERROR_HPP

#include <stdexcept>
#include <string>

namespace addivortes {

// Broken shape or index invariants of a model value (bad dims, size mismatch).
struct StructuralError : std::logic_error {
  using std::logic_error::logic_error;
};

// Invalid hyperparameters or sampler settings.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite quantities produced during sampling.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable files, malformed CSV, schema mismatches.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A metric that has no value for the given data (e.g. AUC with one class).
struct UndefinedMetricError : std::domain_error {
  using std::domain_error::domain_error;
};

}  // namespace addivortes

#endif
