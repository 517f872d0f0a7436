#pragma once

#include <stdexcept>
#include <string>

namespace epipolicy {

// Base class for all epipolicy errors so callers can catch the whole family.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input text could not be parsed (bad date, bad number, bad header).
struct ParseError : Error { using Error::Error; };

// Input parsed but violates a data invariant (decreasing cumulative count,
// duplicate date, conflicting policy rows).
struct DataIntegrityError : Error { using Error::Error; };

// A key (region, factor) was not found where it is required.
struct LookupError : Error { using Error::Error; };

// A requested date window is not fully covered by the available series.
struct CoverageError : Error { using Error::Error; };

// A count exceeds the population or a value leaves its admissible range.
struct RangeError : Error { using Error::Error; };

// Smoothed removed counts exceed the infected pool beyond tolerance.
struct InconsistencyError : Error { using Error::Error; };

// A local regression neighborhood has a singular design matrix.
struct SingularityError : Error { using Error::Error; };

// Too few data points for the requested operation.
struct InsufficientDataError : Error { using Error::Error; };

// No span in the candidate grid admits a feasible LOESS fit.
struct NoFeasibleSpanError : Error { using Error::Error; };

// A value lies outside the mathematical domain of a density or transform.
struct DomainError : Error { using Error::Error; };

// An operation received an empty input where at least one element is needed.
struct EmptyInputError : Error { using Error::Error; };

// Design matrix is rank deficient; message names the dependent columns.
struct CollinearityError : Error { using Error::Error; };

// Fewer observations than model parameters.
struct InsufficientObservationsError : Error { using Error::Error; };

// MCMC could not start from a finite log posterior.
struct InitializationError : Error { using Error::Error; };

// Correlation is undefined (zero variance in an argument).
struct UndefinedCorrelationError : Error { using Error::Error; };

// Bad run configuration or unreadable/unwritable file.
struct ConfigError : Error { using Error::Error; };

}  // namespace epipolicy
