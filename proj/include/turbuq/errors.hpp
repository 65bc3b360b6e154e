#pragma once

// Exception types for the failure modes named in the library contracts.
// The CLI maps categories to exit codes (dataset -> 4, checkpoint -> 5,
// I/O -> 3, everything else caught as validation -> 2).

#include <stdexcept>

namespace turbuq {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// tensor algebra
struct DegenerateTke : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NonRealizableEigenvalues : Error { using Error::Error; };
struct InvalidBarycentric : Error { using Error::Error; };

// perturbation engine
struct InvalidDelta : Error { using Error::Error; };
struct EmptySpecList : Error { using Error::Error; };

// network and training
struct InputTooShort : Error { using Error::Error; };
struct DegenerateBatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct EmptyBatch : Error { using Error::Error; };
struct LengthMismatch : Error { using Error::Error; };
struct EmptyPartition : Error { using Error::Error; };
struct DegenerateSpread : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };

// dataset ingestion
struct DatasetError : Error { using Error::Error; };
struct ParseError : DatasetError { using DatasetError::DatasetError; };
struct NegativeTke : DatasetError { using DatasetError::DatasetError; };
struct NonMonotoneProfile : DatasetError { using DatasetError::DatasetError; };
struct MissingFreestream : DatasetError { using DatasetError::DatasetError; };
struct NonPositiveFreestream : DatasetError { using DatasetError::DatasetError; };
struct TooFewPoints : DatasetError { using DatasetError::DatasetError; };
struct TooFewProfiles : DatasetError { using DatasetError::DatasetError; };

// persistence
struct CheckpointError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace turbuq
