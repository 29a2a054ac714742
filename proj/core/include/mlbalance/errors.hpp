#pragma once

#include <stdexcept>
#include <string>

namespace mlbalance {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arity or index violations when assembling or editing a dataset.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// A nominal value outside its declared domain, or an invalid domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Imbalance metrics are undefined for the dataset (e.g. no active labels).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// Neighbor cache misuse: too few instances, stale fingerprint, bad sidecar file.
class CacheError : public Error {
 public:
  using Error::Error;
};

/// A resampling algorithm cannot run on its input.
class AlgorithmError : public Error {
 public:
  using Error::Error;
};

/// Data rows could not be loaded (missing values, bad numbers).
class LoadError : public Error {
 public:
  using Error::Error;
};

/// ARFF header or label specification is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Invalid algorithm name or parameter.
class SpecError : public Error {
 public:
  using Error::Error;
};

}  // namespace mlbalance
