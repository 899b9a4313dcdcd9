#pragma once

#include <stdexcept>
#include <string>

namespace trajclust {

/// Bad user input: malformed configuration, invalid parameters, missing k.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The data itself is unusable: unreadable files, non-numeric cells,
/// non-finite distances, empty datasets.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A cached artifact does not belong to the data it is being used with.
class CacheMismatchError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace trajclust
