#pragma once

#include <stdexcept>
#include <string>

namespace rblspi {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};

struct SingularSystem : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct InvalidArgument : Error {
  using Error::Error;
};

struct InvalidBounds : Error {
  using Error::Error;
};

struct ActionOutOfRange : Error {
  using Error::Error;
};

// Raised when stepping an environment whose episode already ended.
struct EpisodeFinished : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace rblspi
