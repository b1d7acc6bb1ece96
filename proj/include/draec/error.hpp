#pragma once

#include <stdexcept>
#include <string>

namespace draec {

// Base error for all library failures. Subcommands map these to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WavError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace draec
