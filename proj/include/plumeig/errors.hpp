#pragma once

#include <stdexcept>
#include <string>

namespace plumeig {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Every hypothesis cell hit the likelihood floor during an update.
class AllMassLost : public Error {
 public:
  using Error::Error;
};

/// The posterior puts mass on a cell where the reference has zero probability.
class UnsupportedReference : public Error {
 public:
  using Error::Error;
};

/// The SNR kernel lattice does not cover the offsets the grid needs.
class KernelGridMismatch : public Error {
 public:
  using Error::Error;
};

class EpisodeDone : public Error {
 public:
  using Error::Error;
};

}  // namespace plumeig
