#pragma once

#include <stdexcept>
#include <string>

namespace fracproj {

/// Base class for every error thrown by the library. Carries the name of
/// the module that raised it so the CLI can report it.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

struct DepthExceededError : Error {
  using Error::Error;
};

/// Conditioning on a cylinder or cell of zero mass.
struct UndefinedConditionalError : Error {
  using Error::Error;
};

/// A queried symbol has zero conditional probability.
struct InfiniteInformationError : Error {
  using Error::Error;
};

struct UnsupportedExactRepresentationError : Error {
  using Error::Error;
};

struct ConsistencyError : Error {
  using Error::Error;
};

/// A grid or tree is too coarse for the requested scale.
struct ResolutionError : Error {
  using Error::Error;
};

struct ArgumentError : Error {
  using Error::Error;
};

struct ConstructionViolationError : Error {
  using Error::Error;
};

}  // namespace fracproj
