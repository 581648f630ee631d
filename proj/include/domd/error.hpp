#pragma once

#include <stdexcept>
#include <string>

namespace domd {

/// Raised for every contract violation in the library. The message is meant
/// for the person running the simulator, so it names the offending value.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace domd
