#pragma once

#include <stdexcept>
#include <string>

namespace ewa_agg {

/// Raised for any precondition violation on caller-supplied data
/// (dimension mismatch, out-of-range parameter, malformed config).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace ewa_agg
