#pragma once

#include <stdexcept>
#include <string>

namespace mtmc {

// Raised for invalid input data, schema violations and contract breaches
// across the library. Messages name the offending field or record.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mtmc
