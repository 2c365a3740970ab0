#pragma once

#include <stdexcept>
#include <string>

namespace miscale {

// Error taxonomy shared by the library and the CLI exit-code contract:
// usage_error -> 2, io_error -> 3, numeric_error -> 4.
struct usage_error : std::runtime_error {
  explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

struct io_error : std::runtime_error {
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace miscale
