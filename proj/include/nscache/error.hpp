#pragma once

#include <stdexcept>
#include <string>

namespace nscache {

// Every recoverable failure in the library is reported with this type. When the
// failure can be traced to an input file, `file()`/`line()` carry the location.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message, std::string file = {}, int line = 0)
      : std::runtime_error(message), file_(std::move(file)), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }

 private:
  std::string file_;
  int line_ = 0;
};

}  // namespace nscache
