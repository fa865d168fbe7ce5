#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace factorhd {

enum class ErrorCode {
  invalid_dimension,
  empty_input,
  dimension_mismatch,
  non_invertible_unbinder,
  invalid_shape,
  path_not_found,
  corrupt_codebook,
  unsupported_configuration,
  invalid_argument,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace factorhd
