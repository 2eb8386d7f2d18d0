#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jetforge {

enum class Errc {
  kNonPrime,
  kTooLarge,
  kNoModulusInTable,
  kCtxMismatch,
  kSizeTooSmall,
  kInsufficientData,
  kCorruptCheckpoint,
  kShardOutOfRange,
  kLevelTooLow,
  kWrongCharacteristic,
  kBadConfig,
  kIoError,
};

std::string_view errc_name(Errc code) noexcept;

// Every library failure is reported through this type; `code()` is the
// machine-readable part, `what()` carries the context.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace jetforge
