#include "jetforge/numeric.hpp"

#include "jetforge/error.hpp"

#include <algorithm>
#include <cctype>

namespace jetforge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kNonPrime: return "NonPrime";
    case Errc::kTooLarge: return "TooLarge";
    case Errc::kNoModulusInTable: return "NoModulusInTable";
    case Errc::kCtxMismatch: return "CtxMismatch";
    case Errc::kSizeTooSmall: return "SizeTooSmall";
    case Errc::kInsufficientData: return "InsufficientData";
    case Errc::kCorruptCheckpoint: return "CorruptCheckpoint";
    case Errc::kShardOutOfRange: return "ShardOutOfRange";
    case Errc::kLevelTooLow: return "LevelTooLow";
    case Errc::kWrongCharacteristic: return "WrongCharacteristic";
    case Errc::kBadConfig: return "BadConfig";
    case Errc::kIoError: return "IoError";
  }
  return "Unknown";
}

BigInt big_pow(std::uint64_t base, std::uint64_t exp) {
  BigInt result = 1;
  BigInt b = base;
  while (exp > 0) {
    if (exp & 1U) result *= b;
    b *= b;
    exp >>= 1U;
  }
  return result;
}

Rational inv_pow(std::uint64_t q, std::uint64_t e) { return Rational(BigInt(1), big_pow(q, e)); }

std::string to_decimal(const BigInt& v) { return v.str(); }

BigInt parse_decimal(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    throw Error(Errc::kBadConfig, "not a nonnegative decimal integer: '" + s + "'");
  }
  return BigInt(s);
}

std::string to_fraction(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational parse_fraction(const std::string& s) {
  const auto slash = s.find('/');
  auto parse_signed = [&](const std::string& part) {
    if (!part.empty() && part[0] == '-') return BigInt(-parse_decimal(part.substr(1)));
    return parse_decimal(part);
  };
  if (slash == std::string::npos) return Rational(parse_signed(s));
  const BigInt den = parse_decimal(s.substr(slash + 1));
  if (den == 0) throw Error(Errc::kBadConfig, "zero denominator in '" + s + "'");
  return Rational(parse_signed(s.substr(0, slash)), den);
}

}  // namespace jetforge
