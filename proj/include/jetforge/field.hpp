#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace jetforge {

// An element of F_{ell^k}, stored as its coordinate vector over F_ell packed
// little-endian in base ell: code = sum_i coord_i * ell^i.
struct FieldElem {
  std::uint32_t code = 0;

  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;
};

namespace detail {

struct FieldTables {
  std::uint32_t ell = 0;
  std::uint32_t k = 0;
  std::uint32_t q = 0;
  std::vector<std::uint32_t> modulus;  // monic, constant term first, size k+1

  // q <= kSmallTableLimit: full addition/subtraction/multiplication tables.
  std::vector<std::uint16_t> add_tab;
  std::vector<std::uint16_t> sub_tab;
  std::vector<std::uint16_t> mul_tab;
  // k > 1: discrete log tables relative to a fixed generator.
  std::vector<std::uint32_t> exp_tab;  // size 2(q-1)
  std::vector<std::uint32_t> log_tab;  // size q, log_tab[0] unused
  std::vector<std::uint32_t> inv_tab;  // size q, inv_tab[0] = 0

  std::uint32_t add_slow(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t sub_slow(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t mul_slow(std::uint32_t a, std::uint32_t b) const;
};

inline constexpr std::uint32_t kSmallTableLimit = 256;

}  // namespace detail

// Context for F_q, q = ell^k <= 2^16. Cheap to copy; the arithmetic tables
// are shared and immutable.
class FieldCtx {
 public:
  // Throws Error(kNonPrime | kTooLarge | kNoModulusInTable).
  static FieldCtx make(std::uint32_t ell, std::uint32_t k = 1);

  std::uint32_t ell() const noexcept { return t_->ell; }
  std::uint32_t k() const noexcept { return t_->k; }
  std::uint32_t q() const noexcept { return t_->q; }
  std::span<const std::uint32_t> modulus() const noexcept { return t_->modulus; }

  FieldElem zero() const noexcept { return {0}; }
  FieldElem one() const noexcept { return {1}; }
  // Image of an integer under Z -> F_ell -> F_q.
  FieldElem from_int(std::int64_t v) const noexcept;
  // Throws Error(kBadConfig) when code >= q.
  FieldElem element(std::uint32_t code) const;
  FieldElem from_coords(std::span<const std::uint32_t> coords) const;
  std::vector<std::uint32_t> coords(FieldElem a) const;

  FieldElem add(FieldElem a, FieldElem b) const noexcept {
    const auto& t = *t_;
    if (t.ell == 2) return {a.code ^ b.code};
    if (!t.add_tab.empty()) return {t.add_tab[a.code * t.q + b.code]};
    if (t.k == 1) {
      const std::uint32_t s = a.code + b.code;
      return {s >= t.q ? s - t.q : s};
    }
    return {t.add_slow(a.code, b.code)};
  }
  FieldElem sub(FieldElem a, FieldElem b) const noexcept {
    const auto& t = *t_;
    if (t.ell == 2) return {a.code ^ b.code};
    if (!t.sub_tab.empty()) return {t.sub_tab[a.code * t.q + b.code]};
    if (t.k == 1) return {a.code >= b.code ? a.code - b.code : a.code + t.q - b.code};
    return {t.sub_slow(a.code, b.code)};
  }
  FieldElem neg(FieldElem a) const noexcept { return sub(zero(), a); }
  FieldElem mul(FieldElem a, FieldElem b) const noexcept {
    const auto& t = *t_;
    if (!t.mul_tab.empty()) return {t.mul_tab[a.code * t.q + b.code]};
    return {t.mul_slow(a.code, b.code)};
  }
  // Inverse of a nonzero element; inv(0) returns 0.
  FieldElem inv(FieldElem a) const noexcept { return {t_->inv_tab[a.code]}; }
  FieldElem pow(FieldElem a, std::uint64_t e) const noexcept;

  // All q elements in code order.
  std::vector<FieldElem> elements() const;
  // F_q^x in code order.
  std::vector<FieldElem> units() const;

  std::string name() const;  // "F_9"

  bool same_field(const FieldCtx& other) const noexcept {
    return t_ == other.t_ || (ell() == other.ell() && k() == other.k());
  }

 private:
  explicit FieldCtx(std::shared_ptr<const detail::FieldTables> t) : t_(std::move(t)) {}

  std::shared_ptr<const detail::FieldTables> t_;
};

bool is_prime(std::uint64_t v) noexcept;

}  // namespace jetforge
