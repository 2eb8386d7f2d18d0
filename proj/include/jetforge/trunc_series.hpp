#pragma once

#include "jetforge/field.hpp"

#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jetforge {

// R_m = F_q[t]/(t^{m+1}).
class TruncCtx {
 public:
  static constexpr int kMaxOrder = 31;

  // Throws Error(kTooLarge) for m > kMaxOrder, Error(kBadConfig) for m < 0.
  static TruncCtx make(FieldCtx field, int m);

  const FieldCtx& field() const noexcept { return field_; }
  int m() const noexcept { return m_; }
  int len() const noexcept { return m_ + 1; }
  TruncCtx with_order(int m) const { return make(field_, m); }

  bool operator==(const TruncCtx& o) const noexcept { return m_ == o.m_ && field_.same_field(o.field_); }

 private:
  TruncCtx(FieldCtx field, int m) : field_(std::move(field)), m_(m) {}

  FieldCtx field_;
  int m_;
};

// An element of R_m; coefficient of t^i at index i.
class TruncSeries {
 public:
  explicit TruncSeries(TruncCtx ctx);
  // Throws Error(kBadConfig) when coeffs.size() != m+1.
  TruncSeries(TruncCtx ctx, std::vector<FieldElem> coeffs);

  static TruncSeries constant(const TruncCtx& ctx, FieldElem c);
  static TruncSeries monomial(const TruncCtx& ctx, FieldElem c, int degree);

  const TruncCtx& ctx() const noexcept { return ctx_; }
  std::span<const FieldElem> coeffs() const noexcept { return coeffs_; }
  std::span<FieldElem> coeffs() noexcept { return coeffs_; }
  FieldElem operator[](int i) const { return coeffs_[static_cast<std::size_t>(i)]; }
  FieldElem& operator[](int i) { return coeffs_[static_cast<std::size_t>(i)]; }

  bool is_zero() const noexcept;
  // Image in R_{m'} for m' <= m.
  TruncSeries truncate(int order) const;

  friend bool operator==(const TruncSeries& a, const TruncSeries& b) {
    return a.ctx_ == b.ctx_ && a.coeffs_ == b.coeffs_;
  }

 private:
  TruncCtx ctx_;
  std::vector<FieldElem> coeffs_;
};

// All binary operations throw Error(kCtxMismatch) on differing contexts.
TruncSeries ts_add(const TruncSeries& a, const TruncSeries& b);
TruncSeries ts_sub(const TruncSeries& a, const TruncSeries& b);
TruncSeries ts_neg(const TruncSeries& a);
TruncSeries ts_mul(const TruncSeries& a, const TruncSeries& b);
TruncSeries ts_scale(const TruncSeries& a, FieldElem c);

inline TruncSeries operator+(const TruncSeries& a, const TruncSeries& b) { return ts_add(a, b); }
inline TruncSeries operator-(const TruncSeries& a, const TruncSeries& b) { return ts_sub(a, b); }
inline TruncSeries operator-(const TruncSeries& a) { return ts_neg(a); }
inline TruncSeries operator*(const TruncSeries& a, const TruncSeries& b) { return ts_mul(a, b); }

// Index of the first nonzero coefficient; nullopt is BOTTOM (val >= m+1).
std::optional<int> ts_val(const TruncSeries& a);
// min(val, m+1).
int ts_val_capped(const TruncSeries& a);

// "2+2t+t^3"; coefficients print as field codes. Zero prints "0".
std::string to_string(const TruncSeries& a);
// Inverse of to_string; throws Error(kBadConfig).
TruncSeries parse_series(const TruncCtx& ctx, const std::string& text);

// Number of elements q^{m+1}; throws Error(kTooLarge) above 2^40.
std::uint64_t ring_size(const TruncCtx& ctx);

// The element at position `index` of the enumeration order: lexicographic in
// (c_0, c_1, ..., c_m) with c_0 outermost, each coordinate in code order.
TruncSeries ring_element(const TruncCtx& ctx, std::uint64_t index);

// Ordered stream over all of R_m, in ring_element order.
class RingStream {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = TruncSeries;
    using difference_type = std::ptrdiff_t;
    using pointer = const TruncSeries*;
    using reference = const TruncSeries&;

    iterator(const TruncCtx& ctx, std::uint64_t index, std::uint64_t end);
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    bool operator==(const iterator& o) const noexcept { return index_ == o.index_; }

   private:
    TruncSeries current_;
    std::uint64_t index_;
    std::uint64_t end_;
  };

  explicit RingStream(TruncCtx ctx);
  iterator begin() const { return {ctx_, 0, size_}; }
  iterator end() const { return {ctx_, size_, size_}; }
  std::uint64_t size() const noexcept { return size_; }

 private:
  TruncCtx ctx_;
  std::uint64_t size_;
};

inline RingStream enumerate_ring(const TruncCtx& ctx) { return RingStream(ctx); }

namespace kernel {

// Flat R_m arithmetic on coefficient arrays of length len.
inline void series_mul(const FieldCtx& f, int len, const FieldElem* a, const FieldElem* b, FieldElem* out) {
  for (int k = 0; k < len; ++k) {
    FieldElem acc{0};
    for (int i = 0; i <= k; ++i) acc = f.add(acc, f.mul(a[i], b[k - i]));
    out[k] = acc;
  }
}

// out += a * b
inline void series_fma(const FieldCtx& f, int len, const FieldElem* a, const FieldElem* b, FieldElem* out) {
  for (int k = 0; k < len; ++k) {
    FieldElem acc = out[k];
    for (int i = 0; i <= k; ++i) acc = f.add(acc, f.mul(a[i], b[k - i]));
    out[k] = acc;
  }
}

// out -= a * b
inline void series_fms(const FieldCtx& f, int len, const FieldElem* a, const FieldElem* b, FieldElem* out) {
  for (int k = 0; k < len; ++k) {
    FieldElem acc{0};
    for (int i = 0; i <= k; ++i) acc = f.add(acc, f.mul(a[i], b[k - i]));
    out[k] = f.sub(out[k], acc);
  }
}

}  // namespace kernel

}  // namespace jetforge
