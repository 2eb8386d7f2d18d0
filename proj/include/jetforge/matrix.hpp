#pragma once

#include "jetforge/poly.hpp"
#include "jetforge/trunc_series.hpp"

#include <optional>
#include <vector>

namespace jetforge {

// An n x n matrix over R_m. Storage is flat: entry (r, c) occupies
// coefficients [(r*n + c)*len, (r*n + c + 1)*len).
class JetMatrix {
 public:
  JetMatrix(int n, TruncCtx ctx);
  static JetMatrix identity(int n, const TruncCtx& ctx);
  // Constant matrix from an n*n row-major list of field codes.
  static JetMatrix from_codes(int n, const TruncCtx& ctx, const std::vector<std::uint32_t>& codes);

  int n() const noexcept { return n_; }
  const TruncCtx& ctx() const noexcept { return ctx_; }

  TruncSeries at(int r, int c) const;
  void set(int r, int c, const TruncSeries& v);  // throws kCtxMismatch
  FieldElem coeff(int r, int c, int j) const { return data_[offset(r, c) + static_cast<std::size_t>(j)]; }
  FieldElem& coeff(int r, int c, int j) { return data_[offset(r, c) + static_cast<std::size_t>(j)]; }

  const FieldElem* entry(int r, int c) const noexcept { return data_.data() + offset(r, c); }
  FieldElem* entry(int r, int c) noexcept { return data_.data() + offset(r, c); }

  std::span<const FieldElem> flat() const noexcept { return data_; }
  std::span<FieldElem> flat() noexcept { return data_; }

  friend bool operator==(const JetMatrix& a, const JetMatrix& b) {
    return a.n_ == b.n_ && a.ctx_ == b.ctx_ && a.data_ == b.data_;
  }

 private:
  std::size_t offset(int r, int c) const noexcept {
    return static_cast<std::size_t>(r * n_ + c) * static_cast<std::size_t>(ctx_.len());
  }

  int n_;
  TruncCtx ctx_;
  std::vector<FieldElem> data_;
};

JetMatrix mat_mul(const JetMatrix& a, const JetMatrix& b);
JetMatrix mat_add(const JetMatrix& a, const JetMatrix& b);
JetMatrix mat_sub(const JetMatrix& a, const JetMatrix& b);
JetMatrix mat_scale(const JetMatrix& a, const TruncSeries& s);

// Coefficients of det(zI - A) = z^n + c_1 z^{n-1} + ... + c_n.
struct CharCoeffs {
  int n = 0;
  TruncCtx ctx;
  std::vector<TruncSeries> c;  // c[0] is c_1

  CharCoeffs(int size, TruncCtx context);
  CharCoeffs(TruncCtx context, std::vector<TruncSeries> coeffs);

  const TruncSeries& operator[](int i) const { return c[static_cast<std::size_t>(i - 1)]; }  // 1-based
  TruncSeries& operator[](int i) { return c[static_cast<std::size_t>(i - 1)]; }
  bool is_zero() const;

  // z^n + c_1 z^{n-1} + ... + c_n as a polynomial, low degree first.
  UniPoly to_poly() const;
  static CharCoeffs from_monic(const UniPoly& p);  // throws kBadConfig unless monic

  friend bool operator==(const CharCoeffs& a, const CharCoeffs& b) { return a.ctx == b.ctx && a.c == b.c; }
};

std::string to_string(const CharCoeffs& x);  // "(c_1,c_2,...)"
// Reads "c1,c2,...,cn" with series syntax per coordinate.
CharCoeffs parse_char_coeffs(const TruncCtx& ctx, int n, const std::string& text);

// The G_m action with weights (1, ..., n): c_i -> lambda^i c_i.
CharCoeffs weighted_scale(const CharCoeffs& x, FieldElem lambda);

// Division-free characteristic polynomial (Berkowitz). Holds its scratch
// buffers so a counting loop can reuse one instance per thread.
class CharpolyKernel {
 public:
  CharpolyKernel(int n, const TruncCtx& ctx);

  int n() const noexcept { return n_; }
  int len() const noexcept { return len_; }

  // entries: n*n*len coefficients in JetMatrix layout; out: n*len
  // coefficients, c_1 first.
  void run(const FieldElem* entries, FieldElem* out);

 private:
  void run_general(const FieldElem* entries, FieldElem* out);

  int n_;
  int len_;
  FieldCtx field_;
  std::vector<FieldElem> col_, v_, w_, p_old_, p_new_, acc_;
};

CharCoeffs charpoly(const JetMatrix& a);
bool is_nilpotent_jet(const JetMatrix& a);

// First-column companion matrix with superdiagonal ones: column entries
// a_i = -c_i, so det(zI - C) = f. With alpha, entry (n-1, n) (1-based) is
// replaced by alpha. Throws kSizeTooSmall when alpha is given and n < 2.
JetMatrix companion(const CharCoeffs& f, const std::optional<TruncSeries>& alpha = std::nullopt);

JetMatrix shift_scalar(const JetMatrix& a, const TruncSeries& z);

struct ShiftAudit {
  CharCoeffs shifted;     // charpoly(A + zI)
  CharCoeffs translated;  // charpoly(A)(lambda - z)
  bool equal = false;
};
ShiftAudit audit_shift_scalar(const JetMatrix& a, const TruncSeries& z);

// Rank over F_q of X -> xX - Xx on gl_n(F_q). Throws kBadConfig unless m == 0.
std::size_t bracket_rank(const JetMatrix& x);

}  // namespace jetforge
