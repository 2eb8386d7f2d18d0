#pragma once

#include "jetforge/trunc_series.hpp"

#include <vector>

namespace jetforge {

// Polynomial in one variable over R_m, coefficients low degree first.
// Trailing zero coefficients are allowed; degree() ignores them.
struct UniPoly {
  TruncCtx ctx;
  std::vector<TruncSeries> coeffs;

  explicit UniPoly(TruncCtx c) : ctx(std::move(c)) {}
  UniPoly(TruncCtx c, std::vector<TruncSeries> cs) : ctx(std::move(c)), coeffs(std::move(cs)) {}

  // Highest index with a nonzero coefficient; -1 for the zero polynomial.
  int degree() const;
  bool is_monic() const;
  TruncSeries eval(const TruncSeries& z) const;
  // p(X + z), by repeated synthetic division.
  UniPoly taylor_shift(const TruncSeries& z) const;

  friend bool operator==(const UniPoly& a, const UniPoly& b);
};

// Reads "z^3+z+1", "z^2+t*z+1+t" style input: terms joined by '+', each term
// "[coef*]z[^d]" or a bare series; coef is a series in to_string syntax
// wrapped in parentheses when it has more than one term, e.g. "(1+t)*z".
UniPoly parse_unipoly(const TruncCtx& ctx, const std::string& text);
std::string to_string(const UniPoly& p);

}  // namespace jetforge
