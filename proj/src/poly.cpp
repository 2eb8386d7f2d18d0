#include "jetforge/poly.hpp"

#include "jetforge/error.hpp"

#include <algorithm>
#include <cctype>

namespace jetforge {

int UniPoly::degree() const {
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
    if (!coeffs[static_cast<std::size_t>(i)].is_zero()) return i;
  }
  return -1;
}

bool UniPoly::is_monic() const {
  const int d = degree();
  if (d < 0) return false;
  const auto& lead = coeffs[static_cast<std::size_t>(d)];
  return lead == TruncSeries::constant(ctx, ctx.field().one());
}

TruncSeries UniPoly::eval(const TruncSeries& z) const {
  TruncSeries acc(ctx);
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
  return acc;
}

UniPoly UniPoly::taylor_shift(const TruncSeries& z) const {
  // Horner-style: after pass j, coefficient j of p(X + z) is final.
  std::vector<TruncSeries> a = coeffs;
  const std::size_t n = a.size();
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (std::size_t i = n - 1; i > j; --i) a[i - 1] = a[i - 1] + a[i] * z;
  }
  return UniPoly(ctx, std::move(a));
}

bool operator==(const UniPoly& a, const UniPoly& b) {
  if (!(a.ctx == b.ctx)) return false;
  const std::size_t n = std::max(a.coeffs.size(), b.coeffs.size());
  const TruncSeries zero(a.ctx);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = i < a.coeffs.size() ? a.coeffs[i] : zero;
    const auto& y = i < b.coeffs.size() ? b.coeffs[i] : zero;
    if (!(x == y)) return false;
  }
  return true;
}

UniPoly parse_unipoly(const TruncCtx& ctx, const std::string& text) {
  auto fail = [&](const std::string& why) { throw Error(Errc::kBadConfig, "bad polynomial '" + text + "': " + why); };
  UniPoly out(ctx);
  auto add_term = [&](std::size_t degree, const TruncSeries& c) {
    if (degree > 64) fail("degree too large");
    if (out.coeffs.size() <= degree) out.coeffs.resize(degree + 1, TruncSeries(ctx));
    out.coeffs[degree] = out.coeffs[degree] + c;
  };
  std::size_t pos = 0;
  if (text.empty()) fail("empty");
  while (pos < text.size()) {
    std::string coef_text;
    if (text[pos] == '(') {
      const auto close = text.find(')', pos);
      if (close == std::string::npos) fail("unbalanced parenthesis");
      coef_text = text.substr(pos + 1, close - pos - 1);
      pos = close + 1;
      if (pos < text.size() && text[pos] == '*') ++pos;
    } else {
      std::size_t end = pos;
      while (end < text.size() && text[end] != '+' && text[end] != 'z' && text[end] != '*') ++end;
      coef_text = text.substr(pos, end - pos);
      pos = end;
      if (pos < text.size() && text[pos] == '*') ++pos;
    }
    std::size_t degree = 0;
    if (pos < text.size() && text[pos] == 'z') {
      ++pos;
      degree = 1;
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        std::size_t end = pos;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == pos) fail("missing exponent");
        degree = std::stoul(text.substr(pos, end - pos));
        pos = end;
      }
    } else if (coef_text.empty()) {
      fail("empty term");
    }
    const TruncSeries c = coef_text.empty() ? TruncSeries::constant(ctx, ctx.field().one()) : parse_series(ctx, coef_text);
    add_term(degree, c);
    if (pos < text.size()) {
      if (text[pos] != '+') fail("expected '+'");
      ++pos;
      if (pos == text.size()) fail("trailing '+'");
    }
  }
  return out;
}

std::string to_string(const UniPoly& p) {
  std::string out;
  for (std::size_t i = p.coeffs.size(); i-- > 0;) {
    const auto& c = p.coeffs[i];
    if (c.is_zero()) continue;
    if (!out.empty()) out += '+';
    const std::string cs = to_string(c);
    const bool unit = cs == "1";
    if (i == 0) {
      out += cs;
      continue;
    }
    if (!unit) out += (cs.find('+') != std::string::npos ? "(" + cs + ")" : cs) + "*";
    out += 'z';
    if (i >= 2) out += '^' + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

}  // namespace jetforge
