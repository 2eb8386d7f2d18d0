#include "jetforge/matrix.hpp"

#include "jetforge/error.hpp"
#include "jetforge/linalg.hpp"

#include <algorithm>

namespace jetforge {
namespace {

void require_same(const JetMatrix& a, const JetMatrix& b) {
  if (a.n() != b.n() || !(a.ctx() == b.ctx())) throw Error(Errc::kCtxMismatch, "matrix shape or ring differs");
}

}  // namespace

JetMatrix::JetMatrix(int n, TruncCtx ctx)
    : n_(n), ctx_(std::move(ctx)), data_(static_cast<std::size_t>(n * n * ctx_.len())) {
  if (n < 1) throw Error(Errc::kBadConfig, "matrix size must be >= 1");
}

JetMatrix JetMatrix::identity(int n, const TruncCtx& ctx) {
  JetMatrix out(n, ctx);
  for (int i = 0; i < n; ++i) out.coeff(i, i, 0) = ctx.field().one();
  return out;
}

JetMatrix JetMatrix::from_codes(int n, const TruncCtx& ctx, const std::vector<std::uint32_t>& codes) {
  if (codes.size() != static_cast<std::size_t>(n * n)) throw Error(Errc::kBadConfig, "need n*n entries");
  JetMatrix out(n, ctx);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) out.coeff(r, c, 0) = ctx.field().element(codes[static_cast<std::size_t>(r * n + c)]);
  }
  return out;
}

TruncSeries JetMatrix::at(int r, int c) const {
  const auto begin = data_.begin() + static_cast<std::ptrdiff_t>(offset(r, c));
  return TruncSeries(ctx_, std::vector<FieldElem>(begin, begin + ctx_.len()));
}

void JetMatrix::set(int r, int c, const TruncSeries& v) {
  if (!(v.ctx() == ctx_)) throw Error(Errc::kCtxMismatch, "entry ring differs from matrix ring");
  std::copy(v.coeffs().begin(), v.coeffs().end(), data_.begin() + static_cast<std::ptrdiff_t>(offset(r, c)));
}

JetMatrix mat_mul(const JetMatrix& a, const JetMatrix& b) {
  require_same(a, b);
  const int n = a.n();
  const int len = a.ctx().len();
  JetMatrix out(n, a.ctx());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      FieldElem* dst = out.entry(r, c);
      for (int k = 0; k < n; ++k) kernel::series_fma(a.ctx().field(), len, a.entry(r, k), b.entry(k, c), dst);
    }
  }
  return out;
}

JetMatrix mat_add(const JetMatrix& a, const JetMatrix& b) {
  require_same(a, b);
  JetMatrix out = a;
  const auto& f = a.ctx().field();
  auto src = b.flat();
  auto dst = out.flat();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f.add(dst[i], src[i]);
  return out;
}

JetMatrix mat_sub(const JetMatrix& a, const JetMatrix& b) {
  require_same(a, b);
  JetMatrix out = a;
  const auto& f = a.ctx().field();
  auto src = b.flat();
  auto dst = out.flat();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f.sub(dst[i], src[i]);
  return out;
}

JetMatrix mat_scale(const JetMatrix& a, const TruncSeries& s) {
  JetMatrix out(a.n(), a.ctx());
  for (int r = 0; r < a.n(); ++r) {
    for (int c = 0; c < a.n(); ++c) out.set(r, c, a.at(r, c) * s);
  }
  return out;
}

CharCoeffs::CharCoeffs(int size, TruncCtx context) : n(size), ctx(std::move(context)) {
  c.assign(static_cast<std::size_t>(size), TruncSeries(ctx));
}

CharCoeffs::CharCoeffs(TruncCtx context, std::vector<TruncSeries> coeffs)
    : n(static_cast<int>(coeffs.size())), ctx(std::move(context)), c(std::move(coeffs)) {
  for (const auto& s : c) {
    if (!(s.ctx() == ctx)) throw Error(Errc::kCtxMismatch, "coefficient ring differs");
  }
}

bool CharCoeffs::is_zero() const {
  return std::all_of(c.begin(), c.end(), [](const TruncSeries& s) { return s.is_zero(); });
}

UniPoly CharCoeffs::to_poly() const {
  std::vector<TruncSeries> coeffs;
  coeffs.reserve(static_cast<std::size_t>(n + 1));
  for (int i = n; i >= 1; --i) coeffs.push_back((*this)[i]);
  coeffs.push_back(TruncSeries::constant(ctx, ctx.field().one()));
  return UniPoly(ctx, std::move(coeffs));
}

CharCoeffs CharCoeffs::from_monic(const UniPoly& p) {
  if (!p.is_monic()) throw Error(Errc::kBadConfig, "polynomial is not monic");
  const int d = p.degree();
  CharCoeffs out(d, p.ctx);
  for (int i = 1; i <= d; ++i) out[i] = p.coeffs[static_cast<std::size_t>(d - i)];
  return out;
}

std::string to_string(const CharCoeffs& x) {
  std::string out = "(";
  for (int i = 1; i <= x.n; ++i) {
    if (i > 1) out += ',';
    out += to_string(x[i]);
  }
  return out + ")";
}

CharCoeffs parse_char_coeffs(const TruncCtx& ctx, int n, const std::string& text) {
  std::string body = text;
  if (!body.empty() && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
  std::vector<TruncSeries> coeffs;
  std::size_t start = 0;
  while (true) {
    const auto comma = body.find(',', start);
    coeffs.push_back(parse_series(ctx, body.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (static_cast<int>(coeffs.size()) != n) {
    throw Error(Errc::kBadConfig, "expected " + std::to_string(n) + " coefficients in '" + text + "'");
  }
  return CharCoeffs(ctx, std::move(coeffs));
}

CharCoeffs weighted_scale(const CharCoeffs& x, FieldElem lambda) {
  CharCoeffs out = x;
  const auto& f = x.ctx.field();
  FieldElem power = f.one();
  for (int i = 1; i <= x.n; ++i) {
    power = f.mul(power, lambda);
    out[i] = ts_scale(x[i], power);
  }
  return out;
}

CharpolyKernel::CharpolyKernel(int n, const TruncCtx& ctx) : n_(n), len_(ctx.len()), field_(ctx.field()) {
  const auto sz = static_cast<std::size_t>((n + 1) * len_);
  col_.resize(sz);
  v_.resize(sz);
  w_.resize(sz);
  p_old_.resize(sz);
  p_new_.resize(sz);
  acc_.resize(static_cast<std::size_t>(len_));
}

void CharpolyKernel::run(const FieldElem* entries, FieldElem* out) {
  const auto& f = field_;
  const int len = len_;
  if (n_ == 1) {
    for (int j = 0; j < len; ++j) out[j] = f.neg(entries[j]);
    return;
  }
  if (n_ == 2) {
    // c_1 = -(a + d), c_2 = ad - bc
    const FieldElem* a = entries;
    const FieldElem* b = entries + len;
    const FieldElem* c = entries + 2 * len;
    const FieldElem* d = entries + 3 * len;
    for (int j = 0; j < len; ++j) out[j] = f.neg(f.add(a[j], d[j]));
    FieldElem* det = out + len;
    for (int k = 0; k < len; ++k) {
      FieldElem acc{0};
      for (int i = 0; i <= k; ++i) acc = f.add(acc, f.sub(f.mul(a[i], d[k - i]), f.mul(b[i], c[k - i])));
      det[k] = acc;
    }
    return;
  }
  run_general(entries, out);
}

void CharpolyKernel::run_general(const FieldElem* entries, FieldElem* out) {
  const auto& f = field_;
  const int n = n_;
  const int len = len_;
  auto entry = [&](int r, int c) { return entries + (r * n + c) * len; };
  auto slot = [len](std::vector<FieldElem>& buf, int i) { return buf.data() + i * len; };

  // p_old = [1]
  std::fill(p_old_.begin(), p_old_.end(), FieldElem{0});
  p_old_[0] = f.one();

  for (int r = 1; r <= n; ++r) {
    const int last = r - 1;
    // Toeplitz column: 1, -a, -rho s, -rho B s, ..., -rho B^{r-2} s
    std::fill(col_.begin(), col_.begin() + (r + 1) * len, FieldElem{0});
    slot(col_, 0)[0] = f.one();
    for (int j = 0; j < len; ++j) slot(col_, 1)[j] = f.neg(entry(last, last)[j]);
    // v = s (column `last`, rows 0..last-1)
    for (int i = 0; i < last; ++i) std::copy_n(entry(i, last), len, slot(v_, i));
    for (int k = 0; k + 2 <= r; ++k) {
      FieldElem* dst = slot(col_, k + 2);
      for (int i = 0; i < last; ++i) kernel::series_fms(f, len, entry(last, i), slot(v_, i), dst);
      if (k + 3 > r) break;
      // v = B v, B the leading (r-1)x(r-1) block
      for (int i = 0; i < last; ++i) {
        FieldElem* w = slot(w_, i);
        std::fill_n(w, len, FieldElem{0});
        for (int j = 0; j < last; ++j) kernel::series_fma(f, len, entry(i, j), slot(v_, j), w);
      }
      std::swap(v_, w_);
    }
    // p_new[i] = sum_{j <= min(i, r-1)} col[i-j] * p_old[j]
    for (int i = 0; i <= r; ++i) {
      FieldElem* dst = slot(p_new_, i);
      std::fill_n(dst, len, FieldElem{0});
      for (int j = 0; j <= std::min(i, r - 1); ++j) kernel::series_fma(f, len, slot(col_, i - j), slot(p_old_, j), dst);
    }
    std::swap(p_old_, p_new_);
  }
  std::copy_n(p_old_.data() + len, n * len, out);
}

CharCoeffs charpoly(const JetMatrix& a) {
  CharpolyKernel kernel(a.n(), a.ctx());
  std::vector<FieldElem> out(static_cast<std::size_t>(a.n() * a.ctx().len()));
  kernel.run(a.flat().data(), out.data());
  CharCoeffs result(a.n(), a.ctx());
  for (int i = 1; i <= a.n(); ++i) {
    auto dst = result[i].coeffs();
    std::copy_n(out.begin() + (i - 1) * a.ctx().len(), a.ctx().len(), dst.begin());
  }
  return result;
}

bool is_nilpotent_jet(const JetMatrix& a) { return charpoly(a).is_zero(); }

JetMatrix companion(const CharCoeffs& f, const std::optional<TruncSeries>& alpha) {
  const int n = f.n;
  if (n < 1) throw Error(Errc::kSizeTooSmall, "companion matrix needs n >= 1");
  if (alpha && n < 2) throw Error(Errc::kSizeTooSmall, "alpha entry needs n >= 2");
  JetMatrix out(n, f.ctx);
  for (int i = 1; i <= n; ++i) out.set(i - 1, 0, -f[i]);
  for (int i = 0; i + 1 < n; ++i) out.coeff(i, i + 1, 0) = f.ctx.field().one();
  if (alpha) out.set(n - 2, n - 1, *alpha);
  return out;
}

JetMatrix shift_scalar(const JetMatrix& a, const TruncSeries& z) {
  JetMatrix out = a;
  for (int i = 0; i < a.n(); ++i) out.set(i, i, a.at(i, i) + z);
  return out;
}

ShiftAudit audit_shift_scalar(const JetMatrix& a, const TruncSeries& z) {
  CharCoeffs lhs = charpoly(shift_scalar(a, z));
  CharCoeffs rhs = CharCoeffs::from_monic(charpoly(a).to_poly().taylor_shift(-z));
  const bool equal = lhs == rhs;
  return ShiftAudit{std::move(lhs), std::move(rhs), equal};
}

std::size_t bracket_rank(const JetMatrix& x) {
  if (x.ctx().m() != 0) throw Error(Errc::kBadConfig, "bracket_rank expects m = 0");
  const int n = x.n();
  const auto& f = x.ctx().field();
  // Row (a,b): the image [x, E_ab] flattened.
  std::vector<std::vector<FieldElem>> rows;
  rows.reserve(static_cast<std::size_t>(n * n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::vector<FieldElem> img(static_cast<std::size_t>(n * n));
      // x E_ab has column b equal to column a of x; E_ab x has row a equal to row b of x.
      for (int r = 0; r < n; ++r) {
        auto& e = img[static_cast<std::size_t>(r * n + b)];
        e = f.add(e, x.coeff(r, a, 0));
      }
      for (int c = 0; c < n; ++c) {
        auto& e = img[static_cast<std::size_t>(a * n + c)];
        e = f.sub(e, x.coeff(b, c, 0));
      }
      rows.push_back(std::move(img));
    }
  }
  return rank_over_field(f, std::move(rows));
}

}  // namespace jetforge
