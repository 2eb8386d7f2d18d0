#include "jetforge/trunc_series.hpp"

#include "jetforge/error.hpp"

#include <cctype>

namespace jetforge {
namespace {

void require_same(const TruncSeries& a, const TruncSeries& b) {
  if (!(a.ctx() == b.ctx())) {
    throw Error(Errc::kCtxMismatch, "series over " + a.ctx().field().name() + "[t]/t^" + std::to_string(a.ctx().len()) +
                                        " vs " + b.ctx().field().name() + "[t]/t^" + std::to_string(b.ctx().len()));
  }
}

constexpr std::uint64_t kMaxRing = std::uint64_t{1} << 40;

}  // namespace

TruncCtx TruncCtx::make(FieldCtx field, int m) {
  if (m < 0) throw Error(Errc::kBadConfig, "jet order must be >= 0");
  if (m > kMaxOrder) throw Error(Errc::kTooLarge, "jet order " + std::to_string(m) + " exceeds 31");
  return TruncCtx(std::move(field), m);
}

TruncSeries::TruncSeries(TruncCtx ctx) : ctx_(std::move(ctx)), coeffs_(static_cast<std::size_t>(ctx_.len())) {}

TruncSeries::TruncSeries(TruncCtx ctx, std::vector<FieldElem> coeffs) : ctx_(std::move(ctx)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != static_cast<std::size_t>(ctx_.len())) {
    throw Error(Errc::kBadConfig, "series needs exactly " + std::to_string(ctx_.len()) + " coefficients");
  }
  for (auto c : coeffs_) ctx_.field().element(c.code);
}

TruncSeries TruncSeries::constant(const TruncCtx& ctx, FieldElem c) { return monomial(ctx, c, 0); }

TruncSeries TruncSeries::monomial(const TruncCtx& ctx, FieldElem c, int degree) {
  TruncSeries out(ctx);
  if (degree >= 0 && degree <= ctx.m()) out[degree] = c;
  return out;
}

bool TruncSeries::is_zero() const noexcept {
  for (auto c : coeffs_) {
    if (c.code != 0) return false;
  }
  return true;
}

TruncSeries TruncSeries::truncate(int order) const {
  TruncCtx target = ctx_.with_order(order);
  if (order > ctx_.m()) throw Error(Errc::kCtxMismatch, "cannot truncate to a higher order");
  return TruncSeries(target, std::vector<FieldElem>(coeffs_.begin(), coeffs_.begin() + order + 1));
}

TruncSeries ts_add(const TruncSeries& a, const TruncSeries& b) {
  require_same(a, b);
  TruncSeries out(a.ctx());
  const auto& f = a.ctx().field();
  for (int i = 0; i < a.ctx().len(); ++i) out[i] = f.add(a[i], b[i]);
  return out;
}

TruncSeries ts_sub(const TruncSeries& a, const TruncSeries& b) {
  require_same(a, b);
  TruncSeries out(a.ctx());
  const auto& f = a.ctx().field();
  for (int i = 0; i < a.ctx().len(); ++i) out[i] = f.sub(a[i], b[i]);
  return out;
}

TruncSeries ts_neg(const TruncSeries& a) {
  TruncSeries out(a.ctx());
  const auto& f = a.ctx().field();
  for (int i = 0; i < a.ctx().len(); ++i) out[i] = f.neg(a[i]);
  return out;
}

TruncSeries ts_mul(const TruncSeries& a, const TruncSeries& b) {
  require_same(a, b);
  TruncSeries out(a.ctx());
  kernel::series_mul(a.ctx().field(), a.ctx().len(), a.coeffs().data(), b.coeffs().data(), out.coeffs().data());
  return out;
}

TruncSeries ts_scale(const TruncSeries& a, FieldElem c) {
  TruncSeries out(a.ctx());
  const auto& f = a.ctx().field();
  for (int i = 0; i < a.ctx().len(); ++i) out[i] = f.mul(a[i], c);
  return out;
}

std::optional<int> ts_val(const TruncSeries& a) {
  for (int i = 0; i < a.ctx().len(); ++i) {
    if (a[i].code != 0) return i;
  }
  return std::nullopt;
}

int ts_val_capped(const TruncSeries& a) { return ts_val(a).value_or(a.ctx().len()); }

std::string to_string(const TruncSeries& a) {
  std::string out;
  for (int i = 0; i < a.ctx().len(); ++i) {
    const std::uint32_t c = a[i].code;
    if (c == 0) continue;
    if (!out.empty()) out += '+';
    if (i == 0 || c != 1) out += std::to_string(c);
    if (i >= 1) out += 't';
    if (i >= 2) out += '^' + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

TruncSeries parse_series(const TruncCtx& ctx, const std::string& text) {
  TruncSeries out(ctx);
  const auto& f = ctx.field();
  auto fail = [&](const std::string& why) { throw Error(Errc::kBadConfig, "bad series '" + text + "': " + why); };
  std::size_t pos = 0;
  auto read_uint = [&]() -> std::optional<std::uint64_t> {
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) return std::nullopt;
    std::uint64_t v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + static_cast<std::uint64_t>(text[pos] - '0');
      if (v > (1U << 20)) fail("number too large");
      ++pos;
    }
    return v;
  };
  if (text.empty()) fail("empty");
  while (pos < text.size()) {
    auto coeff = read_uint();
    int degree = 0;
    if (pos < text.size() && text[pos] == 't') {
      ++pos;
      degree = 1;
      if (pos < text.size() && text[pos] == '^') {
        ++pos;
        auto d = read_uint();
        if (!d) fail("missing exponent");
        degree = static_cast<int>(*d);
      }
      if (!coeff) coeff = 1;
    } else if (!coeff) {
      fail("expected a term at offset " + std::to_string(pos));
    }
    if (*coeff >= f.q()) fail("coefficient out of range");
    if (degree <= ctx.m()) out[degree] = f.add(out[degree], FieldElem{static_cast<std::uint32_t>(*coeff)});
    if (pos < text.size()) {
      if (text[pos] != '+') fail("expected '+'");
      ++pos;
      if (pos == text.size()) fail("trailing '+'");
    }
  }
  return out;
}

std::uint64_t ring_size(const TruncCtx& ctx) {
  std::uint64_t size = 1;
  for (int i = 0; i < ctx.len(); ++i) {
    size *= ctx.field().q();
    if (size > kMaxRing) throw Error(Errc::kTooLarge, "q^(m+1) exceeds 2^40; shard the job");
  }
  return size;
}

TruncSeries ring_element(const TruncCtx& ctx, std::uint64_t index) {
  TruncSeries out(ctx);
  const std::uint32_t q = ctx.field().q();
  for (int i = ctx.m(); i >= 0; --i) {
    out[i] = FieldElem{static_cast<std::uint32_t>(index % q)};
    index /= q;
  }
  return out;
}

RingStream::RingStream(TruncCtx ctx) : ctx_(std::move(ctx)), size_(ring_size(ctx_)) {}

RingStream::iterator::iterator(const TruncCtx& ctx, std::uint64_t index, std::uint64_t end)
    : current_(ctx), index_(index), end_(end) {
  if (index_ < end_) current_ = ring_element(ctx, index_);
}

RingStream::iterator& RingStream::iterator::operator++() {
  ++index_;
  if (index_ >= end_) return *this;
  const std::uint32_t q = current_.ctx().field().q();
  for (int i = current_.ctx().m(); i >= 0; --i) {
    if (++current_[i].code < q) break;
    current_[i].code = 0;
  }
  return *this;
}

}  // namespace jetforge
