#include "jetforge/subreg.hpp"

#include "jetforge/error.hpp"

#include <random>
#include <sstream>

namespace jetforge {

namespace {

constexpr std::uint64_t kHistLimit = std::uint64_t{1} << 34;
constexpr std::uint64_t kIntegralLimit = std::uint64_t{1} << 24;
constexpr std::uint64_t kSliceLimit = std::uint64_t{1} << 40;

std::uint64_t guarded_pow(std::uint64_t q, std::uint64_t e, std::uint64_t limit, const char* what) {
  std::uint64_t v = 1;
  for (std::uint64_t i = 0; i < e; ++i) {
    if (v > limit / q) throw Error(Errc::kTooLarge, what);
    v *= q;
  }
  return v;
}

}  // namespace

Rational ValHistogram::total() const {
  Rational s = tail;
  for (const auto& b : buckets) s += b;
  return s;
}

Rational mult_val_mass(std::uint32_t q, int r) {
  return Rational(BigInt((q - 1) * (q - 1)) * (r + 1)) * inv_pow(q, static_cast<std::uint64_t>(r + 2));
}

Rational mult_tail_mass(std::uint32_t q, int M) {
  Rational s = 1;
  for (int r = 0; r <= M; ++r) s -= mult_val_mass(q, r);
  return s;
}

ValHistogram mult_pushforward_hist(const FieldCtx& field, int M) {
  if (M < 0) throw Error(Errc::kBadConfig, "M must be >= 0");
  const auto ctx = TruncCtx::make(field, M);
  const std::uint64_t ring = guarded_pow(field.q(), static_cast<std::uint64_t>(M + 1), kHistLimit, "ring too large");
  guarded_pow(field.q(), static_cast<std::uint64_t>(2 * (M + 1)), kHistLimit, "q^{2(M+1)} exceeds 2^34");
  std::vector<TruncSeries> elems;
  elems.reserve(ring);
  for (auto e : enumerate_ring(ctx)) elems.push_back(e);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(M + 2), 0);
  for (const auto& x : elems) {
    for (const auto& y : elems) ++counts[static_cast<std::size_t>(ts_val_capped(x * y))];
  }
  ValHistogram h{ctx, {}, counts.back(), {}, 0};
  const std::uint64_t denom_exp = static_cast<std::uint64_t>(2 * (M + 1));
  for (int r = 0; r <= M; ++r) {
    h.counts.push_back(counts[static_cast<std::size_t>(r)]);
    h.buckets.push_back(Rational(h.counts.back()) * inv_pow(field.q(), denom_exp));
  }
  h.tail = Rational(h.tail_count) * inv_pow(field.q(), denom_exp);
  return h;
}

Rational val_integral(const UniPoly& f) {
  if (f.degree() > 8) throw Error(Errc::kBadConfig, "val_integral supports degree <= 8");
  const auto& ctx = f.ctx;
  const int M = ctx.m();
  const std::uint32_t q = ctx.field().q();
  guarded_pow(q, static_cast<std::uint64_t>(M + 1), kIntegralLimit, "q^{M+1} exceeds 2^24");
  BigInt sum = 0;
  for (const auto& z : enumerate_ring(ctx)) sum += ts_val_capped(f.eval(z));
  return Rational(sum) * inv_pow(q, static_cast<std::uint64_t>(M + 1));
}

Rational val_integral_bound(int degree, std::uint32_t q, int M) {
  return Rational(degree) / Rational(q - 1) + Rational(M + 2) * inv_pow(q, static_cast<std::uint64_t>(M));
}

Rational h_formula(const CharCoeffs& g) {
  const auto poly = g.to_poly();
  const auto& ctx = g.ctx;
  const int M = ctx.m();
  const std::uint32_t q = ctx.field().q();
  guarded_pow(q, static_cast<std::uint64_t>(M + 1), kIntegralLimit, "q^{M+1} exceeds 2^24");
  BigInt sum = 0;
  for (const auto& z : enumerate_ring(ctx)) sum += ts_val_capped(poly.taylor_shift(z).coeffs[0]);
  const Rational integral = Rational(sum) * inv_pow(q, static_cast<std::uint64_t>(M + 1));
  return Rational(q - 1) / Rational(q) * (integral + 1);
}

Rational h_bound(int n, std::uint32_t q) { return Rational(n) / Rational(q) + 1; }

Rational mult_box_mass(const TruncSeries& w) {
  const int M = w.ctx().m() + 1;
  const std::uint32_t q = w.ctx().field().q();
  const int v = ts_val_capped(w);
  const Rational scale = inv_pow(q, static_cast<std::uint64_t>(M));
  if (v < M) return scale * Rational(q - 1) / Rational(q) * Rational(v + 1);
  // w = 0 mod t^M: every pair with val(a) + val(b) >= M.
  return scale * (Rational(M + 1) - Rational(M) / Rational(q));
}

SubregDensity subreg_slice_density(int n, const FieldCtx& field, int M) {
  if (n < 3) throw Error(Errc::kBadConfig, "the subregular slice needs n >= 3");
  if (2 * field.ell() <= static_cast<std::uint32_t>(n)) {
    throw Error(Errc::kWrongCharacteristic, "needs char > n/2");
  }
  if (M < 1) throw Error(Errc::kBadConfig, "resolution M must be >= 1");
  const auto ctx = TruncCtx::make(field, M - 1);
  const std::uint64_t ring = ring_size(ctx);
  const std::uint64_t points =
      guarded_pow(ring, static_cast<std::uint64_t>(n + 2), kSliceLimit, "slice sweep exceeds 2^40 points");
  const PointIndexer indexer(n, ctx);

  FiberTable table{n, ctx, std::vector<std::uint64_t>(indexer.size(), 0)};
  std::vector<TruncSeries> coords(static_cast<std::size_t>(n + 2), TruncSeries(ctx));
  for (std::uint64_t s = 0; s < points; ++s) {
    std::uint64_t idx = s;
    for (auto& c : coords) {
      c = ring_element(ctx, idx % ring);
      idx /= ring;
    }
    CharCoeffs f(ctx, std::vector<TruncSeries>(coords.begin(), coords.begin() + n));
    const auto y = shift_scalar(companion(f, coords[static_cast<std::size_t>(n)]), coords.back());
    ++table.counts[indexer.index(charpoly(y))];
  }

  SubregDensity out{DensityProfile{n, M, std::move(table), 2}, {}, 0, 0, {}, h_bound(n, field.q())};
  std::vector<TruncSeries> zs;
  for (auto z : enumerate_ring(ctx)) zs.push_back(z);
  for (std::uint64_t b = 0; b < indexer.size(); ++b) {
    const auto poly = indexer.point(b).to_poly();
    Rational v = 0;
    for (const auto& z : zs) v += mult_box_mass(poly.eval(z));
    if (v != out.direct.value(b)) ++out.mismatches;
    out.analytic.push_back(std::move(v));
  }
  out.mass = out.direct.mass();
  out.sup = sup_density(out.direct);
  return out;
}

IdentityAudit m1_identity_check(int n, const FieldCtx& field, std::uint64_t samples, std::uint64_t seed) {
  if (n < 2) throw Error(Errc::kBadConfig, "n must be >= 2");
  const auto ctx = TruncCtx::make(field, 0);
  const std::uint32_t q = field.q();
  IdentityAudit out;
  out.exhaustive = n <= 3 && q <= 3;
  std::uint64_t total = samples;
  if (out.exhaustive) {
    total = 1;
    for (int i = 0; i <= n; ++i) total *= q;
  }
  std::mt19937_64 rng(seed);
  std::vector<FieldElem> digits(static_cast<std::size_t>(n + 1));
  for (std::uint64_t s = 0; s < total; ++s) {
    std::uint64_t idx = s;
    for (auto& d : digits) {
      d = FieldElem{static_cast<std::uint32_t>(out.exhaustive ? idx % q : rng() % q)};
      idx /= q;
    }
    CharCoeffs f(n, ctx);
    for (int i = 1; i <= n; ++i) f[i] = TruncSeries::constant(ctx, digits[static_cast<std::size_t>(i - 1)]);
    const auto alpha = TruncSeries::constant(ctx, digits.back());
    // f - f(0) + alpha f(0): only c_n (the constant term) changes.
    CharCoeffs rhs = f;
    rhs[n] = alpha * f[n];
    const auto lhs = charpoly(companion(f, alpha));
    ++out.points;
    if (!(lhs == rhs)) {
      ++out.failures;
      if (!out.first_failure) out.first_failure = "f=" + to_string(f) + " alpha=" + to_string(alpha) + ": " + to_string(lhs);
    }
  }
  return out;
}

std::string hist_csv(const ValHistogram& h) {
  std::ostringstream os;
  os << "bucket,count,mass,closed_form,match\n";
  const std::uint32_t q = h.ctx.field().q();
  for (int r = 0; r <= h.resolution(); ++r) {
    const auto& b = h.buckets[static_cast<std::size_t>(r)];
    const auto expect = mult_val_mass(q, r);
    os << r << "," << to_decimal(h.counts[static_cast<std::size_t>(r)]) << "," << to_fraction(b) << ","
       << to_fraction(expect) << "," << (b == expect ? "yes" : "no") << "\n";
  }
  const auto tail_expect = mult_tail_mass(q, h.resolution());
  os << ">=" << h.resolution() + 1 << "," << to_decimal(h.tail_count) << "," << to_fraction(h.tail) << ","
     << to_fraction(tail_expect) << "," << (h.tail == tail_expect ? "yes" : "no") << "\n";
  return os.str();
}

nlohmann::json hist_json(const ValHistogram& h) {
  const std::uint32_t q = h.ctx.field().q();
  nlohmann::json rows = nlohmann::json::array();
  bool all = true;
  for (int r = 0; r <= h.resolution(); ++r) {
    const auto expect = mult_val_mass(q, r);
    const bool ok = h.buckets[static_cast<std::size_t>(r)] == expect;
    all = all && ok;
    rows.push_back({{"r", r},
                    {"count", to_decimal(h.counts[static_cast<std::size_t>(r)])},
                    {"mass", to_fraction(h.buckets[static_cast<std::size_t>(r)])},
                    {"closed_form", to_fraction(expect)},
                    {"match", ok}});
  }
  return {{"field", h.ctx.field().name()},
          {"M", h.resolution()},
          {"buckets", std::move(rows)},
          {"tail", to_fraction(h.tail)},
          {"total", to_fraction(h.total())},
          {"all_buckets_match", all}};
}

nlohmann::json subreg_json(const SubregDensity& d) {
  nlohmann::json argmax = nlohmann::json::array();
  for (auto i : d.sup.argmax) argmax.push_back(to_string(d.direct.box(i)));
  return {{"n", d.direct.n},
          {"field", d.direct.ctx().field().name()},
          {"resolution", d.direct.resolution},
          {"boxes", d.direct.size()},
          {"mass", to_fraction(d.mass)},
          {"sup", to_fraction(d.sup.value)},
          {"argmax", std::move(argmax)},
          {"bound", to_fraction(d.bound)},
          {"within_bound", d.within_bound()},
          {"dual_path_mismatches", d.mismatches},
          {"paths_agree", d.paths_agree()}};
}

}  // namespace jetforge
