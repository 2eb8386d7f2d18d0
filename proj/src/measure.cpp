#include "jetforge/measure.hpp"

#include "jetforge/error.hpp"

#include <algorithm>
#include <sstream>

namespace jetforge {

namespace {

// num * q^{-e} with q stripped from num while possible.
std::pair<BigInt, std::uint64_t> reduce_power(BigInt num, std::uint64_t e, std::uint32_t q) {
  while (e > 0 && num != 0 && num % q == 0) {
    num /= q;
    --e;
  }
  if (num == 0) e = 0;
  return {num, e};
}

}  // namespace

std::uint64_t DensityProfile::denominator_exponent() const {
  return static_cast<std::uint64_t>(resolution) * static_cast<std::uint64_t>(fiber_dim);
}

Rational DensityProfile::value(std::uint64_t index) const {
  return Rational(BigInt(fibers.counts.at(index))) * inv_pow(q(), denominator_exponent());
}

Rational DensityProfile::value(const CharCoeffs& x) const { return value(PointIndexer(n, ctx()).index(x)); }

CharCoeffs DensityProfile::box(std::uint64_t index) const { return PointIndexer(n, ctx()).point(index); }

Rational DensityProfile::mass() const {
  return Rational(fibers.mass()) * inv_pow(q(), denominator_exponent() + static_cast<std::uint64_t>(resolution * n));
}

DensityProfile density_profile(FiberTable table, int resolution) {
  if (resolution < 1) throw Error(Errc::kBadConfig, "resolution M must be >= 1");
  if (table.ctx.m() != resolution - 1) throw Error(Errc::kCtxMismatch, "fiber table must sit at level M-1");
  const int n = table.n;
  return DensityProfile{n, resolution, std::move(table), n * n - n};
}

DensityProfile density_profile(int n, const FieldCtx& field, int resolution, int threads) {
  if (resolution < 1) throw Error(Errc::kBadConfig, "resolution M must be >= 1");
  if (resolution > 32) throw Error(Errc::kTooLarge, "resolution above the truncation guard");
  const auto ctx = TruncCtx::make(field, resolution - 1);
  return density_profile(fiber_table(n, ctx, threads), resolution);
}

Rational lt_norm(const DensityProfile& profile, int t) {
  if (t < 1) throw Error(Errc::kBadConfig, "exponent t must be >= 1");
  BigInt sum = 0;
  for (auto c : profile.fibers.counts) {
    if (c != 0) sum += boost::multiprecision::pow(BigInt(c), static_cast<unsigned>(t));
  }
  const std::uint64_t e = static_cast<std::uint64_t>(t) * profile.denominator_exponent() +
                          static_cast<std::uint64_t>(profile.resolution * profile.n);
  return Rational(sum) * inv_pow(profile.q(), e);
}

SupDensity sup_density(const DensityProfile& profile) {
  const auto& counts = profile.fibers.counts;
  const auto top = *std::max_element(counts.begin(), counts.end());
  SupDensity out{Rational(BigInt(top)) * inv_pow(profile.q(), profile.denominator_exponent()), {}};
  for (std::uint64_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == top) out.argmax.push_back(i);
  }
  return out;
}

std::string AnfrsRatio::display() const {
  std::ostringstream os;
  os << to_double(ratio) << " (=" << to_decimal(count) << "/" << to_decimal(big_pow(q, denominator_exponent)) << ")";
  return os.str();
}

AnfrsRatio anfrs_ratio(int n, const FieldCtx& field, int a, int source_level) {
  if (n < 1) throw Error(Errc::kBadConfig, "n must be >= 1");
  if (a < 0) throw Error(Errc::kBadConfig, "scale a must be >= 0");
  const int level = a * n;
  if (source_level < level) {
    throw Error(Errc::kLevelTooLow,
                "truncation level " + std::to_string(source_level) + " is below a*n = " + std::to_string(level));
  }
  AnfrsRatio out{n, field.q(), a, level, 1, 0, Rational(1)};
  if (a == 0) return out;  // c(O) is the unit ball and receives all the mass

  const auto ctx = TruncCtx::make(field, level - 1);
  CountQuery guard{n, field.ell(), field.k(), level - 1, TargetKind::kNilCone, std::nullopt, 1};
  guard.validate();
  const auto keep = [a](int i, int j, FieldElem v) { return j >= a * i || v.code == 0; };
  out.count = count_filtered_range(n, ctx, keep, 0, guard.base_layer_size());
  const std::uint64_t weight = static_cast<std::uint64_t>(n * (n + 1) / 2);
  out.denominator_exponent = static_cast<std::uint64_t>(level) * static_cast<std::uint64_t>(n * n) -
                             static_cast<std::uint64_t>(a) * weight;
  out.ratio = Rational(out.count) * inv_pow(field.q(), out.denominator_exponent);
  return out;
}

std::vector<InsepPoint> insep_probe(const FieldCtx& field, int limit) {
  if (field.ell() != 2) throw Error(Errc::kWrongCharacteristic, "the inseparable probe needs characteristic 2");
  if (limit < 1) throw Error(Errc::kBadConfig, "limit must be >= 1");
  std::vector<InsepPoint> out;
  for (int M = 1; M <= limit; ++M) {
    const auto ctx = TruncCtx::make(field, M - 1);
    CharCoeffs x(2, ctx);
    if (M >= 2) x[2][1] = field.one();
    InsepPoint p{M, x, count_jet_fiber(2, ctx, x), 0};
    p.density = Rational(p.fiber) * inv_pow(field.q(), static_cast<std::uint64_t>(2 * M));
    out.push_back(std::move(p));
  }
  return out;
}

StabilityReport sup_stability(int n, const FieldCtx& field, const std::vector<int>& resolutions, int threads,
                              Rational band) {
  if (resolutions.empty()) throw Error(Errc::kBadConfig, "no resolutions given");
  StabilityReport rep{n, field.q(), {}, band, true};
  for (int M : resolutions) {
    auto sup = sup_density(density_profile(n, field, M, threads));
    rep.rows.push_back({M, sup.value, std::move(sup.argmax)});
  }
  const Rational cap = band * rep.rows.back().sup;
  for (const auto& r : rep.rows) rep.within_band = rep.within_band && r.sup <= cap;
  return rep;
}

std::string profile_csv(const DensityProfile& profile) {
  std::ostringstream os;
  for (int i = 1; i <= profile.n; ++i) os << "c_" << i << ",";
  os << "fiber_count,numerator,denominator_exponent\n";
  const PointIndexer idx(profile.n, profile.ctx());
  for (std::uint64_t b = 0; b < profile.size(); ++b) {
    const auto x = idx.point(b);
    for (int i = 1; i <= profile.n; ++i) os << to_string(x[i]) << ",";
    const auto count = profile.fibers.counts[b];
    const auto [num, e] = reduce_power(BigInt(count), profile.denominator_exponent(), profile.q());
    os << count << "," << to_decimal(num) << "," << e << "\n";
  }
  return os.str();
}

nlohmann::json profile_summary(const DensityProfile& profile, const std::vector<int>& norms) {
  const auto sup = sup_density(profile);
  nlohmann::json argmax = nlohmann::json::array();
  for (auto i : sup.argmax) argmax.push_back(to_string(profile.box(i)));
  nlohmann::json lt = nlohmann::json::object();
  for (int t : norms) lt[std::to_string(t)] = to_fraction(lt_norm(profile, t));
  return {{"n", profile.n},
          {"field", profile.ctx().field().name()},
          {"q", profile.q()},
          {"resolution", profile.resolution},
          {"boxes", profile.size()},
          {"mass", to_fraction(profile.mass())},
          {"lt_norms", std::move(lt)},
          {"sup", to_fraction(sup.value)},
          {"sup_decimal", to_double(sup.value)},
          {"argmax", std::move(argmax)}};
}

}  // namespace jetforge
