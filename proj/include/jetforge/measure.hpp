#pragma once

#include "jetforge/counter.hpp"
#include "jetforge/numeric.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace jetforge {

// Pushforward of Haar measure on Mat_n(O) under the characteristic
// polynomial, averaged over boxes x + t^M O^n, x in c(R_{M-1}):
// f_M(x) = fiber_{M-1}(x) * q^{-M(n^2-n)}.
struct DensityProfile {
  int n;
  int resolution;     // M >= 1
  FiberTable fibers;  // at level M-1
  int fiber_dim;      // source dim - n: n^2 - n for Mat_n, 2 for the subregular slice

  const TruncCtx& ctx() const noexcept { return fibers.ctx; }
  std::uint32_t q() const { return fibers.ctx.field().q(); }
  std::uint64_t size() const noexcept { return fibers.counts.size(); }
  std::uint64_t denominator_exponent() const;  // M * fiber_dim, base q
  Rational value(std::uint64_t index) const;
  Rational value(const CharCoeffs& x) const;
  CharCoeffs box(std::uint64_t index) const;
  // q^{-Mn} * sum f; exactly 1 for every valid profile.
  Rational mass() const;
};

DensityProfile density_profile(int n, const FieldCtx& field, int resolution, int threads = 1);  // throws kTooLarge
DensityProfile density_profile(FiberTable table, int resolution);  // table at level M-1

// q^{-Mn} * sum_x f_M(x)^t, t >= 1.
Rational lt_norm(const DensityProfile& profile, int t);

struct SupDensity {
  Rational value;
  std::vector<std::uint64_t> argmax;  // profile indices, ascending
};
SupDensity sup_density(const DensityProfile& profile);

// Mass of {A : val c_i(A) >= a i} relative to the weighted ellipsoid volume.
struct AnfrsRatio {
  int n;
  std::uint32_t q;
  int a;
  int level;                   // truncation level used: jets mod t^{a n}
  BigInt count;                // matrices over R_{an-1} landing in the ellipsoid
  std::uint64_t denominator_exponent;  // ratio = count / q^{denominator_exponent}
  Rational ratio;

  std::string display() const;  // "1.25 (=40/32)"
};
// Throws kLevelTooLow when source_level < a n, kTooLarge past the enumeration guard.
AnfrsRatio anfrs_ratio(int n, const FieldCtx& field, int a, int source_level);

// Density trace over boxes shrinking onto z^2 + t (n = 2, characteristic 2).
struct InsepPoint {
  int resolution;
  CharCoeffs box;  // (0, t) mod t^M
  BigInt fiber;
  Rational density;
};
std::vector<InsepPoint> insep_probe(const FieldCtx& field, int limit);  // throws kWrongCharacteristic

// sup f_M for each M and whether every value stays within `band` times the last one.
struct StabilityRow {
  int resolution;
  Rational sup;
  std::vector<std::uint64_t> argmax;
};
struct StabilityReport {
  int n;
  std::uint32_t q;
  std::vector<StabilityRow> rows;
  Rational band;
  bool within_band;
};
StabilityReport sup_stability(int n, const FieldCtx& field, const std::vector<int>& resolutions, int threads = 1,
                              Rational band = 2);

// CSV columns: c_1..c_n, fiber_count, numerator, denominator_exponent, where
// f_M = numerator * q^{-denominator_exponent} in lowest terms.
std::string profile_csv(const DensityProfile& profile);
nlohmann::json profile_summary(const DensityProfile& profile, const std::vector<int>& norms);

}  // namespace jetforge
