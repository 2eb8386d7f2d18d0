#pragma once

#include "jetforge/measure.hpp"
#include "jetforge/poly.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace jetforge {

// Distribution of val(x*y) for (x, y) Haar on O^2, enumerated over R_M^2.
struct ValHistogram {
  TruncCtx ctx;                 // m = M
  std::vector<BigInt> counts;   // r = 0..M
  BigInt tail_count;            // x*y = 0 in R_M, i.e. val >= M+1
  std::vector<Rational> buckets;
  Rational tail;

  int resolution() const noexcept { return ctx.m(); }
  Rational total() const;
};

// ((q-1)^2/q^2)(r+1)q^{-r}: the mass of val(xy) = r.
Rational mult_val_mass(std::uint32_t q, int r);
// Mass of val(xy) >= M+1: 1 minus the closed-form buckets r <= M.
Rational mult_tail_mass(std::uint32_t q, int M);

ValHistogram mult_pushforward_hist(const FieldCtx& field, int M);  // throws kTooLarge past q^{2(M+1)} > 2^34

// I_M(f) = q^{-(M+1)} sum_{z in R_M} min(val f(z), M+1), f over R_M.
Rational val_integral(const UniPoly& f);  // throws kTooLarge, kBadConfig for deg > 8
// deg(f)/(q-1) + (M+2) q^{-M}
Rational val_integral_bound(int degree, std::uint32_t q, int M);

// h(g) = (q-1)/q (I_M(g) + 1), g(z) read off the Taylor shift g(X + z).
Rational h_formula(const CharCoeffs& g);
Rational h_bound(int n, std::uint32_t q);  // n/q + 1

// Density of charpoly on the subregular slice c(f) + (alpha-1)e_{n-1,n} + zI
// with (f, alpha, z) Haar on O^{n+2}, at resolution M.
struct SubregDensity {
  DensityProfile direct;              // path (i): enumeration through charpoly
  std::vector<Rational> analytic;     // path (ii): sum over z of the product mass at x(z)
  std::uint64_t mismatches = 0;       // boxes where the paths differ
  Rational mass;
  SupDensity sup;
  Rational bound;                     // n/q + 1
  bool paths_agree() const noexcept { return mismatches == 0; }
  bool within_bound() const { return sup.value <= bound; }
};
// Requires n >= 3 (kBadConfig) and char > n/2 (kWrongCharacteristic).
SubregDensity subreg_slice_density(int n, const FieldCtx& field, int M);

// Haar mass of {(a, b) in O^2 : ab = w mod t^M}, w in R_{M-1}.
Rational mult_box_mass(const TruncSeries& w);

// charpoly(c(f) + (alpha-1)e_{n-1,n}) = f - f(0) + alpha f(0).
struct IdentityAudit {
  std::uint64_t points = 0;
  bool exhaustive = false;
  std::uint64_t failures = 0;
  std::optional<std::string> first_failure;
  bool pass() const noexcept { return failures == 0 && points > 0; }
};
// Exhaustive over (f, alpha) in F_q^{n+1} when n <= 3 and q <= 3, seeded samples otherwise.
IdentityAudit m1_identity_check(int n, const FieldCtx& field, std::uint64_t samples = 1000, std::uint64_t seed = 1);

std::string hist_csv(const ValHistogram& h);
nlohmann::json hist_json(const ValHistogram& h);
nlohmann::json subreg_json(const SubregDensity& d);

}  // namespace jetforge
