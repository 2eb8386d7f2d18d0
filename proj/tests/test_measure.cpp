#include "jetforge/error.hpp"
#include "jetforge/measure.hpp"
#include "oracle.hpp"

#include <doctest.h>

using namespace jetforge;

namespace {

Rational frac(long long a, long long b) { return Rational(a) / Rational(b); }

CharCoeffs point(const DensityProfile& p, const std::string& text) { return parse_char_coeffs(p.ctx(), p.n, text); }

// Ellipsoid membership count by brute force: every matrix over R_{an-1},
// charpoly by Leibniz, coefficient valuations compared directly.
std::uint64_t brute_ellipsoid_count(int n, std::uint32_t ell, int a) {
  const auto ctx = TruncCtx::make(FieldCtx::make(ell), a * n - 1);
  std::uint64_t total = 1;
  for (int i = 0; i < n * n * ctx.len(); ++i) total *= ell;
  std::uint64_t hits = 0;
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    const auto x = oracle::leibniz_charpoly(oracle::matrix_from_index(n, ctx, idx));
    bool in = true;
    for (int i = 1; i <= n; ++i) in = in && ts_val_capped(x[i]) >= a * i;
    hits += in;
  }
  return hits;
}

}  // namespace

TEST_CASE("density profile examples") {
  const auto p1 = density_profile(2, FieldCtx::make(2), 1);
  CHECK(p1.value(point(p1, "0,0")) == 1);
  CHECK(p1.value(point(p1, "1,0")) == frac(3, 2));
  CHECK(p1.value(point(p1, "0,1")) == 1);
  CHECK(p1.value(point(p1, "1,1")) == frac(1, 2));

  const auto p2 = density_profile(2, FieldCtx::make(2), 2);
  CHECK(p2.value(point(p2, "0,0")) == frac(5, 4));

  for (std::uint32_t ell : {2u, 3u, 7u}) {
    for (int M : {1, 2, 3}) {
      const auto p = density_profile(1, FieldCtx::make(ell), M);
      for (std::uint64_t i = 0; i < p.size(); ++i) CHECK(p.value(i) == 1);
    }
  }
  CHECK_THROWS_AS(density_profile(2, FieldCtx::make(2), 0), Error);
  CHECK_THROWS_AS(density_profile(3, FieldCtx::make(2), 5), Error);
}

TEST_CASE("density profile agrees with the Leibniz fiber oracle") {
  const auto p = density_profile(2, FieldCtx::make(3), 2);
  const auto brute = oracle::brute_fiber_table(2, p.ctx());
  for (std::uint64_t i = 0; i < p.size(); ++i) {
    const auto key = to_string(p.box(i));
    const auto it = brute.find(key);
    const std::uint64_t c = it == brute.end() ? 0 : it->second;
    CHECK(p.value(i) == Rational(c) / Rational(81));
  }
}

TEST_CASE("lt_norm") {
  const auto p1 = density_profile(2, FieldCtx::make(2), 1);
  CHECK(lt_norm(p1, 1) == 1);
  CHECK(lt_norm(p1, 2) == frac(9, 8));
  CHECK(lt_norm(density_profile(1, FieldCtx::make(5), 2), 7) == 1);
  CHECK_THROWS_AS(lt_norm(p1, 0), Error);
  // Norms are nondecreasing in t for a probability density.
  const auto p = density_profile(2, FieldCtx::make(3), 2);
  for (int t = 1; t < 5; ++t) CHECK(lt_norm(p, t) <= lt_norm(p, t + 1));
}

TEST_CASE("sup_density") {
  const auto p1 = density_profile(2, FieldCtx::make(2), 1);
  const auto s = sup_density(p1);
  CHECK(s.value == frac(3, 2));
  REQUIRE(s.argmax.size() == 1);
  CHECK(to_string(p1.box(s.argmax[0])) == "(1,0)");
  CHECK(sup_density(density_profile(1, FieldCtx::make(3), 2)).value == 1);

  const auto f3 = FieldCtx::make(3);
  const auto s1 = sup_density(density_profile(2, f3, 1));
  const auto s2 = sup_density(density_profile(2, f3, 2));
  CHECK(s1.value > 0);
  CHECK_FALSE(s1.argmax.empty());
  CHECK(s2.value <= 2 * s1.value);
}

TEST_CASE("mass conservation") {
  for (auto [n, ell, k, M] : {std::tuple{2, 2u, 1u, 1}, {2, 2u, 1u, 3}, {2, 3u, 1u, 2}, {2, 2u, 2u, 1}, {3, 2u, 1u, 1},
                              {1, 5u, 1u, 3}, {2, 5u, 1u, 1}}) {
    CAPTURE(n);
    CAPTURE(ell);
    CAPTURE(M);
    const auto p = density_profile(n, FieldCtx::make(ell, k), M);
    CHECK(p.mass() == 1);
    CHECK(lt_norm(p, 1) == 1);
  }
}

TEST_CASE("refinement consistency") {
  for (auto [ell, M] : {std::pair{2u, 1}, {2u, 2}, {3u, 1}}) {
    const auto field = FieldCtx::make(ell);
    const auto coarse = density_profile(2, field, M);
    const auto fine = density_profile(2, field, M + 1);
    std::vector<Rational> avg(coarse.size(), Rational(0));
    const PointIndexer idx(2, coarse.ctx());
    for (std::uint64_t i = 0; i < fine.size(); ++i) {
      const auto x = fine.box(i);
      CharCoeffs down(coarse.ctx(), {x[1].truncate(M - 1), x[2].truncate(M - 1)});
      avg[idx.index(down)] += fine.value(i) / Rational(ell * ell);
    }
    for (std::uint64_t i = 0; i < coarse.size(); ++i) CHECK(avg[i] == coarse.value(i));
  }
}

TEST_CASE("G_m equivariance of the profile") {
  for (auto [ell, k, M] : {std::tuple{3u, 1u, 2}, {5u, 1u, 2}, {2u, 2u, 1}, {7u, 1u, 1}}) {
    const auto p = density_profile(2, FieldCtx::make(ell, k), M);
    for (auto lambda : p.ctx().field().units()) {
      for (std::uint64_t i = 0; i < p.size(); ++i) CHECK(p.value(weighted_scale(p.box(i), lambda)) == p.value(i));
    }
  }
}

TEST_CASE("anfrs_ratio") {
  const auto f2 = FieldCtx::make(2);
  CHECK(anfrs_ratio(2, f2, 0, 0).ratio == 1);
  CHECK(anfrs_ratio(3, FieldCtx::make(3), 0, 5).ratio == 1);
  const auto r = anfrs_ratio(2, f2, 1, 2);
  CHECK(r.count == 40);
  CHECK(r.count == brute_ellipsoid_count(2, 2, 1));
  CHECK(r.ratio == frac(5, 4));
  CHECK(r.display() == "1.25 (=40/32)");

  const auto r3 = anfrs_ratio(2, FieldCtx::make(3), 1, 2);
  CHECK(r3.count == brute_ellipsoid_count(2, 3, 1));
  CHECK(r3.ratio == Rational(r3.count) * Rational(27) / Rational(6561));

  try {
    anfrs_ratio(2, f2, 1, 1);
    FAIL("expected LevelTooLow");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kLevelTooLow);
  }
  // Larger source levels give the same ratio: the conditions only see t^{an}.
  CHECK(anfrs_ratio(2, f2, 1, 4).ratio == r.ratio);
}

TEST_CASE("insep_probe") {
  const auto f2 = FieldCtx::make(2);
  const auto trace = insep_probe(f2, 3);
  REQUIRE(trace.size() == 3);
  CHECK(trace[0].density == 1);
  CHECK(to_string(trace[1].box) == "(0,t)");
  const auto brute = oracle::brute_fiber_table(2, TruncCtx::make(f2, 1));
  CHECK(trace[1].fiber == brute.at("(0,t)"));
  CHECK(trace[1].density == Rational(trace[1].fiber) / Rational(16));
  CHECK_NOTHROW(insep_probe(FieldCtx::make(2, 2), 2));
  try {
    insep_probe(FieldCtx::make(3), 2);
    FAIL("expected WrongCharacteristic");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kWrongCharacteristic);
  }
}

TEST_CASE("sup stability for n=2, ell=3") {
  const auto rep = sup_stability(2, FieldCtx::make(3), {1, 2, 3});
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) CHECK(row.sup <= 2 * rep.rows.back().sup);
  CHECK(rep.within_band);
}

TEST_CASE("profile csv and summary") {
  const auto p = density_profile(2, FieldCtx::make(2), 1);
  CHECK(profile_csv(p) ==
        "c_1,c_2,fiber_count,numerator,denominator_exponent\n"
        "0,0,4,1,0\n"
        "1,0,6,3,1\n"
        "0,1,4,1,0\n"
        "1,1,2,1,1\n");
  const auto j = profile_summary(p, {1, 2});
  CHECK(j.at("sup") == "3/2");
  CHECK(j.at("lt_norms").at("2") == "9/8");
  CHECK(j.at("mass") == "1");
  CHECK(j.at("argmax") == nlohmann::json::array({"(1,0)"}));
}
