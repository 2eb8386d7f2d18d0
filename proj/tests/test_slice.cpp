#include "jetforge/error.hpp"
#include "jetforge/slice.hpp"

#include <doctest.h>

#include <numeric>
#include <set>

using namespace jetforge;

namespace {

int sum_of(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

}  // namespace

TEST_CASE("partitions") {
  CHECK(partitions_of(1).size() == 1);
  CHECK(partitions_of(4).size() == 5);
  CHECK(partitions_of(5).size() == 7);
  CHECK(partitions_of(6).size() == 11);
  CHECK(to_string(partitions_of(3)[0]) == "(3)");
  CHECK(to_string(partitions_of(3)[1]) == "(2,1)");
  CHECK(to_string(partitions_of(3)[2]) == "(1,1,1)");
  CHECK(parse_partition("(3,1,1)") == Partition({3, 1, 1}));
  CHECK(parse_partition("2,2") == Partition({2, 2}));
  CHECK_THROWS_AS(Partition({1, 2}), Error);
  CHECK_THROWS_AS(Partition({2, 0}), Error);
  CHECK_THROWS_AS(parse_partition("2,x"), Error);
  CHECK(Partition({2, 1}).is_subregular());
  CHECK(Partition({1, 1}).is_subregular());
  CHECK_FALSE(Partition({2, 2}).is_subregular());
}

TEST_CASE("jordan_matrix") {
  const auto f2 = FieldCtx::make(2);
  CHECK(jordan_matrix(Partition({2}), f2) == JetMatrix::from_codes(2, TruncCtx::make(f2, 0), {0, 1, 0, 0}));
  CHECK(jordan_matrix(Partition({1, 1}), f2) == JetMatrix::from_codes(2, TruncCtx::make(f2, 0), {0, 0, 0, 0}));
  const auto f3 = FieldCtx::make(3);
  CHECK(jordan_matrix(Partition({2, 1}), f3) ==
        JetMatrix::from_codes(3, TruncCtx::make(f3, 0), {0, 1, 0, 0, 0, 0, 0, 0, 0}));
  for (const auto& p : partitions_of(5)) CHECK(is_nilpotent_jet(jordan_matrix(p, f3)));
}

TEST_CASE("slice_basis examples") {
  for (int n = 1; n <= 6; ++n) {
    const auto b = slice_basis(Partition({n}), SliceKind::kL);
    std::vector<int> expect(static_cast<std::size_t>(n));
    std::iota(expect.begin(), expect.end(), 1);
    CHECK(b.exponents() == expect);
    CHECK(sum_of(b.exponents()) == n * (n + 1) / 2);
  }
  CHECK(sum_of(slice_basis(Partition({2, 1}), SliceKind::kL).exponents()) == 7);
  const auto b11 = slice_basis(Partition({1, 1}), SliceKind::kL);
  CHECK(b11.dim() == 4);
  CHECK(b11.exponents() == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("slice entries follow the block layout") {
  const auto b = slice_basis(Partition({3, 1}), SliceKind::kL);
  std::set<std::pair<int, int>> pos;
  for (const auto& e : b.entries) pos.insert({e.row, e.col});
  // block (1,1): rows 1..3 of column 1; (1,2): row 3 of column 4; (2,1): row 4, column 1; (2,2): (4,4)
  CHECK(pos == std::set<std::pair<int, int>>{{0, 0}, {1, 0}, {2, 0}, {2, 3}, {3, 0}, {3, 3}});
}

TEST_CASE("exponents match conjugation by the torus") {
  // lambda * t(lambda) E t(lambda)^-1 = lambda^e E for every slice unit vector E.
  const auto f = FieldCtx::make(7);
  const auto ctx = TruncCtx::make(f, 0);
  const FieldElem lambda{3};
  for (int n = 1; n <= 5; ++n) {
    for (const auto& p : partitions_of(n)) {
      JetMatrix t(n, ctx);
      JetMatrix t_inv(n, ctx);
      for (std::size_t b = 0; b < p.parts().size(); ++b) {
        for (int r = 0; r < p.parts()[b]; ++r) {
          const int g = p.block_starts()[b] + r;
          t.coeff(g, g, 0) = f.pow(lambda, static_cast<std::uint64_t>(r));
          t_inv.coeff(g, g, 0) = f.inv(t.coeff(g, g, 0));
        }
      }
      // The Jordan matrix is fixed by the same action.
      const auto x = jordan_matrix(p, ctx);
      CHECK(mat_scale(mat_mul(mat_mul(t, x), t_inv), TruncSeries::constant(ctx, lambda)) == x);
      for (const auto& e : slice_basis(p, SliceKind::kL).entries) {
        JetMatrix unit(n, ctx);
        unit.coeff(e.row, e.col, 0) = f.one();
        const auto acted = mat_scale(mat_mul(mat_mul(t, unit), t_inv), TruncSeries::constant(ctx, lambda));
        CHECK(acted == mat_scale(unit, TruncSeries::constant(ctx, f.pow(lambda, static_cast<std::uint64_t>(e.exponent)))));
      }
    }
  }
}

TEST_CASE("exponent_sum examples") {
  CHECK(exponent_sum(Partition({3}), SliceKind::kL).direct == 6);
  CHECK(exponent_sum(Partition({2, 1}), SliceKind::kL).direct == 7);
  const auto s22 = exponent_sum(Partition({2, 2}), SliceKind::kL);
  CHECK(s22.direct == 12);
  CHECK(s22.agrees);
}

TEST_CASE("slice invariants for all partitions of n <= 6") {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& p : partitions_of(n)) {
      CAPTURE(to_string(p));
      const auto b = slice_basis(p, SliceKind::kL);
      int mins = 0;
      for (int a : p.parts()) {
        for (int c : p.parts()) mins += std::min(a, c);
      }
      CHECK(b.dim() == mins);
      for (int e : b.exponents()) CHECK(e >= 1);
      int weighted = 0;
      for (int j = 0; j < p.length(); ++j) weighted += j * p.parts()[j];
      const int sum = sum_of(b.exponents());
      CHECK(sum - n * (n + 1) / 2 == weighted);
      CHECK((sum == n * (n + 1) / 2) == p.is_regular());
      CHECK(exponent_sum(p, SliceKind::kL).agrees);
      CHECK(exponent_sum(p, SliceKind::kM).agrees);

      const auto bm = slice_basis(p, SliceKind::kM);
      CHECK(bm.has_center);
      CHECK(bm.center_exponent == 1);
      CHECK(bm.dropped_corner == (p.parts().back() == 1));
      CHECK(bm.dim() == b.dim() + (bm.dropped_corner ? 0 : 1));
      for (const auto& e : bm.entries) CHECK_FALSE((e.row == n - 1 && e.col == n - 1));
    }
  }
}

TEST_CASE("transversality for every partition of n <= 5, q in {2,3,5}") {
  for (std::uint32_t ell : {2u, 3u, 5u}) {
    const auto f = FieldCtx::make(ell);
    for (int n = 1; n <= 5; ++n) {
      for (const auto& p : partitions_of(n)) {
        CAPTURE(to_string(p));
        const auto a = audit_transversality(p, f);
        CHECK(a.pass);
        CHECK(a.rank == static_cast<std::size_t>(n * n));
      }
    }
  }
  const auto a11 = audit_transversality(Partition({1, 1}), FieldCtx::make(2));
  CHECK(a11.bracket_rank == 0);
  CHECK(a11.slice_dim == 4);
}

TEST_CASE("equivariance audits") {
  const auto f2 = FieldCtx::make(2);
  const auto f3 = FieldCtx::make(3);
  CHECK(audit_equivariance(Partition({2}), SliceKind::kL, f2).pass());
  const auto a21 = audit_equivariance(Partition({2, 1}), SliceKind::kL, f3, 0, 100, 7);
  CHECK(a21.pass());
  const auto m21 = audit_equivariance(Partition({2, 1}), SliceKind::kM, f2);
  CHECK(m21.exhaustive);
  CHECK(m21.points == 32);
  CHECK(m21.pass());
  for (const auto& p : partitions_of(3)) {
    CHECK(audit_equivariance(p, SliceKind::kL, FieldCtx::make(5), 1, 200, 3).pass());
    CHECK(audit_equivariance(p, SliceKind::kM, FieldCtx::make(2, 2), 1, 200, 3).pass());
  }
  const auto sampled = audit_equivariance(Partition({1, 1, 1, 1}), SliceKind::kL, f3, 0, 50, 1);
  CHECK_FALSE(sampled.exhaustive);
  CHECK(sampled.points == 50);
  CHECK(sampled.pass());
  CHECK_THROWS_AS(audit_equivariance(Partition({2}), SliceKind::kL, f2, 2), Error);
}

TEST_CASE("orbit jump audits") {
  const auto f2 = FieldCtx::make(2);
  const auto a11 = audit_orbit_jump(Partition({1, 1}), f2);
  CHECK(a11.pass);
  CHECK(a11.base_rank == 0);
  REQUIRE(a11.min_rank);
  CHECK(*a11.min_rank == 2);
  const auto a21 = audit_orbit_jump(Partition({2, 1}), f2);
  CHECK(a21.points == 31);
  CHECK(a21.pass);
  CHECK_FALSE(a21.vacuous());
  for (int n = 1; n <= 3; ++n) {
    const auto r = audit_orbit_jump(Partition({n}), f2);
    CHECK(r.vacuous());
    CHECK(r.pass);
  }
  for (const auto& p : partitions_of(4)) CHECK(audit_orbit_jump(p, f2).pass);
  for (const auto& p : partitions_of(3)) CHECK(audit_orbit_jump(p, FieldCtx::make(3)).pass);
  CHECK_THROWS_AS(audit_orbit_jump(Partition({1, 1, 1, 1, 1}), f2), Error);
}

TEST_CASE("subregular threshold") {
  const auto sub = subregular_threshold(Partition({2, 1}));
  CHECK_FALSE(sub.exceeded);
  CHECK(sub.pass());
  const auto small = subregular_threshold(Partition({1, 1, 1}));
  CHECK(small.exceeded);
  CHECK(small.pass());
  for (int n = 1; n <= 7; ++n) {
    for (const auto& p : partitions_of(n)) {
      CAPTURE(to_string(p));
      CHECK(subregular_threshold(p).pass());
      CHECK(subregular_threshold(p).center_exponent_one);
    }
  }
}

TEST_CASE("weight report export") {
  const auto r = weight_report(Partition({2, 1}), SliceKind::kL);
  CHECK(r.sum == 7);
  CHECK(r.exceeds_l);
  CHECK_FALSE(r.exceeds_m);
  const auto j = to_json(r);
  CHECK(j.at("partition") == "(2,1)");
  CHECK(j.at("exponents") == nlohmann::json::array({1, 1, 1, 2, 2}));
  CHECK(j.at("sum") == 7);
  const auto m = weight_report(Partition({3}), SliceKind::kM);
  CHECK_FALSE(m.certified);
  CHECK(m.sum == 7);
  const auto table = to_table({r, m});
  CHECK(table.find("(2,1)") != std::string::npos);
  CHECK(table.find("(3)") != std::string::npos);
}
