#include "jetforge/counter.hpp"
#include "jetforge/error.hpp"
#include "jetforge/record.hpp"
#include "oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

using namespace jetforge;

namespace {

TruncCtx ring(std::uint32_t ell, int m, std::uint32_t k = 1) { return TruncCtx::make(FieldCtx::make(ell, k), m); }

CountQuery nilcone_query(std::uint32_t ell, int m, std::uint32_t k = 1, int n = 2) {
  CountQuery q;
  q.n = n;
  q.ell = ell;
  q.k = k;
  q.m = m;
  q.target = TargetKind::kNilCone;
  return q;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "jetforge_test_counter";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

std::map<std::string, std::uint64_t> keyed(const FiberTable& t) {
  PointIndexer idx(t.n, t.ctx);
  std::map<std::string, std::uint64_t> out;
  for (std::uint64_t i = 0; i < t.counts.size(); ++i) {
    if (t.counts[i] != 0) out[to_string(idx.point(i))] = t.counts[i];
  }
  return out;
}

}  // namespace

TEST_CASE("count_jet_fiber small examples") {
  const auto r = ring(2, 0);
  CHECK(count_jet_fiber(2, r, parse_char_coeffs(r, 2, "0,0")) == 4);
  CHECK(count_jet_fiber(2, r, parse_char_coeffs(r, 2, "1,0")) == 6);
  CHECK(count_jet_fiber(2, r, parse_char_coeffs(r, 2, "1,1")) == 2);
  CHECK(count_jet_fiber(2, r, parse_char_coeffs(r, 2, "0,1")) == 4);
  CHECK_THROWS_AS(count_jet_fiber(2, r, parse_char_coeffs(ring(2, 1), 2, "0,0")), Error);
}

TEST_CASE("count_nilcone_jets small examples") {
  CHECK(count_nilcone_jets(2, ring(2, 0)) == 4);
  CHECK(count_nilcone_jets(2, ring(2, 1)) == 20);
  CHECK(count_nilcone_jets(2, ring(3, 0)) == 9);
  // q^{n^2-n} at m = 0
  CHECK(count_nilcone_jets(2, ring(5, 0)) == 25);
  CHECK(count_nilcone_jets(3, ring(2, 0)) == 64);
}

TEST_CASE("count_gi_jets examples and total mass") {
  const auto r = ring(2, 0);
  CHECK(count_gi_jets(2, r, 1) == 16);
  CHECK(count_gi_jets(2, r, 2) == 72);
  for (auto [n, ell, m] : {std::tuple{2, 2u, 0}, {2, 2u, 1}, {2, 3u, 0}, {2, 3u, 1}, {3, 2u, 0}, {2, 5u, 0}}) {
    CAPTURE(n);
    CAPTURE(ell);
    CAPTURE(m);
    const auto c = ring(ell, m);
    CHECK(count_gi_jets(n, c, 1) == big_pow(ell, static_cast<unsigned>((m + 1) * n * n)));
  }
  CHECK(count_gi_jets(2, ring(2, 0, 2), 1) == big_pow(4, 4));
}

TEST_CASE("fiber table agrees with the Leibniz oracle") {
  for (auto [n, ell, m] : {std::tuple{2, 2u, 0}, {2, 2u, 1}, {2, 3u, 0}, {2, 3u, 1}, {3, 2u, 0}}) {
    CAPTURE(n);
    CAPTURE(ell);
    CAPTURE(m);
    const auto c = ring(ell, m);
    const auto table = fiber_table(n, c);
    CHECK(keyed(table) == oracle::brute_fiber_table(n, c));
    CHECK(table.mass() == big_pow(ell, static_cast<unsigned>((m + 1) * n * n)));
  }
  const auto f4 = ring(2, 0, 2);
  CHECK(keyed(fiber_table(2, f4)) == oracle::brute_fiber_table(2, f4));
}

TEST_CASE("fiber table csv order at n=2, q=2, m=0") {
  const auto t = fiber_table(2, ring(2, 0));
  CHECK(t.counts == std::vector<std::uint64_t>{4, 6, 4, 2});
}

TEST_CASE("per-fiber counts agree with the fiber table") {
  for (auto [ell, m] : {std::pair{2u, 1}, {3u, 1}}) {
    const auto c = ring(ell, m);
    const auto t = fiber_table(2, c);
    PointIndexer idx(2, c);
    for (std::uint64_t i = 0; i < t.counts.size(); ++i) {
      CAPTURE(to_string(idx.point(i)));
      CHECK(count_jet_fiber(2, c, idx.point(i)) == t.counts[i]);
    }
  }
}

TEST_CASE("threaded fiber table equals the serial one") {
  const auto c = ring(3, 1);
  CHECK(fiber_table(2, c, 3).counts == fiber_table(2, c, 1).counts);
}

TEST_CASE("gisum equals brute-force tuple counting for i <= 3") {
  const auto c = ring(2, 0);
  std::vector<std::string> polys;
  for (std::uint64_t i = 0; i < 16; ++i) polys.push_back(to_string(oracle::leibniz_charpoly(oracle::matrix_from_index(2, c, i))));
  std::uint64_t pairs = 0;
  std::uint64_t triples = 0;
  for (int a = 0; a < 16; ++a) {
    for (int b = 0; b < 16; ++b) {
      if (polys[a] != polys[b]) continue;
      ++pairs;
      for (int d = 0; d < 16; ++d) triples += polys[a] == polys[d];
    }
  }
  CHECK(count_gi_jets(2, c, 1) == 16);
  CHECK(count_gi_jets(2, c, 2) == pairs);
  CHECK(count_gi_jets(2, c, 3) == triples);
}

TEST_CASE("refinement law") {
  for (auto [ell, m] : {std::pair{2u, 0}, {2u, 1}, {3u, 0}}) {
    CAPTURE(ell);
    CAPTURE(m);
    const auto lo = ring(ell, m);
    const auto hi = ring(ell, m + 1);
    const auto t_lo = fiber_table(2, lo);
    const auto t_hi = fiber_table(2, hi);
    PointIndexer idx_lo(2, lo);
    PointIndexer idx_hi(2, hi);
    std::vector<std::uint64_t> sums(t_lo.counts.size(), 0);
    for (std::uint64_t i = 0; i < t_hi.counts.size(); ++i) {
      const auto x = idx_hi.point(i);
      CharCoeffs down(lo, {x[1].truncate(m), x[2].truncate(m)});
      sums[idx_lo.index(down)] += t_hi.counts[i];
    }
    const std::uint64_t q_n2 = static_cast<std::uint64_t>(ell) * ell * ell * ell;
    for (std::uint64_t i = 0; i < sums.size(); ++i) CHECK(sums[i] == q_n2 * t_lo.counts[i]);
  }
}

TEST_CASE("homothety invariance") {
  for (auto [ell, m, k] : {std::tuple{3u, 1, 1u}, {5u, 0, 1u}, {2u, 0, 2u}, {3u, 0, 2u}}) {
    const auto c = ring(ell, m, k);
    const auto t = fiber_table(2, c);
    PointIndexer idx(2, c);
    for (auto lambda : c.field().units()) {
      for (std::uint64_t i = 0; i < t.counts.size(); ++i) {
        CHECK(t.counts[idx.index(weighted_scale(idx.point(i), lambda))] == t.counts[i]);
      }
    }
  }
}

TEST_CASE("query guard") {
  auto q = nilcone_query(2, 4, 1, 3);  // 2^45 matrices
  CHECK_THROWS_AS(q.validate(), Error);
  try {
    q.validate();
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kTooLarge);
  }
  CHECK_NOTHROW(nilcone_query(2, 4).validate());
  CountQuery g = nilcone_query(2, 0);
  g.target = TargetKind::kGiSum;
  g.power = 0;
  CHECK_THROWS_AS(g.validate(), Error);
  CountQuery f = nilcone_query(2, 0);
  f.target = TargetKind::kFiber;
  CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("shard ranges partition the base layer") {
  for (std::uint64_t base : {16ull, 81ull, 7ull}) {
    for (int s = 1; s <= 9; ++s) {
      std::uint64_t next = 0;
      for (int j = 0; j < s; ++j) {
        auto r = shard_range(base, s, j);
        CHECK(r.begin == next);
        next = r.end;
      }
      CHECK(next == base);
    }
  }
  CHECK_THROWS_AS(shard_range(16, 4, 4), Error);
  CHECK_THROWS_AS(shard_range(16, 4, -1), Error);
  CHECK_THROWS_AS(shard_range(16, 0, 0), Error);
}

TEST_CASE("sharded counts sum to the unsharded count") {
  const auto q = nilcone_query(2, 1);
  CHECK(count_sharded(q, 1, 0).count == count_nilcone_jets(2, ring(2, 1)));
  BigInt total = 0;
  std::vector<CountRecord> parts;
  for (int j = 0; j < 4; ++j) {
    parts.push_back(count_sharded(q, 4, j));
    total += parts.back().count;
  }
  CHECK(total == 20);
  const auto combined = combine_shards(q, parts);
  CHECK(combined.count == 20);
  CHECK(combined.subtotals.size() == 4);
  // Re-running any shard reproduces its subtotal.
  CHECK(count_sharded(q, 4, 2).count == parts[2].count);
  parts.pop_back();
  CHECK_THROWS_AS(combine_shards(q, parts), Error);
  CHECK(run_count(q, 5, 2).count == 20);
}

TEST_CASE("sharded gisum and fiber table") {
  CountQuery q = nilcone_query(3, 1);
  q.target = TargetKind::kGiSum;
  q.power = 2;
  const auto c = ring(3, 1);
  CHECK(run_count(q, 7, 2).count == count_gi_jets(2, c, 2));
  q.target = TargetKind::kFiberTable;
  const auto r = run_count(q, 3, 1);
  CHECK(r.table == fiber_table(2, c).counts);
  CHECK(r.count == big_pow(3, 8));
}

TEST_CASE("fiber target through the sharded driver") {
  CountQuery q = nilcone_query(3, 1);
  q.target = TargetKind::kFiber;
  const auto c = ring(3, 1);
  q.x = parse_char_coeffs(c, 2, "1+t,2t");
  CHECK(run_count(q, 4, 1).count == count_jet_fiber(2, c, *q.x));
}

TEST_CASE("kill and resume reproduces the subtotal") {
  const auto q = nilcone_query(3, 1);
  const auto full = count_sharded(q, 3, 1).count;
  const auto path = scratch("resume.jsonl");
  {
    Journal j(path);
    ShardOptions opt;
    opt.journal = &j;
    opt.checkpoint_interval = 4;
    opt.stop_after = 11;
    const auto partial = count_sharded(q, 3, 1, opt);
    CHECK_FALSE(partial.complete);
    CHECK(partial.next_base == shard_range(81, 3, 1).begin + 11);
  }
  {
    Journal j(path);
    auto cp = j.find(q, 3, 1);
    REQUIRE(cp);
    CHECK_FALSE(cp->complete);
    ShardOptions opt;
    opt.journal = &j;
    opt.stop_after = 5;
    CHECK_FALSE(count_sharded(q, 3, 1, opt).complete);
  }
  const auto resumed = count_sharded(q, 3, 1, path);
  CHECK(resumed.complete);
  CHECK(resumed.count == full);
  // A completed shard is served from the journal.
  CHECK(count_sharded(q, 3, 1, path).count == full);
}

TEST_CASE("kill and resume for a table target") {
  CountQuery q = nilcone_query(2, 1);
  q.target = TargetKind::kFiberTable;
  const auto path = scratch("resume_table.jsonl");
  {
    Journal j(path);
    ShardOptions opt;
    opt.journal = &j;
    opt.stop_after = 3;
    count_sharded(q, 2, 0, opt);
  }
  const auto r0 = count_sharded(q, 2, 0, path);
  const auto r1 = count_sharded(q, 2, 1, path);
  CHECK(combine_shards(q, {r0, r1}).table == fiber_table(2, ring(2, 1)).counts);
}

TEST_CASE("corrupt checkpoint is rejected") {
  const auto path = scratch("corrupt.jsonl");
  {
    std::ofstream out(path);
    out << "{\"schema_version\": 1, \"query\": \n";
  }
  try {
    Journal j(path);
    FAIL("expected CorruptCheckpoint");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kCorruptCheckpoint);
  }
  {
    std::ofstream out(path);
    auto j = to_json(count_sharded(nilcone_query(2, 0), 1, 0));
    j["schema_version"] = 99;
    out << j.dump() << "\n";
  }
  CHECK_THROWS_AS(Journal{path}, Error);
}

TEST_CASE("record json round trip") {
  CountQuery q = nilcone_query(2, 0);
  q.target = TargetKind::kFiber;
  q.x = parse_char_coeffs(ring(2, 0), 2, "1,0");
  CountRecord r = count_sharded(q, 1, 0);
  r.count = parse_decimal("123456789012345678901234567890");
  r.subtotals = {1, parse_decimal("98765432109876543210")};
  const auto j = to_json(r);
  CHECK(j.at("count").is_string());
  CHECK(j.at("schema_version") == 1);
  const auto back = record_from_json(nlohmann::json::parse(j.dump()));
  CHECK(to_json(back) == j);
  CHECK(back.count == r.count);
  CHECK(to_string(*back.query.x) == "(1,0)");

  CountQuery t = nilcone_query(2, 0);
  t.target = TargetKind::kFiberTable;
  const auto rt = count_sharded(t, 1, 0);
  CHECK(record_from_json(to_json(rt)).table == rt.table);

  auto missing = j;
  missing.erase("schema_version");
  CHECK_THROWS_AS(record_from_json(missing), Error);
}

TEST_CASE("jsonl write and read") {
  const auto path = scratch("records.jsonl");
  std::vector<CountRecord> recs = {count_sharded(nilcone_query(2, 0), 1, 0), count_sharded(nilcone_query(2, 1), 1, 0)};
  write_jsonl(path, recs);
  const auto back = read_jsonl(path);
  REQUIRE(back.size() == 2);
  CHECK(back[1].count == 20);
  CHECK_THROWS_AS(read_jsonl(scratch("absent.jsonl")), Error);
}

TEST_CASE("fit_dimension") {
  std::vector<CountRecord> recs;
  for (std::uint32_t k : {1u, 2u, 3u}) {
    CountRecord r;
    r.query = nilcone_query(2, 0, k);
    r.count = count_nilcone_jets(2, ring(2, 0, k));
    recs.push_back(r);
  }
  CHECK(recs[0].count == 4);
  CHECK(recs[1].count == 16);
  CHECK(recs[2].count == 64);
  auto fit = fit_dimension(recs);
  REQUIRE(fit.slope);
  CHECK(*fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.d_expected == 2.0);

  CountRecord one;
  one.query = nilcone_query(2, 1);
  one.count = 20;
  auto single = fit_dimension({one});
  CHECK_FALSE(single.slope);
  REQUIRE(single.slope_error);
  CHECK(single.slope_error->rfind("InsufficientData", 0) == 0);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.rows[0].c_m == doctest::Approx(std::log2(20.0) - 2.0).epsilon(1e-12));
  CHECK(single.rows[0].c_m == doctest::Approx(2.3219).epsilon(1e-4));

  CHECK_THROWS_AS(fit_dimension({}), Error);
  CountRecord zero = one;
  zero.count = 0;
  CHECK_THROWS_AS(fit_dimension({zero}), Error);
}

TEST_CASE("nilcone exponent stays bounded for n=2, q=2, m <= 4") {
  std::vector<CountRecord> recs;
  for (int m = 0; m <= 4; ++m) {
    CountRecord r;
    r.query = nilcone_query(2, m);
    r.count = count_nilcone_jets(2, ring(2, m));
    recs.push_back(r);
  }
  const auto fit = fit_dimension(recs);
  for (const auto& row : fit.rows) {
    CAPTURE(row.m);
    CHECK(std::isfinite(row.c_m));
    CHECK(row.c_m <= 2.5);
  }
}
