#include "jetforge/counter.hpp"

#include "jetforge/error.hpp"

#include <thread>

namespace jetforge {
namespace {

constexpr std::uint64_t kMaxJets = std::uint64_t{1} << 40;

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t limit, const std::string& what) {
  std::uint64_t v = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    v *= base;
    if (v > limit) throw Error(Errc::kTooLarge, what);
  }
  return v;
}

// Writes the base-layer matrix for `index` into coefficient 0 of each entry.
void load_base(std::uint64_t index, int n, int len, std::uint32_t q, FieldElem* mat) {
  for (int p = n * n - 1; p >= 0; --p) {
    mat[p * len] = FieldElem{static_cast<std::uint32_t>(index % q)};
    index /= q;
  }
}

// Depth-first over layers 1..m with a per-coefficient predicate; the t^j
// coefficients of the charpoly are final once A_0..A_j are fixed.
template <typename Keep>
std::uint64_t layered_count(int n, const TruncCtx& ctx, std::uint64_t begin, std::uint64_t end, const Keep& keep,
                            std::uint64_t subtotal, const Progress& progress) {
  const int m = ctx.m();
  const std::uint32_t q = ctx.field().q();
  const int cells = n * n;

  std::vector<std::vector<FieldElem>> mats(static_cast<std::size_t>(m + 1));
  std::vector<std::vector<FieldElem>> outs(static_cast<std::size_t>(m + 1));
  std::vector<CharpolyKernel> kernels;
  kernels.reserve(static_cast<std::size_t>(m + 1));
  for (int j = 0; j <= m; ++j) {
    mats[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(cells * (j + 1)), FieldElem{0});
    outs[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(n * (j + 1)), FieldElem{0});
    kernels.emplace_back(n, ctx.with_order(j));
  }

  auto layer_ok = [&](int j) {
    const auto& out = outs[static_cast<std::size_t>(j)];
    for (int i = 1; i <= n; ++i) {
      if (!keep(i, j, out[static_cast<std::size_t>((i - 1) * (j + 1) + j)])) return false;
    }
    return true;
  };

  std::uint64_t count = subtotal;
  auto descend = [&](auto&& self, int j) -> void {
    auto& mat = mats[static_cast<std::size_t>(j)];
    const auto& prev = mats[static_cast<std::size_t>(j - 1)];
    for (int p = 0; p < cells; ++p) {
      std::copy_n(prev.data() + p * j, j, mat.data() + p * (j + 1));
      mat[static_cast<std::size_t>(p * (j + 1) + j)] = FieldElem{0};
    }
    auto& kernel = kernels[static_cast<std::size_t>(j)];
    auto& out = outs[static_cast<std::size_t>(j)];
    while (true) {
      kernel.run(mat.data(), out.data());
      if (layer_ok(j)) {
        if (j == m) {
          ++count;
        } else {
          self(self, j + 1);
        }
      }
      int p = cells - 1;
      for (; p >= 0; --p) {
        auto& c = mat[static_cast<std::size_t>(p * (j + 1) + j)];
        if (++c.code < q) break;
        c.code = 0;
      }
      if (p < 0) break;
    }
  };

  auto& base = mats[0];
  for (std::uint64_t b = begin; b < end; ++b) {
    load_base(b, n, 1, q, base.data());
    kernels[0].run(base.data(), outs[0].data());
    if (layer_ok(0)) {
      if (m == 0) {
        ++count;
      } else {
        descend(descend, 1);
      }
    }
    if (progress.interval != 0 && progress.report && (b + 1 - begin) % progress.interval == 0 && b + 1 < end) {
      progress.report(b + 1, count, nullptr);
    }
  }
  return count;
}

}  // namespace

std::string_view target_name(TargetKind kind) noexcept {
  switch (kind) {
    case TargetKind::kNilCone: return "nilcone";
    case TargetKind::kFiber: return "fiber";
    case TargetKind::kGiSum: return "gisum";
    case TargetKind::kFiberTable: return "fiber_table";
  }
  return "?";
}

TargetKind parse_target(std::string_view name) {
  if (name == "nilcone") return TargetKind::kNilCone;
  if (name == "fiber") return TargetKind::kFiber;
  if (name == "gisum") return TargetKind::kGiSum;
  if (name == "fiber_table" || name == "fiber-table") return TargetKind::kFiberTable;
  throw Error(Errc::kBadConfig, "unknown target '" + std::string(name) + "'");
}

TruncCtx CountQuery::ctx() const { return TruncCtx::make(FieldCtx::make(ell, k), m); }

std::uint32_t CountQuery::q() const { return FieldCtx::make(ell, k).q(); }

void CountQuery::validate() const {
  if (n < 1) throw Error(Errc::kBadConfig, "n must be >= 1");
  const auto c = ctx();
  checked_pow(c.field().q(), static_cast<std::uint64_t>((m + 1) * n * n), kMaxJets,
              "q^((m+1)n^2) exceeds 2^40; shard the job");
  if (target == TargetKind::kGiSum && power < 1) throw Error(Errc::kBadConfig, "power i must be >= 1");
  if (target == TargetKind::kFiber) {
    if (!x) throw Error(Errc::kBadConfig, "fiber target needs x");
    if (x->n != n || !(x->ctx == c)) throw Error(Errc::kCtxMismatch, "x must be a point of c(R_m) for this n");
  }
  if (target == TargetKind::kGiSum || target == TargetKind::kFiberTable) PointIndexer(n, c);
}

std::uint64_t CountQuery::base_layer_size() const {
  return checked_pow(q(), static_cast<std::uint64_t>(n * n), kMaxJets, "base layer too large");
}

PointIndexer::PointIndexer(int n, TruncCtx ctx) : n_(n), ctx_(std::move(ctx)) {
  const std::uint64_t q = ctx_.field().q();
  size_ = checked_pow(q, static_cast<std::uint64_t>(n * ctx_.len()), kMaxCells, "fiber table exceeds 2^26 cells");
  weights_.resize(static_cast<std::size_t>(n * ctx_.len()));
  std::uint64_t w = 1;
  for (auto& v : weights_) {
    v = w;
    w *= q;
  }
}

std::uint64_t PointIndexer::index(const CharCoeffs& x) const {
  if (x.n != n_ || !(x.ctx == ctx_)) throw Error(Errc::kCtxMismatch, "point does not belong to this table");
  std::uint64_t idx = 0;
  std::size_t w = 0;
  for (int i = 1; i <= n_; ++i) {
    for (int j = 0; j < ctx_.len(); ++j) idx += x[i][j].code * weights_[w++];
  }
  return idx;
}

CharCoeffs PointIndexer::point(std::uint64_t index) const {
  CharCoeffs x(n_, ctx_);
  const std::uint32_t q = ctx_.field().q();
  for (int i = 1; i <= n_; ++i) {
    for (int j = 0; j < ctx_.len(); ++j) {
      x[i][j] = FieldElem{static_cast<std::uint32_t>(index % q)};
      index /= q;
    }
  }
  return x;
}

BigInt FiberTable::mass() const {
  BigInt total = 0;
  for (auto c : counts) total += c;
  return total;
}

BigInt FiberTable::power_sum(int i) const {
  if (i < 1) throw Error(Errc::kBadConfig, "power i must be >= 1");
  BigInt total = 0;
  for (auto c : counts) {
    if (c != 0) total += boost::multiprecision::pow(BigInt(c), static_cast<unsigned>(i));
  }
  return total;
}

ShardRange shard_range(std::uint64_t base_size, int shards, int shard_id) {
  if (shards < 1 || shard_id < 0 || shard_id >= shards) {
    throw Error(Errc::kShardOutOfRange, "shard " + std::to_string(shard_id) + " of " + std::to_string(shards));
  }
  const auto split = [&](int j) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(base_size) * static_cast<unsigned>(j)) /
                                      static_cast<unsigned>(shards));
  };
  return {split(shard_id), split(shard_id + 1)};
}

std::uint64_t count_fiber_range(const CountQuery& query, std::uint64_t begin, std::uint64_t end, std::uint64_t subtotal,
                                const Progress& progress) {
  const auto ctx = query.ctx();
  if (query.target == TargetKind::kNilCone) {
    return layered_count(query.n, ctx, begin, end, [](int, int, FieldElem v) { return v.code == 0; }, subtotal,
                         progress);
  }
  if (query.target != TargetKind::kFiber || !query.x) throw Error(Errc::kBadConfig, "not a single-fiber query");
  const CharCoeffs& x = *query.x;
  return layered_count(query.n, ctx, begin, end, [&x](int i, int j, FieldElem v) { return x[i][j] == v; }, subtotal,
                       progress);
}

void fiber_table_range(int n, const TruncCtx& ctx, std::uint64_t begin, std::uint64_t end,
                       std::vector<std::uint64_t>& counts, const Progress& progress) {
  const PointIndexer indexer(n, ctx);
  if (counts.size() != indexer.size()) throw Error(Errc::kBadConfig, "table has the wrong size");
  const int len = ctx.len();
  const int m = ctx.m();
  const std::uint32_t q = ctx.field().q();
  const int cells = n * n;

  std::vector<FieldElem> mat(static_cast<std::size_t>(cells * len));
  std::vector<FieldElem> out(static_cast<std::size_t>(n * len));
  CharpolyKernel kernel(n, ctx);
  // Least significant digit first: layer m down to 1, entries last to first.
  std::vector<std::size_t> digits;
  for (int j = m; j >= 1; --j) {
    for (int p = cells - 1; p >= 0; --p) digits.push_back(static_cast<std::size_t>(p * len + j));
  }

  for (std::uint64_t b = begin; b < end; ++b) {
    std::fill(mat.begin(), mat.end(), FieldElem{0});
    load_base(b, n, len, q, mat.data());
    while (true) {
      kernel.run(mat.data(), out.data());
      ++counts[indexer.index_flat(out.data())];
      std::size_t d = 0;
      for (; d < digits.size(); ++d) {
        auto& c = mat[digits[d]];
        if (++c.code < q) break;
        c.code = 0;
      }
      if (d == digits.size()) break;
    }
    if (progress.interval != 0 && progress.report && (b + 1 - begin) % progress.interval == 0 && b + 1 < end) {
      std::uint64_t mass = 0;
      for (auto c : counts) mass += c;
      progress.report(b + 1, mass, &counts);
    }
  }
}

std::uint64_t count_filtered_range(int n, const TruncCtx& ctx, const CoefficientFilter& keep, std::uint64_t begin,
                                   std::uint64_t end) {
  return layered_count(n, ctx, begin, end, keep, 0, Progress{});
}

BigInt count_jet_fiber(int n, const TruncCtx& ctx, const CharCoeffs& x) {
  CountQuery query{n, ctx.field().ell(), ctx.field().k(), ctx.m(), TargetKind::kFiber, x, 1};
  query.validate();
  return count_fiber_range(query, 0, query.base_layer_size());
}

BigInt count_nilcone_jets(int n, const TruncCtx& ctx) {
  CountQuery query{n, ctx.field().ell(), ctx.field().k(), ctx.m(), TargetKind::kNilCone, std::nullopt, 1};
  query.validate();
  return count_fiber_range(query, 0, query.base_layer_size());
}

FiberTable fiber_table(int n, const TruncCtx& ctx, int threads) {
  CountQuery query{n, ctx.field().ell(), ctx.field().k(), ctx.m(), TargetKind::kFiberTable, std::nullopt, 1};
  query.validate();
  const PointIndexer indexer(n, ctx);
  const std::uint64_t base = query.base_layer_size();
  threads = std::max(1, std::min<int>(threads, static_cast<int>(base)));
  std::vector<std::vector<std::uint64_t>> partial(static_cast<std::size_t>(threads),
                                                  std::vector<std::uint64_t>(indexer.size(), 0));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) {
      pool.emplace_back([&, t] {
        const auto r = shard_range(base, threads, t);
        fiber_table_range(n, ctx, r.begin, r.end, partial[static_cast<std::size_t>(t)]);
      });
    }
    const auto r = shard_range(base, threads, 0);
    fiber_table_range(n, ctx, r.begin, r.end, partial[0]);
  }
  FiberTable table{n, ctx, std::move(partial[0])};
  for (std::size_t t = 1; t < partial.size(); ++t) {
    for (std::size_t i = 0; i < table.counts.size(); ++i) table.counts[i] += partial[t][i];
  }
  return table;
}

BigInt count_gi_jets(int n, const TruncCtx& ctx, int i, int threads) {
  return fiber_table(n, ctx, threads).power_sum(i);
}

}  // namespace jetforge
