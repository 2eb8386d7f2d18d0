#pragma once

#include "jetforge/matrix.hpp"
#include "jetforge/numeric.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace jetforge {

enum class TargetKind { kNilCone, kFiber, kGiSum, kFiberTable };

std::string_view target_name(TargetKind kind) noexcept;  // "nilcone", "fiber", "gisum", "fiber_table"
TargetKind parse_target(std::string_view name);          // throws kBadConfig

struct CountQuery {
  int n = 2;
  std::uint32_t ell = 2;
  std::uint32_t k = 1;
  int m = 0;
  TargetKind target = TargetKind::kNilCone;
  std::optional<CharCoeffs> x;  // kFiber only
  int power = 1;                // kGiSum only

  TruncCtx ctx() const;
  std::uint32_t q() const;
  // Re-checks every guard: q^{(m+1)n^2} <= 2^40, power >= 1, x present and
  // shaped for kFiber. Throws kTooLarge / kBadConfig / kCtxMismatch.
  void validate() const;
  std::uint64_t base_layer_size() const;  // q^{n^2}
};

// Dense table over c(R_m). Index of x = sum over i = 1..n, j = 0..m of
// code(c_i[j]) * q^{(i-1)(m+1) + j}; c_1's constant term varies fastest.
class PointIndexer {
 public:
  PointIndexer(int n, TruncCtx ctx);  // throws kTooLarge above kMaxCells
  static constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 26;

  std::uint64_t size() const noexcept { return size_; }
  int n() const noexcept { return n_; }
  const TruncCtx& ctx() const noexcept { return ctx_; }
  std::uint64_t index(const CharCoeffs& x) const;
  // Same layout as CharpolyKernel output.
  std::uint64_t index_flat(const FieldElem* coeffs) const noexcept {
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) idx += coeffs[i].code * weights_[i];
    return idx;
  }
  CharCoeffs point(std::uint64_t index) const;

 private:
  int n_;
  TruncCtx ctx_;
  std::uint64_t size_;
  std::vector<std::uint64_t> weights_;
};

struct FiberTable {
  int n;
  TruncCtx ctx;
  std::vector<std::uint64_t> counts;  // PointIndexer order

  BigInt mass() const;
  BigInt power_sum(int i) const;
};

// Shard j of S covers base-layer indices [j*B/S, (j+1)*B/S), B = q^{n^2};
// base index digits are the n^2 entries of A_0 row-major, most significant first.
struct ShardRange {
  std::uint64_t begin;
  std::uint64_t end;
};
ShardRange shard_range(std::uint64_t base_size, int shards, int shard_id);  // throws kShardOutOfRange

// Progress callback: (next base index, subtotal so far, partial table or
// nullptr). Called after every `interval` base indices.
struct Progress {
  std::uint64_t interval = 0;  // 0 disables
  std::function<void(std::uint64_t, std::uint64_t, const std::vector<std::uint64_t>*)> report;
};

// Pure kernels over a base-index range. Fiber / NilCone use layer-by-layer
// pruning: charpoly mod t^{j+1} only depends on A mod t^{j+1}.
std::uint64_t count_fiber_range(const CountQuery& query, std::uint64_t begin, std::uint64_t end,
                                std::uint64_t subtotal = 0, const Progress& progress = {});
// Adds every matrix of the range into `counts` (PointIndexer order).
void fiber_table_range(int n, const TruncCtx& ctx, std::uint64_t begin, std::uint64_t end,
                       std::vector<std::uint64_t>& counts, const Progress& progress = {});

// Matrices A over R_m (m = ctx.m()) whose charpoly coefficients satisfy
// keep(i, j, c_i[j]) at every coefficient, with the base layer restricted
// to [begin, end). Shared by the ellipsoid ratio.
using CoefficientFilter = std::function<bool(int i, int j, FieldElem value)>;
std::uint64_t count_filtered_range(int n, const TruncCtx& ctx, const CoefficientFilter& keep, std::uint64_t begin,
                                   std::uint64_t end);

// Whole-space conveniences (single shard, in-process).
BigInt count_jet_fiber(int n, const TruncCtx& ctx, const CharCoeffs& x);
BigInt count_nilcone_jets(int n, const TruncCtx& ctx);
FiberTable fiber_table(int n, const TruncCtx& ctx, int threads = 1);
BigInt count_gi_jets(int n, const TruncCtx& ctx, int i, int threads = 1);

}  // namespace jetforge
