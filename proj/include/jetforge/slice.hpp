#pragma once

#include "jetforge/matrix.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace jetforge {

class Partition {
 public:
  // Throws kBadConfig unless parts are positive and weakly decreasing.
  explicit Partition(std::vector<int> parts);

  const std::vector<int>& parts() const noexcept { return parts_; }
  int size() const noexcept { return n_; }  // n = sum of parts
  int length() const noexcept { return static_cast<int>(parts_.size()); }
  bool is_regular() const noexcept { return parts_.size() == 1; }
  bool is_subregular() const noexcept;  // (n-1, 1)
  std::vector<int> block_starts() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> parts_;
  int n_ = 0;
};

std::string to_string(const Partition& p);   // "(2,1)"
Partition parse_partition(const std::string& text);  // "2,1" or "(2,1)"
std::vector<Partition> partitions_of(int n);  // reverse lexicographic, (n) first

// Block-diagonal nilpotent Jordan form, ones on the superdiagonal of each block.
JetMatrix jordan_matrix(const Partition& p, const TruncCtx& ctx);
JetMatrix jordan_matrix(const Partition& p, const FieldCtx& field);  // m = 0

enum class SliceKind { kL, kM };
std::string_view slice_kind_name(SliceKind kind) noexcept;  // "L", "M"
SliceKind parse_slice_kind(std::string_view text);          // throws kBadConfig

struct SliceEntry {
  int row;      // global, 0-based
  int col;      // global, 0-based; always the first column of block j
  int block_i;  // 0-based
  int block_j;
  int exponent; // in-block row, 1-based
};

struct SliceBasis {
  SliceKind kind;
  Partition partition;
  std::vector<SliceEntry> entries;
  bool has_center = false;  // kind M: z*I adjoined
  int center_exponent = 1;
  // kind M: whether x_nn was a slice coordinate and got dropped. Shapes where
  // it was not are built but left uncertified.
  bool dropped_corner = false;
  bool certified = true;

  int n() const noexcept { return partition.size(); }
  int dim() const noexcept { return static_cast<int>(entries.size()) + (has_center ? 1 : 0); }
  std::vector<int> exponents() const;  // entries then center, ascending
};

SliceBasis slice_basis(const Partition& p, SliceKind kind);

// Direct sum over the basis against the closed form
// n(n+1)/2 + sum_j (j-1) n_j for L; for M the dropped corner (exponent 1
// when the last part is 1) is removed and the center adds 1.
struct ExponentSum {
  int direct;
  int formula;
  bool agrees;
};
ExponentSum exponent_sum(const Partition& p, SliceKind kind);
int exponent_sum_formula(const Partition& p, SliceKind kind);

struct TransversalityAudit {
  std::size_t rank;          // rank([gl_n, x] + L_x)
  std::size_t bracket_rank;  // dim [gl_n, x]
  int slice_dim;
  int centralizer_dim;       // sum_{i,j} min(n_i, n_j)
  bool pass;
};
TransversalityAudit audit_transversality(const Partition& p, const FieldCtx& field);

// charpoly(x + lam*A) = lam . charpoly(x + A) for slice points A over R_m
// (kind M also scales z by lam).
struct EquivarianceAudit {
  std::uint64_t points = 0;  // slice points tested, each against every unit
  bool exhaustive = false;
  std::uint64_t failures = 0;
  std::optional<std::string> first_failure;
  bool pass() const noexcept { return failures == 0 && points > 0; }
};
inline constexpr std::uint64_t kExhaustiveLimit = std::uint64_t{1} << 20;
EquivarianceAudit audit_equivariance(const Partition& p, SliceKind kind, const FieldCtx& field, int m = 0,
                                     std::uint64_t samples = 1000, std::uint64_t seed = 1);

// Every nilpotent y = x + l, l in L_x(F_q) nonzero, has a larger orbit than x.
struct OrbitJumpAudit {
  std::size_t base_rank;
  std::uint64_t points;
  std::uint64_t nilpotent;  // y != x that are nilpotent
  std::optional<std::size_t> min_rank;
  bool vacuous() const noexcept { return nilpotent == 0; }
  bool pass;
};
inline constexpr std::uint64_t kOrbitSweepLimit = std::uint64_t{1} << 24;
OrbitJumpAudit audit_orbit_jump(const Partition& p, const FieldCtx& field);  // throws kTooLarge

struct ThresholdVerdict {
  int sum_m;
  int threshold;  // n(n+1)/2 + 1
  bool exceeded;
  bool expected;  // neither regular nor subregular
  bool center_exponent_one;
  bool pass() const noexcept { return exceeded == expected && center_exponent_one; }
};
ThresholdVerdict subregular_threshold(const Partition& p);

struct WeightReport {
  Partition partition;
  SliceKind kind;
  std::vector<int> exponents;
  int sum;
  int formula;
  int threshold_l;  // n(n+1)/2
  int threshold_m;  // n(n+1)/2 + 1
  bool exceeds_l;
  bool exceeds_m;
  bool certified;
};
WeightReport weight_report(const Partition& p, SliceKind kind);
nlohmann::json to_json(const WeightReport& r);
std::string to_table(const std::vector<WeightReport>& reports);

}  // namespace jetforge
