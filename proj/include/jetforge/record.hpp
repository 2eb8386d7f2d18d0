#pragma once

#include "jetforge/counter.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace jetforge {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kEngineVersion = "jetforge 1.0.0";

// One exact jet-count result. Serialized as a single JSON line; counts are
// decimal strings. See docs/schema.md.
struct CountRecord {
  int schema_version = kSchemaVersion;
  CountQuery query;
  BigInt count = 0;
  int shards = 1;
  std::optional<int> shard_id;    // set on per-shard records
  bool complete = true;           // false for an interrupted shard
  std::uint64_t next_base = 0;    // resume point when !complete
  std::vector<BigInt> subtotals;  // combined records: per-shard subtotal, in shard order
  std::vector<std::uint64_t> table;  // fiber_table / gisum targets, PointIndexer order
  std::int64_t wall_ms = 0;
  std::string engine_version = kEngineVersion;
};

nlohmann::json query_to_json(const CountQuery& q);
CountQuery query_from_json(const nlohmann::json& j);  // throws kBadConfig
bool same_query(const CountQuery& a, const CountQuery& b);

nlohmann::json to_json(const CountRecord& r);
CountRecord record_from_json(const nlohmann::json& j);  // throws kBadConfig

// JSON-lines I/O. Writes go to a temporary file renamed over the target.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);  // throws kIoError
void write_jsonl(const std::filesystem::path& path, const std::vector<CountRecord>& records);
std::vector<CountRecord> read_jsonl(const std::filesystem::path& path);  // throws kIoError / kBadConfig

// Checkpoint journal: latest record per (query, shards, shard_id). Safe to
// share between worker threads.
class Journal {
 public:
  // Loads an existing journal; throws kCorruptCheckpoint on malformed content.
  explicit Journal(std::filesystem::path path);

  std::optional<CountRecord> find(const CountQuery& query, int shards, int shard_id) const;
  void upsert(const CountRecord& record);  // rewrites the journal atomically
  std::vector<CountRecord> records() const;

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::vector<CountRecord> entries_;
};

struct ShardOptions {
  Journal* journal = nullptr;
  std::uint64_t checkpoint_interval = 64;  // base indices between journal writes
  // Test hook: stop after this many base indices, leaving an incomplete checkpoint.
  std::optional<std::uint64_t> stop_after;
};

// Runs (or resumes) shard j of S. Returns the per-shard record; for
// fiber_table / gisum targets `count` is the shard mass and `table` its
// partial fiber table.
CountRecord count_sharded(const CountQuery& query, int shards, int shard_id, const ShardOptions& options = {});
CountRecord count_sharded(const CountQuery& query, int shards, int shard_id, const std::filesystem::path& checkpoint);

// Exact combination of complete shard records. Throws kBadConfig when a shard
// is missing, duplicated or incomplete.
CountRecord combine_shards(const CountQuery& query, std::vector<CountRecord> parts);

// Runs all shards on `threads` workers, skipping shards the journal already
// completed, and combines them.
CountRecord run_count(const CountQuery& query, int shards, int threads, Journal* journal = nullptr);

struct DimFitRow {
  std::uint32_t k;
  int m;
  std::uint32_t q;
  BigInt count;
  double c_m;  // log_q(count) - m * d_expected
};

struct DimFit {
  int n = 0;
  std::uint32_t ell = 0;
  TargetKind target = TargetKind::kNilCone;
  double d_expected = 0;
  std::vector<DimFitRow> rows;            // input order
  std::map<int, double> slope_by_m;       // least squares of log count on log q, per m with >= 2 distinct k
  std::optional<double> slope;            // slope at the smallest such m
  std::optional<std::string> slope_error; // "InsufficientData: ..." when no slope could be fitted
  double c_max = 0;                        // sup over rows of c_m
};

// Throws kInsufficientData on empty input or zero counts, kBadConfig on
// records that disagree on n, ell, target or target parameters.
DimFit fit_dimension(const std::vector<CountRecord>& records);

}  // namespace jetforge
