#pragma once

#include "jetforge/record.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace jetforge {

enum class OutputFormat { kJson, kCsv, kTable };
OutputFormat parse_format(std::string_view text);  // throws kBadConfig

struct RunConfig {
  std::string subcommand;  // count, fit-dim, density, anfrs, slice-audit, subreg, insep-probe, hist-mult, val-int
  int n = 2;
  std::uint32_t ell = 2;
  std::uint32_t k = 1;
  int m = 0;           // jet order (count)
  int resolution = 1;  // M (density, subreg, hist-mult, val-int, insep-probe limit)
  std::string target = "nilcone";
  std::optional<std::string> x;  // fiber target point, "c1,c2,..."
  int power = 1;                 // gisum exponent i
  std::optional<std::string> partition;  // slice-audit; all partitions of n when absent
  int a = 0;                             // anfrs scale
  std::optional<int> level;              // anfrs source level, default a*n
  std::vector<int> norms{1, 2};
  std::string poly = "z";                // val-int
  std::vector<std::filesystem::path> inputs;  // fit-dim record files
  std::optional<double> c_bound;              // fit-dim: verdict C_m <= c_bound
  int shards = 1;
  std::optional<std::filesystem::path> checkpoint;
  std::optional<std::filesystem::path> output;
  OutputFormat format = OutputFormat::kJson;
  std::uint64_t seed = 1;
  std::uint64_t samples = 1000;
  int threads = 1;

  // Re-checks every downstream guard before anything runs; throws Error.
  void validate() const;
};

// JETFORGE_THREADS, else the hardware concurrency, else 1.
int default_threads();

struct Verdict {
  std::string name;
  bool pass;
  std::string detail;
};

struct Report {
  std::string experiment;
  std::string anchor;  // which statement the run exercises
  nlohmann::json inputs;
  nlohmann::json outputs;
  std::vector<Verdict> verdicts;
  bool exploratory = false;  // data only, no pass/fail
  std::int64_t wall_ms = 0;
  std::string artifact;      // CSV / JSON-lines / table text per the chosen format
  std::vector<CountRecord> records;

  bool passed() const;
  nlohmann::json to_json() const;
};

Report run(const RunConfig& config);

// JSON-lines (one CountRecord per line) or CSV. A CSV of records that carry a
// fiber table lists the table cells; otherwise one summary row per record.
std::string render_records(const std::vector<CountRecord>& records, OutputFormat format);
void emit(const std::vector<CountRecord>& records, OutputFormat format, const std::filesystem::path& path);

}  // namespace jetforge
