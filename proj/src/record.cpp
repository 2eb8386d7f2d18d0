#include "jetforge/record.hpp"

#include "jetforge/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace jetforge {

using nlohmann::json;

namespace {

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - since).count();
}

bool is_table_target(TargetKind t) { return t == TargetKind::kFiberTable || t == TargetKind::kGiSum; }

template <typename T>
T field_or_throw(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(Errc::kBadConfig, std::string("record is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::kBadConfig, std::string("bad field '") + key + "': " + e.what());
  }
}

}  // namespace

json query_to_json(const CountQuery& q) {
  json j = {{"n", q.n}, {"ell", q.ell}, {"k", q.k}, {"m", q.m}, {"target", std::string(target_name(q.target))}};
  if (q.target == TargetKind::kFiber && q.x) j["x"] = to_string(*q.x);
  if (q.target == TargetKind::kGiSum) j["i"] = q.power;
  return j;
}

CountQuery query_from_json(const json& j) {
  CountQuery q;
  q.n = field_or_throw<int>(j, "n");
  q.ell = field_or_throw<std::uint32_t>(j, "ell");
  q.k = field_or_throw<std::uint32_t>(j, "k");
  q.m = field_or_throw<int>(j, "m");
  q.target = parse_target(field_or_throw<std::string>(j, "target"));
  if (q.target == TargetKind::kFiber) q.x = parse_char_coeffs(q.ctx(), q.n, field_or_throw<std::string>(j, "x"));
  if (q.target == TargetKind::kGiSum) q.power = field_or_throw<int>(j, "i");
  return q;
}

bool same_query(const CountQuery& a, const CountQuery& b) { return query_to_json(a) == query_to_json(b); }

json to_json(const CountRecord& r) {
  json j = {{"schema_version", r.schema_version},
            {"query", query_to_json(r.query)},
            {"count", to_decimal(r.count)},
            {"shards", r.shards},
            {"complete", r.complete},
            {"wall_ms", r.wall_ms},
            {"engine_version", r.engine_version}};
  if (r.shard_id) j["shard_id"] = *r.shard_id;
  if (!r.complete) j["next_base"] = r.next_base;
  if (!r.subtotals.empty()) {
    json subs = json::array();
    for (const auto& s : r.subtotals) subs.push_back(to_decimal(s));
    j["subtotals"] = std::move(subs);
  }
  if (!r.table.empty()) {
    // Sparse: [index, "count"] for nonzero cells, plus the dense size.
    json cells = json::array();
    for (std::size_t i = 0; i < r.table.size(); ++i) {
      if (r.table[i] != 0) cells.push_back(json::array({i, std::to_string(r.table[i])}));
    }
    j["fiber_table"] = {{"size", r.table.size()}, {"cells", std::move(cells)}};
  }
  return j;
}

CountRecord record_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::kBadConfig, "record is not a JSON object");
  CountRecord r;
  r.schema_version = field_or_throw<int>(j, "schema_version");
  if (r.schema_version != kSchemaVersion) {
    throw Error(Errc::kBadConfig, "unsupported schema_version " + std::to_string(r.schema_version));
  }
  r.query = query_from_json(field_or_throw<json>(j, "query"));
  r.count = parse_decimal(field_or_throw<std::string>(j, "count"));
  r.shards = field_or_throw<int>(j, "shards");
  r.complete = field_or_throw<bool>(j, "complete");
  r.wall_ms = field_or_throw<std::int64_t>(j, "wall_ms");
  r.engine_version = field_or_throw<std::string>(j, "engine_version");
  if (j.contains("shard_id")) r.shard_id = field_or_throw<int>(j, "shard_id");
  if (!r.complete) r.next_base = field_or_throw<std::uint64_t>(j, "next_base");
  if (j.contains("subtotals")) {
    for (const auto& s : j.at("subtotals")) {
      if (!s.is_string()) throw Error(Errc::kBadConfig, "subtotals must be decimal strings");
      r.subtotals.push_back(parse_decimal(s.get<std::string>()));
    }
  }
  if (j.contains("fiber_table")) {
    const auto& t = j.at("fiber_table");
    const auto size = field_or_throw<std::uint64_t>(t, "size");
    if (size > PointIndexer::kMaxCells) throw Error(Errc::kBadConfig, "fiber_table too large");
    r.table.assign(size, 0);
    for (const auto& cell : field_or_throw<json>(t, "cells")) {
      if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_unsigned() || !cell[1].is_string()) {
        throw Error(Errc::kBadConfig, "bad fiber_table cell");
      }
      const auto idx = cell[0].get<std::uint64_t>();
      if (idx >= size) throw Error(Errc::kBadConfig, "fiber_table index out of range");
      r.table[idx] = parse_decimal(cell[1].get<std::string>()).convert_to<std::uint64_t>();
    }
  }
  return r;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot open " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(Errc::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::kIoError, "rename to " + path.string() + ": " + ec.message());
}

void write_jsonl(const std::filesystem::path& path, const std::vector<CountRecord>& records) {
  std::string text;
  for (const auto& r : records) text += to_json(r).dump() + "\n";
  write_text_atomic(path, text);
}

std::vector<CountRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot read " + path.string());
  std::vector<CountRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(Errc::kBadConfig, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    out.push_back(record_from_json(j));
  }
  return out;
}

Journal::Journal(std::filesystem::path path) : path_(std::move(path)) {
  if (!std::filesystem::exists(path_)) return;
  try {
    entries_ = read_jsonl(path_);
  } catch (const Error& e) {
    throw Error(Errc::kCorruptCheckpoint, path_.string() + ": " + e.what());
  }
  for (const auto& r : entries_) {
    if (!r.shard_id) throw Error(Errc::kCorruptCheckpoint, path_.string() + ": journal entry without shard_id");
  }
}

std::optional<CountRecord> Journal::find(const CountQuery& query, int shards, int shard_id) const {
  std::lock_guard lock(mu_);
  for (const auto& r : entries_) {
    if (r.shards == shards && r.shard_id == shard_id && same_query(r.query, query)) return r;
  }
  return std::nullopt;
}

void Journal::upsert(const CountRecord& record) {
  std::lock_guard lock(mu_);
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const CountRecord& r) {
    return r.shards == record.shards && r.shard_id == record.shard_id && same_query(r.query, record.query);
  });
  if (it == entries_.end()) {
    entries_.push_back(record);
  } else {
    *it = record;
  }
  write_jsonl(path_, entries_);
}

std::vector<CountRecord> Journal::records() const {
  std::lock_guard lock(mu_);
  return entries_;
}

CountRecord count_sharded(const CountQuery& query, int shards, int shard_id, const ShardOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  query.validate();
  const ShardRange range = shard_range(query.base_layer_size(), shards, shard_id);
  const bool tabular = is_table_target(query.target);

  CountRecord rec;
  rec.query = query;
  rec.shards = shards;
  rec.shard_id = shard_id;

  std::uint64_t start = range.begin;
  std::uint64_t subtotal = 0;
  std::vector<std::uint64_t> table;
  if (tabular) table.assign(PointIndexer(query.n, query.ctx()).size(), 0);

  if (options.journal) {
    if (auto prev = options.journal->find(query, shards, shard_id)) {
      if (prev->complete) return *prev;
      if (prev->next_base < range.begin || prev->next_base > range.end) {
        throw Error(Errc::kCorruptCheckpoint, "resume point outside shard range");
      }
      if (tabular && prev->table.size() != table.size() && !(prev->table.empty() && prev->count == 0)) {
        throw Error(Errc::kCorruptCheckpoint, "checkpointed table has the wrong size");
      }
      start = prev->next_base;
      subtotal = prev->count.convert_to<std::uint64_t>();
      if (tabular && !prev->table.empty()) table = prev->table;
    }
  }

  std::uint64_t stop = range.end;
  if (options.stop_after) stop = std::min(stop, start + *options.stop_after);

  Progress progress;
  if (options.journal && options.checkpoint_interval > 0) {
    progress.interval = options.checkpoint_interval;
    progress.report = [&](std::uint64_t next, std::uint64_t sub, const std::vector<std::uint64_t>* partial) {
      CountRecord cp = rec;
      cp.complete = false;
      cp.next_base = next;
      cp.count = sub;
      if (partial) cp.table = *partial;
      cp.wall_ms = elapsed_ms(started);
      options.journal->upsert(cp);
    };
  }

  if (tabular) {
    fiber_table_range(query.n, query.ctx(), start, stop, table, progress);
    subtotal = 0;
    for (auto c : table) subtotal += c;
    rec.table = std::move(table);
  } else {
    subtotal = count_fiber_range(query, start, stop, subtotal, progress);
  }
  rec.count = subtotal;
  rec.complete = stop == range.end;
  rec.next_base = rec.complete ? 0 : stop;
  rec.wall_ms = elapsed_ms(started);
  if (options.journal) options.journal->upsert(rec);
  return rec;
}

CountRecord count_sharded(const CountQuery& query, int shards, int shard_id, const std::filesystem::path& checkpoint) {
  Journal journal(checkpoint);
  ShardOptions options;
  options.journal = &journal;
  return count_sharded(query, shards, shard_id, options);
}

CountRecord combine_shards(const CountQuery& query, std::vector<CountRecord> parts) {
  if (parts.empty()) throw Error(Errc::kBadConfig, "no shard records");
  const int shards = parts.front().shards;
  std::sort(parts.begin(), parts.end(),
            [](const CountRecord& a, const CountRecord& b) { return a.shard_id.value_or(-1) < b.shard_id.value_or(-1); });
  if (static_cast<int>(parts.size()) != shards) throw Error(Errc::kBadConfig, "shard records missing or duplicated");
  CountRecord out;
  out.query = query;
  out.shards = shards;
  out.count = 0;
  const bool tabular = is_table_target(query.target);
  for (int j = 0; j < shards; ++j) {
    const auto& p = parts[static_cast<std::size_t>(j)];
    if (p.shard_id != j || p.shards != shards || !p.complete || !same_query(p.query, query)) {
      throw Error(Errc::kBadConfig, "shard record " + std::to_string(j) + " is missing, incomplete or mismatched");
    }
    out.count += p.count;
    out.subtotals.push_back(p.count);
    out.wall_ms += p.wall_ms;
    if (tabular) {
      if (out.table.empty()) out.table.assign(p.table.size(), 0);
      if (p.table.size() != out.table.size()) throw Error(Errc::kBadConfig, "shard tables differ in size");
      for (std::size_t i = 0; i < p.table.size(); ++i) out.table[i] += p.table[i];
    }
  }
  if (query.target == TargetKind::kGiSum) {
    FiberTable t{query.n, query.ctx(), out.table};
    out.count = t.power_sum(query.power);
  }
  return out;
}

CountRecord run_count(const CountQuery& query, int shards, int threads, Journal* journal) {
  query.validate();
  shard_range(query.base_layer_size(), shards, 0);
  std::vector<CountRecord> parts(static_cast<std::size_t>(shards));
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const int j = next.fetch_add(1);
      if (j >= shards) return;
      try {
        ShardOptions options;
        options.journal = journal;
        parts[static_cast<std::size_t>(j)] = count_sharded(query, shards, j, options);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < std::max(1, std::min(threads, shards)); ++t) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);
  return combine_shards(query, std::move(parts));
}

DimFit fit_dimension(const std::vector<CountRecord>& records) {
  if (records.empty()) throw Error(Errc::kInsufficientData, "no records");
  DimFit fit;
  const auto& first = records.front().query;
  fit.n = first.n;
  fit.ell = first.ell;
  fit.target = first.target;
  const double nn = static_cast<double>(first.n) * first.n;
  switch (first.target) {
    case TargetKind::kNilCone:
    case TargetKind::kFiber: fit.d_expected = nn - first.n; break;
    case TargetKind::kGiSum: fit.d_expected = first.power * (nn - first.n) + first.n; break;
    case TargetKind::kFiberTable: fit.d_expected = nn; break;
  }

  std::map<int, std::vector<std::pair<double, double>>> by_m;
  std::map<int, std::set<std::uint32_t>> ks_by_m;
  fit.c_max = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    const auto& q = r.query;
    if (q.n != first.n || q.ell != first.ell || q.target != first.target ||
        (q.target == TargetKind::kGiSum && q.power != first.power) ||
        (q.target == TargetKind::kFiber && to_string(*q.x) != to_string(*first.x))) {
      throw Error(Errc::kBadConfig, "records disagree on n, ell or target");
    }
    if (r.count <= 0) throw Error(Errc::kInsufficientData, "zero count has no finite exponent");
    const double qd = static_cast<double>(r.query.q());
    const double log_count = std::log(r.count.convert_to<double>());
    DimFitRow row{q.k, q.m, r.query.q(), r.count, log_count / std::log(qd) - q.m * fit.d_expected};
    fit.c_max = std::max(fit.c_max, row.c_m);
    fit.rows.push_back(row);
    by_m[q.m].emplace_back(std::log(qd), log_count);
    ks_by_m[q.m].insert(q.k);
  }
  for (const auto& [m, pts] : by_m) {
    if (ks_by_m[m].size() < 2) continue;
    double mx = 0;
    double my = 0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0;
    double sxx = 0;
    for (auto [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    fit.slope_by_m[m] = sxy / sxx;
  }
  if (fit.slope_by_m.empty()) {
    fit.slope_error = "InsufficientData: slope needs records at >= 2 distinct k for some m";
  } else {
    fit.slope = fit.slope_by_m.begin()->second;
  }
  return fit;
}

}  // namespace jetforge
