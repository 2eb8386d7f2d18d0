#include "jetforge/cli.hpp"

#include "jetforge/error.hpp"
#include "jetforge/measure.hpp"
#include "jetforge/slice.hpp"
#include "jetforge/subreg.hpp"

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace jetforge {

using nlohmann::json;

namespace {

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"count",  "fit-dim",     "density",   "anfrs",  "slice-audit",
                                                 "subreg", "insep-probe", "hist-mult", "val-int"};
  return names;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

CountQuery query_of(const RunConfig& c) {
  CountQuery q;
  q.n = c.n;
  q.ell = c.ell;
  q.k = c.k;
  q.m = c.m;
  q.target = parse_target(c.target);
  if (q.target == TargetKind::kFiber) {
    if (!c.x) throw Error(Errc::kBadConfig, "--target fiber needs --x");
    q.x = parse_char_coeffs(q.ctx(), c.n, *c.x);
  } else if (c.x) {
    throw Error(Errc::kBadConfig, "--x only applies to --target fiber");
  }
  q.power = c.power;
  return q;
}

FieldCtx field_of(const RunConfig& c) { return FieldCtx::make(c.ell, c.k); }

void add(Report& r, std::string name, bool pass, std::string detail = {}) {
  r.verdicts.push_back({std::move(name), pass, std::move(detail)});
}

std::string table_lines(const Report& r) {
  std::ostringstream os;
  os << r.experiment << ": " << r.anchor << "\n";
  if (r.exploratory) os << "exploratory: data only, no verdict\n";
  for (const auto& [key, value] : r.outputs.items()) {
    if (value.is_primitive()) os << "  " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
  }
  for (const auto& v : r.verdicts) {
    os << (v.pass ? "PASS " : "FAIL ") << v.name;
    if (!v.detail.empty()) os << " (" << v.detail << ")";
    os << "\n";
  }
  return os.str();
}

Report run_count(const RunConfig& c) {
  Report r{"count", "jet-scheme point counts: nilpotent cone, Chevalley fibers, fiber powers"};
  const auto q = query_of(c);
  std::optional<Journal> journal;
  if (c.checkpoint) journal.emplace(*c.checkpoint);
  const auto rec = jetforge::run_count(q, c.shards, c.threads, journal ? &*journal : nullptr);
  r.inputs = {{"query", query_to_json(q)}, {"shards", c.shards}};
  r.outputs = to_json(rec);
  r.outputs.erase("wall_ms");
  BigInt sub = 0;
  for (const auto& s : rec.subtotals) sub += s;
  const bool tabular = q.target == TargetKind::kFiberTable || q.target == TargetKind::kGiSum;
  if (tabular) {
    BigInt mass = 0;
    for (auto v : rec.table) mass += v;
    const auto total = big_pow(q.q(), static_cast<std::uint64_t>((q.m + 1) * q.n * q.n));
    add(r, "table mass equals q^((m+1)n^2)", mass == total, to_decimal(mass));
    add(r, "shard masses sum to the table mass", sub == mass);
  } else {
    add(r, "shard subtotals sum to the count", sub == rec.count, to_decimal(rec.count));
  }
  r.records = {rec};
  return r;
}

Report run_fit_dim(const RunConfig& c) {
  Report r{"fit-dim", "Lang-Weil growth of jet counts: slope and normalized exponents C_m"};
  if (c.inputs.empty()) throw Error(Errc::kBadConfig, "fit-dim needs at least one --input file");
  std::vector<CountRecord> recs;
  json files = json::array();
  for (const auto& p : c.inputs) {
    auto part = read_jsonl(p);
    recs.insert(recs.end(), part.begin(), part.end());
    files.push_back(p.string());
  }
  const auto fit = fit_dimension(recs);
  r.inputs = {{"files", files}, {"records", recs.size()}};
  json rows = json::array();
  for (const auto& row : fit.rows) {
    rows.push_back({{"k", row.k}, {"m", row.m}, {"q", row.q}, {"count", to_decimal(row.count)}, {"c_m", row.c_m}});
  }
  json slopes = json::object();
  for (const auto& [m, s] : fit.slope_by_m) slopes[std::to_string(m)] = s;
  r.outputs = {{"n", fit.n},
               {"ell", fit.ell},
               {"target", std::string(target_name(fit.target))},
               {"d_expected", fit.d_expected},
               {"rows", rows},
               {"slope_by_m", slopes},
               {"c_max", fit.c_max}};
  if (fit.slope) r.outputs["slope"] = *fit.slope;
  if (fit.slope_error) r.outputs["slope_error"] = *fit.slope_error;
  if (c.c_bound) {
    std::ostringstream d;
    d << "max C_m = " << fit.c_max;
    add(r, "C_m <= " + std::to_string(*c.c_bound), fit.c_max <= *c.c_bound, d.str());
  }
  std::ostringstream csv;
  csv << "k,m,q,count,c_m\n";
  for (const auto& row : fit.rows) {
    csv << row.k << "," << row.m << "," << row.q << "," << to_decimal(row.count) << "," << json(row.c_m).dump()
        << "\n";
  }
  r.artifact = csv.str();
  return r;
}

Report run_density(const RunConfig& c) {
  Report r{"density", "pushforward of Haar measure under the characteristic polynomial map"};
  const auto p = density_profile(c.n, field_of(c), c.resolution, c.threads);
  r.inputs = {{"n", c.n}, {"ell", c.ell}, {"k", c.k}, {"M", c.resolution}, {"norms", c.norms}};
  r.outputs = profile_summary(p, c.norms);
  add(r, "mass is exactly 1", p.mass() == 1, to_fraction(p.mass()));
  r.artifact = profile_csv(p);
  return r;
}

Report run_anfrs(const RunConfig& c) {
  Report r{"anfrs", "effectively an-FRS ratio over the origin, weighted ellipsoids t^a B_0"};
  const int level = c.level.value_or(c.a * c.n);
  const auto ratio = anfrs_ratio(c.n, field_of(c), c.a, level);
  r.inputs = {{"n", c.n}, {"ell", c.ell}, {"k", c.k}, {"a", c.a}, {"source_level", level}};
  r.outputs = {{"ratio", to_fraction(ratio.ratio)},
               {"display", ratio.display()},
               {"count", to_decimal(ratio.count)},
               {"denominator_exponent", ratio.denominator_exponent},
               {"working_level", ratio.level}};
  if (c.a == 0) add(r, "unit ball ratio is 1", ratio.ratio == 1);
  std::ostringstream csv;
  csv << "n,q,a,count,denominator_exponent,ratio\n"
      << c.n << "," << ratio.q << "," << c.a << "," << to_decimal(ratio.count) << "," << ratio.denominator_exponent
      << "," << to_fraction(ratio.ratio) << "\n";
  r.artifact = csv.str();
  return r;
}

Report run_slice_audit(const RunConfig& c) {
  Report r{"slice-audit", "G_m-weighted nilpotent slices L_x and M_x"};
  const auto field = field_of(c);
  std::vector<Partition> parts;
  if (c.partition) {
    parts.push_back(parse_partition(*c.partition));
    if (parts[0].size() != c.n) throw Error(Errc::kBadConfig, "partition does not sum to n");
  } else {
    parts = partitions_of(c.n);
  }
  r.inputs = {{"n", c.n}, {"ell", c.ell}, {"k", c.k}, {"samples", c.samples}, {"seed", c.seed}};
  std::vector<WeightReport> weights;
  json audits = json::array();
  for (const auto& p : parts) {
    const auto name = to_string(p);
    json entry = {{"partition", name}};
    for (auto kind : {SliceKind::kL, SliceKind::kM}) {
      const auto kn = std::string(slice_kind_name(kind));
      auto w = weight_report(p, kind);
      entry["weights_" + kn] = to_json(w);
      add(r, name + " " + kn + " exponent sum matches formula", w.sum == w.formula,
          std::to_string(w.sum) + " vs " + std::to_string(w.formula));
      bool positive = true;
      for (int e : w.exponents) positive = positive && e >= 1;
      add(r, name + " " + kn + " exponents positive", positive);
      const auto eq = audit_equivariance(p, kind, field, 0, c.samples, c.seed);
      entry["equivariance_" + kn] = {{"points", eq.points}, {"exhaustive", eq.exhaustive}, {"failures", eq.failures}};
      add(r, name + " " + kn + " equivariance", eq.pass(),
          std::to_string(eq.points) + (eq.exhaustive ? " points, exhaustive" : " seeded samples"));
      weights.push_back(std::move(w));
    }
    const auto tr = audit_transversality(p, field);
    entry["transversality"] = {{"rank", tr.rank}, {"bracket_rank", tr.bracket_rank}, {"slice_dim", tr.slice_dim}};
    add(r, name + " transversality", tr.pass, "rank " + std::to_string(tr.rank));
    add(r, name + " regular iff sum = n(n+1)/2", (weights[weights.size() - 2].sum == c.n * (c.n + 1) / 2) == p.is_regular());
    const auto th = subregular_threshold(p);
    entry["threshold"] = {{"sum_m", th.sum_m}, {"threshold", th.threshold}, {"exceeded", th.exceeded}};
    add(r, name + " M-slice threshold", th.pass(),
        std::to_string(th.sum_m) + (th.exceeded ? " > " : " <= ") + std::to_string(th.threshold));
    std::uint64_t sweep = 1;
    bool feasible = true;
    for (int d = 0; d < slice_basis(p, SliceKind::kL).dim() && feasible; ++d) {
      if (sweep > kOrbitSweepLimit / field.q()) feasible = false;
      sweep *= field.q();
    }
    if (feasible) {
      const auto oj = audit_orbit_jump(p, field);
      entry["orbit_jump"] = {{"points", oj.points}, {"nilpotent", oj.nilpotent}, {"vacuous", oj.vacuous()}};
      add(r, name + " orbit jump", oj.pass, oj.vacuous() ? "vacuous" : std::to_string(oj.nilpotent) + " nilpotent points");
    } else {
      entry["orbit_jump"] = "skipped: sweep exceeds 2^24 points";
    }
    audits.push_back(std::move(entry));
  }
  r.outputs = {{"partitions", audits}};
  if (c.format == OutputFormat::kCsv) {
    std::ostringstream csv;
    csv << "partition,kind,dim,sum,formula,threshold_l,threshold_m,exceeds_l,exceeds_m,certified\n";
    for (const auto& w : weights) {
      csv << csv_field(to_string(w.partition)) << "," << slice_kind_name(w.kind) << "," << w.exponents.size() << ","
          << w.sum << "," << w.formula << "," << w.threshold_l << "," << w.threshold_m << "," << w.exceeds_l << ","
          << w.exceeds_m << "," << w.certified << "\n";
    }
    r.artifact = csv.str();
  } else {
    r.artifact = to_table(weights);
  }
  return r;
}

Report run_subreg(const RunConfig& c) {
  Report r{"subreg", "subregular slice density against the bound n/l + 1"};
  const auto field = field_of(c);
  const auto d = subreg_slice_density(c.n, field, c.resolution);
  const auto id = m1_identity_check(c.n, field, c.samples, c.seed);
  r.inputs = {{"n", c.n}, {"ell", c.ell}, {"k", c.k}, {"M", c.resolution}, {"samples", c.samples}, {"seed", c.seed}};
  r.outputs = subreg_json(d);
  r.outputs["identity_check"] = {{"points", id.points}, {"exhaustive", id.exhaustive}, {"failures", id.failures}};
  add(r, "slice mass is exactly 1", d.mass == 1, to_fraction(d.mass));
  add(r, "direct and analytic paths agree on every box", d.paths_agree(),
      std::to_string(d.mismatches) + " mismatches");
  add(r, "sup <= n/q + 1", d.within_bound(), to_fraction(d.sup.value) + " vs " + to_fraction(d.bound));
  add(r, "charpoly(c(f) + (alpha-1)e) = f - f(0) + alpha f(0)", id.pass(),
      std::to_string(id.points) + (id.exhaustive ? " points, exhaustive" : " seeded samples"));
  std::ostringstream csv;
  for (int i = 1; i <= c.n; ++i) csv << "c_" << i << ",";
  csv << "slice_count,direct,analytic\n";
  for (std::uint64_t b = 0; b < d.direct.size(); ++b) {
    const auto x = d.direct.box(b);
    for (int i = 1; i <= c.n; ++i) csv << to_string(x[i]) << ",";
    csv << d.direct.fibers.counts[b] << "," << to_fraction(d.direct.value(b)) << "," << to_fraction(d.analytic[b])
        << "\n";
  }
  r.artifact = csv.str();
  return r;
}

Report run_insep(const RunConfig& c) {
  Report r{"insep-probe", "densities near the totally inseparable polynomial z^2 + t, characteristic 2"};
  r.exploratory = true;
  const auto trace = insep_probe(field_of(c), c.resolution);
  r.inputs = {{"n", 2}, {"ell", c.ell}, {"k", c.k}, {"limit", c.resolution}};
  json rows = json::array();
  std::ostringstream csv;
  csv << "M,box,fiber_count,density,density_decimal\n";
  for (const auto& p : trace) {
    rows.push_back({{"M", p.resolution},
                    {"box", to_string(p.box)},
                    {"fiber", to_decimal(p.fiber)},
                    {"density", to_fraction(p.density)},
                    {"density_decimal", to_double(p.density)}});
    csv << p.resolution << "," << csv_field(to_string(p.box)) << "," << to_decimal(p.fiber) << ","
        << to_fraction(p.density) << "," << json(to_double(p.density)).dump() << "\n";
  }
  r.outputs = {{"trace", rows}};
  r.artifact = csv.str();
  return r;
}

Report run_hist(const RunConfig& c) {
  Report r{"hist-mult", "valuation of a product of two Haar-random integers"};
  const auto h = mult_pushforward_hist(field_of(c), c.resolution);
  r.inputs = {{"ell", c.ell}, {"k", c.k}, {"M", c.resolution}};
  r.outputs = hist_json(h);
  const auto q = h.ctx.field().q();
  for (int b = 0; b <= c.resolution; ++b) {
    const auto expect = mult_val_mass(q, b);
    add(r, "bucket " + std::to_string(b) + " matches ((q-1)^2/q^2)(r+1)q^-r",
        h.buckets[static_cast<std::size_t>(b)] == expect, to_fraction(h.buckets[static_cast<std::size_t>(b)]));
  }
  add(r, "histogram mass is 1", h.total() == 1);
  r.artifact = hist_csv(h);
  return r;
}

Report run_val_int(const RunConfig& c) {
  Report r{"val-int", "valuation integral of a monic polynomial against deg/(l-1)"};
  const auto field = field_of(c);
  r.inputs = {{"ell", c.ell}, {"k", c.k}, {"M", c.resolution}, {"poly", c.poly}};
  json rows = json::array();
  std::ostringstream csv;
  csv << "M,integral,bound,within\n";
  Rational prev = -1;
  bool monotone = true;
  bool within = true;
  bool monic = true;
  int degree = 0;
  for (int M = 0; M <= c.resolution; ++M) {
    const auto f = parse_unipoly(TruncCtx::make(field, M), c.poly);
    monic = f.is_monic();
    degree = f.degree();
    const auto v = val_integral(f);
    const auto bound = val_integral_bound(degree, field.q(), M);
    monotone = monotone && v >= prev;
    within = within && v <= bound;
    prev = v;
    rows.push_back({{"M", M}, {"integral", to_fraction(v)}, {"bound", to_fraction(bound)}});
    csv << M << "," << to_fraction(v) << "," << to_fraction(bound) << "," << (v <= bound) << "\n";
  }
  r.outputs = {{"degree", degree}, {"monic", monic}, {"rows", rows}};
  add(r, "I_M nondecreasing in M", monotone);
  if (monic) add(r, "I_M <= deg/(q-1) + (M+2)q^-M", within);
  r.artifact = csv.str();
  return r;
}

}  // namespace

OutputFormat parse_format(std::string_view text) {
  if (text == "json") return OutputFormat::kJson;
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "table") return OutputFormat::kTable;
  throw Error(Errc::kBadConfig, "format must be json, csv or table");
}

int default_threads() {
  if (const char* env = std::getenv("JETFORGE_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (const std::exception&) {
    }
    throw Error(Errc::kBadConfig, "JETFORGE_THREADS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void RunConfig::validate() const {
  if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end()) {
    throw Error(Errc::kBadConfig, "unknown subcommand '" + subcommand + "'");
  }
  if (n < 1) throw Error(Errc::kBadConfig, "n must be >= 1");
  FieldCtx::make(ell, k);
  if (m < 0) throw Error(Errc::kBadConfig, "m must be >= 0");
  if (resolution < 1 && subcommand != "hist-mult" && subcommand != "val-int") {
    throw Error(Errc::kBadConfig, "M must be >= 1");
  }
  if (resolution < 0) throw Error(Errc::kBadConfig, "M must be >= 0");
  if (shards < 1) throw Error(Errc::kBadConfig, "shards must be >= 1");
  if (threads < 1) throw Error(Errc::kBadConfig, "threads must be >= 1");
  if (samples < 1) throw Error(Errc::kBadConfig, "samples must be >= 1");
  if (a < 0) throw Error(Errc::kBadConfig, "a must be >= 0");
  for (int t : norms) {
    if (t < 1) throw Error(Errc::kBadConfig, "norm exponents must be >= 1");
  }
  if (subcommand == "count") {
    const auto q = query_of(*this);
    q.validate();
    shard_range(q.base_layer_size(), shards, 0);
  }
  if (subcommand == "insep-probe" && (ell != 2 || n != 2)) {
    throw Error(Errc::kWrongCharacteristic, "the inseparable probe needs ell = 2 and n = 2");
  }
}

bool Report::passed() const {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

json Report::to_json() const {
  json vs = json::array();
  for (const auto& v : verdicts) vs.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  json j = {{"experiment", experiment}, {"anchor", anchor},   {"inputs", inputs},
            {"outputs", outputs},       {"verdicts", vs},     {"wall_ms", wall_ms}};
  if (exploratory) {
    j["exploratory"] = true;
  } else {
    j["passed"] = passed();
  }
  return j;
}

Report run(const RunConfig& config) {
  config.validate();
  const auto started = std::chrono::steady_clock::now();
  Report r;
  const auto& s = config.subcommand;
  if (s == "count") r = run_count(config);
  else if (s == "fit-dim") r = run_fit_dim(config);
  else if (s == "density") r = run_density(config);
  else if (s == "anfrs") r = run_anfrs(config);
  else if (s == "slice-audit") r = run_slice_audit(config);
  else if (s == "subreg") r = run_subreg(config);
  else if (s == "insep-probe") r = run_insep(config);
  else if (s == "hist-mult") r = run_hist(config);
  else r = run_val_int(config);
  r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();

  switch (config.format) {
    case OutputFormat::kJson: {
      if (!r.records.empty()) {
        r.artifact = render_records(r.records, OutputFormat::kJson);
      } else {
        auto j = r.to_json();
        j.erase("wall_ms");
        r.artifact = j.dump(2) + "\n";
      }
      break;
    }
    case OutputFormat::kCsv:
      if (!r.records.empty()) r.artifact = render_records(r.records, OutputFormat::kCsv);
      break;
    case OutputFormat::kTable: {
      // Small tables ride along; profiles stay in the csv format.
      const bool small = s == "slice-audit" || s == "fit-dim" || s == "hist-mult" || s == "val-int" || s == "insep-probe";
      r.artifact = table_lines(r) + (small ? "\n" + r.artifact : "");
      break;
    }
  }
  return r;
}

std::string render_records(const std::vector<CountRecord>& records, OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::kJson) {
    for (auto rec : records) {
      rec.wall_ms = 0;
      os << to_json(rec).dump() << "\n";
    }
    return os.str();
  }
  if (format != OutputFormat::kCsv) throw Error(Errc::kBadConfig, "records render as json or csv");
  if (!records.empty() && !records.front().table.empty()) {
    for (const auto& rec : records) {
      const PointIndexer idx(rec.query.n, rec.query.ctx());
      if (rec.table.size() != idx.size()) throw Error(Errc::kBadConfig, "record table has the wrong size");
    }
    const int n = records.front().query.n;
    for (int i = 1; i <= n; ++i) os << "c_" << i << ",";
    os << "count\n";
    for (const auto& rec : records) {
      const PointIndexer idx(rec.query.n, rec.query.ctx());
      for (std::uint64_t b = 0; b < rec.table.size(); ++b) {
        const auto x = idx.point(b);
        for (int i = 1; i <= rec.query.n; ++i) os << to_string(x[i]) << ",";
        os << rec.table[b] << "\n";
      }
    }
    return os.str();
  }
  os << "n,ell,k,m,target,x,i,count,shards\n";
  for (const auto& rec : records) {
    const auto& q = rec.query;
    os << q.n << "," << q.ell << "," << q.k << "," << q.m << "," << target_name(q.target) << ","
       << (q.x ? csv_field(to_string(*q.x)) : "") << "," << (q.target == TargetKind::kGiSum ? std::to_string(q.power) : "")
       << "," << to_decimal(rec.count) << "," << rec.shards << "\n";
  }
  return os.str();
}

void emit(const std::vector<CountRecord>& records, OutputFormat format, const std::filesystem::path& path) {
  write_text_atomic(path, render_records(records, format));
}

}  // namespace jetforge
