#include "jetforge/slice.hpp"

#include "jetforge/error.hpp"
#include "jetforge/linalg.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace jetforge {

Partition::Partition(std::vector<int> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw Error(Errc::kBadConfig, "partition has no parts");
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i] < 1) throw Error(Errc::kBadConfig, "partition parts must be positive");
    if (i > 0 && parts_[i] > parts_[i - 1]) throw Error(Errc::kBadConfig, "partition parts must be weakly decreasing");
    n_ += parts_[i];
  }
}

bool Partition::is_subregular() const noexcept { return parts_.size() == 2 && parts_[1] == 1; }

std::vector<int> Partition::block_starts() const {
  std::vector<int> starts;
  int s = 0;
  for (int p : parts_) {
    starts.push_back(s);
    s += p;
  }
  return starts;
}

std::string to_string(const Partition& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.parts().size(); ++i) {
    if (i) out += ",";
    out += std::to_string(p.parts()[i]);
  }
  return out + ")";
}

Partition parse_partition(const std::string& text) {
  std::string body = text;
  if (!body.empty() && body.front() == '(' && body.back() == ')') body = body.substr(1, body.size() - 2);
  std::vector<int> parts;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoi(item, &used));
      if (item.find_first_not_of(" ", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(Errc::kBadConfig, "bad partition '" + text + "'");
    }
  }
  return Partition(std::move(parts));
}

std::vector<Partition> partitions_of(int n) {
  if (n < 1) throw Error(Errc::kBadConfig, "n must be >= 1");
  std::vector<Partition> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int rest, int cap) -> void {
    if (rest == 0) {
      out.emplace_back(cur);
      return;
    }
    for (int p = std::min(rest, cap); p >= 1; --p) {
      cur.push_back(p);
      self(self, rest - p, p);
      cur.pop_back();
    }
  };
  rec(rec, n, n);
  return out;
}

JetMatrix jordan_matrix(const Partition& p, const TruncCtx& ctx) {
  JetMatrix x(p.size(), ctx);
  const auto starts = p.block_starts();
  for (std::size_t b = 0; b < starts.size(); ++b) {
    for (int r = 0; r + 1 < p.parts()[b]; ++r) x.coeff(starts[b] + r, starts[b] + r + 1, 0) = ctx.field().one();
  }
  return x;
}

JetMatrix jordan_matrix(const Partition& p, const FieldCtx& field) {
  return jordan_matrix(p, TruncCtx::make(field, 0));
}

std::string_view slice_kind_name(SliceKind kind) noexcept { return kind == SliceKind::kL ? "L" : "M"; }

SliceKind parse_slice_kind(std::string_view text) {
  if (text == "L" || text == "l") return SliceKind::kL;
  if (text == "M" || text == "m") return SliceKind::kM;
  throw Error(Errc::kBadConfig, "slice kind must be L or M");
}

std::vector<int> SliceBasis::exponents() const {
  std::vector<int> out;
  for (const auto& e : entries) out.push_back(e.exponent);
  if (has_center) out.push_back(center_exponent);
  std::sort(out.begin(), out.end());
  return out;
}

SliceBasis slice_basis(const Partition& p, SliceKind kind) {
  SliceBasis basis{kind, p, {}};
  const auto& parts = p.parts();
  const auto starts = p.block_starts();
  for (int i = 0; i < p.length(); ++i) {
    for (int j = 0; j < p.length(); ++j) {
      const int ni = parts[i];
      const int nj = parts[j];
      const int first = ni >= nj ? ni - nj + 1 : 1;
      for (int r = first; r <= ni; ++r) basis.entries.push_back({starts[i] + r - 1, starts[j], i, j, r});
    }
  }
  if (kind == SliceKind::kM) {
    const int corner = p.size() - 1;
    const auto it = std::find_if(basis.entries.begin(), basis.entries.end(),
                                 [&](const SliceEntry& e) { return e.row == corner && e.col == corner; });
    basis.dropped_corner = it != basis.entries.end();
    if (basis.dropped_corner) basis.entries.erase(it);
    basis.has_center = true;
    basis.center_exponent = 1;
    basis.certified = !p.is_regular();
  }
  return basis;
}

int exponent_sum_formula(const Partition& p, SliceKind kind) {
  const int n = p.size();
  int sum = n * (n + 1) / 2;
  for (int j = 0; j < p.length(); ++j) sum += j * p.parts()[j];
  if (kind == SliceKind::kM) sum += p.parts().back() == 1 ? 0 : 1;
  return sum;
}

ExponentSum exponent_sum(const Partition& p, SliceKind kind) {
  const auto e = slice_basis(p, kind).exponents();
  ExponentSum out{std::accumulate(e.begin(), e.end(), 0), exponent_sum_formula(p, kind), false};
  out.agrees = out.direct == out.formula;
  return out;
}

TransversalityAudit audit_transversality(const Partition& p, const FieldCtx& field) {
  const int n = p.size();
  const auto x = jordan_matrix(p, field);
  const auto basis = slice_basis(p, SliceKind::kL);
  std::vector<std::vector<FieldElem>> rows;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      // [E_ab, x] = E_ab x - x E_ab
      std::vector<FieldElem> img(static_cast<std::size_t>(n * n));
      for (int c = 0; c < n; ++c) img[static_cast<std::size_t>(a * n + c)] = x.coeff(b, c, 0);
      for (int r = 0; r < n; ++r) {
        auto& e = img[static_cast<std::size_t>(r * n + b)];
        e = field.sub(e, x.coeff(r, a, 0));
      }
      rows.push_back(std::move(img));
    }
  }
  for (const auto& e : basis.entries) {
    std::vector<FieldElem> v(static_cast<std::size_t>(n * n));
    v[static_cast<std::size_t>(e.row * n + e.col)] = field.one();
    rows.push_back(std::move(v));
  }
  TransversalityAudit out{};
  out.rank = rank_over_field(field, std::move(rows));
  out.bracket_rank = bracket_rank(x);
  out.slice_dim = basis.dim();
  for (int a : p.parts()) {
    for (int b : p.parts()) out.centralizer_dim += std::min(a, b);
  }
  out.pass = out.rank == static_cast<std::size_t>(n * n) && out.slice_dim == out.centralizer_dim &&
             out.bracket_rank + static_cast<std::size_t>(out.slice_dim) == static_cast<std::size_t>(n * n);
  return out;
}

namespace {

// x + A (+ z I) from slice coordinates; coordinates[k] scaled by lambda^{exp}.
JetMatrix slice_point(const JetMatrix& x, const SliceBasis& basis, const std::vector<TruncSeries>& coords,
                      std::optional<FieldElem> lambda) {
  JetMatrix y = x;
  const auto& f = x.ctx().field();
  auto scaled = [&](const TruncSeries& s, int exponent) {
    return lambda ? ts_scale(s, f.pow(*lambda, static_cast<std::uint64_t>(exponent))) : s;
  };
  for (std::size_t k = 0; k < basis.entries.size(); ++k) {
    const auto& e = basis.entries[k];
    y.set(e.row, e.col, y.at(e.row, e.col) + scaled(coords[k], e.exponent));
  }
  if (basis.has_center) y = shift_scalar(y, scaled(coords.back(), basis.center_exponent));
  return y;
}

}  // namespace

EquivarianceAudit audit_equivariance(const Partition& p, SliceKind kind, const FieldCtx& field, int m,
                                     std::uint64_t samples, std::uint64_t seed) {
  if (m < 0 || m > 1) throw Error(Errc::kBadConfig, "equivariance audit runs at m = 0 or 1");
  const auto ctx = TruncCtx::make(field, m);
  const auto x = jordan_matrix(p, ctx);
  const auto basis = slice_basis(p, kind);
  const auto dim = static_cast<std::uint64_t>(basis.dim());
  const std::uint64_t ring = ring_size(ctx);

  // Exhaustive when ring^dim fits the limit.
  std::uint64_t total = 1;
  bool exhaustive = true;
  for (std::uint64_t d = 0; d < dim; ++d) {
    if (total > kExhaustiveLimit / ring) {
      exhaustive = false;
      break;
    }
    total *= ring;
  }
  EquivarianceAudit out;
  out.exhaustive = exhaustive;
  const std::uint64_t count = exhaustive ? total : samples;
  std::mt19937_64 rng(seed);
  std::vector<TruncSeries> coords(dim, TruncSeries(ctx));
  const auto units = field.units();
  for (std::uint64_t s = 0; s < count; ++s) {
    std::uint64_t idx = s;
    for (auto& c : coords) {
      if (exhaustive) {
        c = ring_element(ctx, idx % ring);
        idx /= ring;
      } else {
        c = ring_element(ctx, rng() % ring);
      }
    }
    const auto base = charpoly(slice_point(x, basis, coords, std::nullopt));
    for (auto lambda : units) {
      const auto lhs = charpoly(slice_point(x, basis, coords, lambda));
      if (!(lhs == weighted_scale(base, lambda))) {
        if (!out.first_failure) {
          out.first_failure = "lambda=" + std::to_string(lambda.code) + " point " + std::to_string(s) +
                              ": " + to_string(lhs) + " vs " + to_string(weighted_scale(base, lambda));
        }
        ++out.failures;
      }
    }
    ++out.points;
  }
  return out;
}

OrbitJumpAudit audit_orbit_jump(const Partition& p, const FieldCtx& field) {
  const auto ctx = TruncCtx::make(field, 0);
  const auto x = jordan_matrix(p, ctx);
  const auto basis = slice_basis(p, SliceKind::kL);
  const std::uint64_t q = field.q();
  std::uint64_t total = 1;
  for (std::size_t d = 0; d < basis.entries.size(); ++d) {
    if (total > kOrbitSweepLimit / q) throw Error(Errc::kTooLarge, "slice sweep exceeds 2^24 points");
    total *= q;
  }
  OrbitJumpAudit out{bracket_rank(x), 0, 0, std::nullopt, true};
  for (std::uint64_t s = 1; s < total; ++s) {
    JetMatrix y = x;
    std::uint64_t idx = s;
    for (const auto& e : basis.entries) {
      y.coeff(e.row, e.col, 0) = FieldElem{static_cast<std::uint32_t>(idx % q)};
      idx /= q;
    }
    ++out.points;
    if (!is_nilpotent_jet(y)) continue;
    ++out.nilpotent;
    const auto r = bracket_rank(y);
    out.min_rank = out.min_rank ? std::min(*out.min_rank, r) : r;
    if (r <= out.base_rank) out.pass = false;
  }
  return out;
}

ThresholdVerdict subregular_threshold(const Partition& p) {
  const int n = p.size();
  const auto basis = slice_basis(p, SliceKind::kM);
  const auto e = basis.exponents();
  ThresholdVerdict v{};
  v.sum_m = std::accumulate(e.begin(), e.end(), 0);
  v.threshold = n * (n + 1) / 2 + 1;
  v.exceeded = v.sum_m > v.threshold;
  v.expected = !p.is_regular() && !p.is_subregular();
  v.center_exponent_one = basis.has_center && basis.center_exponent == 1;
  return v;
}

WeightReport weight_report(const Partition& p, SliceKind kind) {
  const int n = p.size();
  const auto basis = slice_basis(p, kind);
  WeightReport r{p, kind, basis.exponents(), 0, exponent_sum_formula(p, kind), n * (n + 1) / 2, n * (n + 1) / 2 + 1,
                 false, false, basis.certified};
  r.sum = std::accumulate(r.exponents.begin(), r.exponents.end(), 0);
  r.exceeds_l = r.sum > r.threshold_l;
  r.exceeds_m = r.sum > r.threshold_m;
  return r;
}

nlohmann::json to_json(const WeightReport& r) {
  return {{"partition", to_string(r.partition)},
          {"kind", std::string(slice_kind_name(r.kind))},
          {"n", r.partition.size()},
          {"exponents", r.exponents},
          {"sum", r.sum},
          {"formula", r.formula},
          {"threshold_l", r.threshold_l},
          {"threshold_m", r.threshold_m},
          {"exceeds_l", r.exceeds_l},
          {"exceeds_m", r.exceeds_m},
          {"certified", r.certified}};
}

std::string to_table(const std::vector<WeightReport>& reports) {
  std::ostringstream os;
  os << "partition      kind  dim  sum  formula  n(n+1)/2  >L   >M   certified\n";
  for (const auto& r : reports) {
    std::string part = to_string(r.partition);
    part.resize(std::max<std::size_t>(part.size(), 14), ' ');
    os << part << " " << slice_kind_name(r.kind) << "     ";
    auto col = [&](auto v, int w) {
      std::string s = std::to_string(v);
      os << s << std::string(static_cast<std::size_t>(std::max(1, w - static_cast<int>(s.size()))), ' ');
    };
    col(r.exponents.size(), 5);
    col(r.sum, 5);
    col(r.formula, 9);
    col(r.threshold_l, 10);
    os << (r.exceeds_l ? "yes  " : "no   ") << (r.exceeds_m ? "yes  " : "no   ") << (r.certified ? "yes" : "no")
       << "\n";
  }
  return os.str();
}

}  // namespace jetforge
