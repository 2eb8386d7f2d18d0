#include "jetforge/field.hpp"

#include "jetforge/error.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>

namespace jetforge {
namespace {

struct ModulusRow {
  std::uint32_t ell;
  std::uint32_t k;
  std::array<std::uint32_t, 16> tail;
};

constexpr ModulusRow kModuli[] = {
#include "moduli_table.inc"
};

constexpr std::uint32_t kMaxQ = 1U << 16;

using Poly = std::vector<std::uint32_t>;  // constant term first

void trim(Poly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

std::uint32_t inv_mod(std::uint32_t a, std::uint32_t p) {
  std::uint64_t result = 1;
  std::uint64_t b = a % p;
  std::uint32_t e = p - 2;
  while (e > 0) {
    if (e & 1U) result = result * b % p;
    b = b * b % p;
    e >>= 1U;
  }
  return static_cast<std::uint32_t>(result);
}

// a mod b over F_p; b nonzero.
Poly poly_rem(Poly a, const Poly& b, std::uint32_t p) {
  trim(a);
  const std::uint32_t lead_inv = inv_mod(b.back(), p);
  while (a.size() >= b.size()) {
    const std::uint64_t c = static_cast<std::uint64_t>(a.back()) * lead_inv % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::uint64_t sub = c * b[i] % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
  return a;
}

// Trial division by every monic polynomial of degree 1..k/2.
bool is_irreducible(const Poly& f, std::uint32_t p) {
  const std::size_t k = f.size() - 1;
  for (std::size_t d = 1; d <= k / 2; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    Poly g(d + 1, 0);
    g[d] = 1;
    for (std::uint64_t code = 0; code < count; ++code) {
      std::uint64_t c = code;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<std::uint32_t>(c % p);
        c /= p;
      }
      if (poly_rem(f, g, p).empty()) return false;
    }
  }
  return true;
}

Poly unpack(std::uint32_t code, std::uint32_t ell, std::uint32_t k) {
  Poly out(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    out[i] = code % ell;
    code /= ell;
  }
  return out;
}

std::uint32_t pack(const Poly& coords, std::uint32_t ell) {
  std::uint32_t code = 0;
  for (std::size_t i = coords.size(); i-- > 0;) code = code * ell + coords[i];
  return code;
}

// Schoolbook product reduced modulo the monic modulus.
std::uint32_t poly_mulmod(std::uint32_t a, std::uint32_t b, const detail::FieldTables& t) {
  const Poly pa = unpack(a, t.ell, t.k);
  const Poly pb = unpack(b, t.ell, t.k);
  Poly prod(2 * t.k - 1, 0);
  for (std::uint32_t i = 0; i < t.k; ++i) {
    for (std::uint32_t j = 0; j < t.k; ++j) {
      prod[i + j] = static_cast<std::uint32_t>((prod[i + j] + static_cast<std::uint64_t>(pa[i]) * pb[j]) % t.ell);
    }
  }
  Poly rem = poly_rem(prod, t.modulus, t.ell);
  rem.resize(t.k, 0);
  return pack(rem, t.ell);
}

std::vector<std::uint64_t> prime_factors(std::uint64_t v) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) {
      out.push_back(d);
      while (v % d == 0) v /= d;
    }
  }
  if (v > 1) out.push_back(v);
  return out;
}

std::shared_ptr<const detail::FieldTables> build_tables(std::uint32_t ell, std::uint32_t k, Poly modulus) {
  auto t = std::make_shared<detail::FieldTables>();
  t->ell = ell;
  t->k = k;
  t->q = 1;
  for (std::uint32_t i = 0; i < k; ++i) t->q *= ell;
  t->modulus = std::move(modulus);
  const std::uint32_t q = t->q;

  t->inv_tab.assign(q, 0);
  if (k == 1) {
    for (std::uint32_t a = 1; a < q; ++a) t->inv_tab[a] = inv_mod(a, q);
  } else {
    const auto factors = prime_factors(q - 1);
    auto slow_pow = [&](std::uint32_t base, std::uint64_t e) {
      std::uint32_t r = 1;
      while (e > 0) {
        if (e & 1U) r = poly_mulmod(r, base, *t);
        base = poly_mulmod(base, base, *t);
        e >>= 1U;
      }
      return r;
    };
    std::uint32_t gen = 0;
    for (std::uint32_t g = 2; g < q && gen == 0; ++g) {
      if (std::all_of(factors.begin(), factors.end(), [&](std::uint64_t f) { return slow_pow(g, (q - 1) / f) != 1; })) {
        gen = g;
      }
    }
    t->exp_tab.assign(2 * (q - 1), 0);
    t->log_tab.assign(q, 0);
    std::uint32_t cur = 1;
    for (std::uint32_t i = 0; i < q - 1; ++i) {
      t->exp_tab[i] = cur;
      t->exp_tab[i + q - 1] = cur;
      t->log_tab[cur] = i;
      cur = poly_mulmod(cur, gen, *t);
    }
    for (std::uint32_t a = 1; a < q; ++a) t->inv_tab[a] = t->exp_tab[(q - 1 - t->log_tab[a]) % (q - 1)];
  }

  if (q <= detail::kSmallTableLimit) {
    t->add_tab.resize(static_cast<std::size_t>(q) * q);
    t->sub_tab.resize(static_cast<std::size_t>(q) * q);
    t->mul_tab.resize(static_cast<std::size_t>(q) * q);
    for (std::uint32_t a = 0; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        const std::size_t i = static_cast<std::size_t>(a) * q + b;
        t->add_tab[i] = static_cast<std::uint16_t>(t->add_slow(a, b));
        t->sub_tab[i] = static_cast<std::uint16_t>(t->sub_slow(a, b));
        t->mul_tab[i] = static_cast<std::uint16_t>(t->mul_slow(a, b));
      }
    }
  }
  return t;
}

}  // namespace

namespace detail {

std::uint32_t FieldTables::add_slow(std::uint32_t a, std::uint32_t b) const {
  if (k == 1) return (a + b) % ell;
  std::uint32_t out = 0;
  std::uint32_t place = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    out += ((a % ell + b % ell) % ell) * place;
    a /= ell;
    b /= ell;
    place *= ell;
  }
  return out;
}

std::uint32_t FieldTables::sub_slow(std::uint32_t a, std::uint32_t b) const {
  if (k == 1) return (a + ell - b) % ell;
  std::uint32_t out = 0;
  std::uint32_t place = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    out += ((a % ell + ell - b % ell) % ell) * place;
    a /= ell;
    b /= ell;
    place *= ell;
  }
  return out;
}

std::uint32_t FieldTables::mul_slow(std::uint32_t a, std::uint32_t b) const {
  if (k == 1) return static_cast<std::uint32_t>(static_cast<std::uint64_t>(a) * b % ell);
  if (a == 0 || b == 0) return 0;
  return exp_tab[log_tab[a] + log_tab[b]];
}

}  // namespace detail

bool is_prime(std::uint64_t v) noexcept {
  if (v < 2) return false;
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d == 0) return false;
  }
  return true;
}

FieldCtx FieldCtx::make(std::uint32_t ell, std::uint32_t k) {
  if (!is_prime(ell)) throw Error(Errc::kNonPrime, std::to_string(ell) + " is not prime");
  if (k == 0) throw Error(Errc::kBadConfig, "extension degree must be >= 1");
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    q *= ell;
    if (q > kMaxQ) {
      throw Error(Errc::kTooLarge, std::to_string(ell) + "^" + std::to_string(k) + " exceeds 2^16");
    }
  }

  // Contexts are interned so repeated construction shares tables.
  static std::mutex mu;
  static std::map<std::pair<std::uint32_t, std::uint32_t>, std::shared_ptr<const detail::FieldTables>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find({ell, k}); it != cache.end()) return FieldCtx(it->second);

  Poly modulus;
  if (k == 1) {
    modulus = {0, 1};
  } else {
    const auto* row = std::find_if(std::begin(kModuli), std::end(kModuli),
                                   [&](const ModulusRow& r) { return r.ell == ell && r.k == k; });
    if (row == std::end(kModuli)) {
      throw Error(Errc::kNoModulusInTable, "no modulus for F_" + std::to_string(ell) + "^" + std::to_string(k));
    }
    modulus.assign(row->tail.begin(), row->tail.begin() + k);
    modulus.push_back(1);
    if (!is_irreducible(modulus, ell)) {
      throw Error(Errc::kNoModulusInTable, "table modulus is reducible");
    }
  }
  auto tables = build_tables(ell, k, std::move(modulus));
  cache.emplace(std::pair{ell, k}, tables);
  return FieldCtx(std::move(tables));
}

FieldElem FieldCtx::from_int(std::int64_t v) const noexcept {
  const auto e = static_cast<std::int64_t>(ell());
  return {static_cast<std::uint32_t>(((v % e) + e) % e)};
}

FieldElem FieldCtx::element(std::uint32_t code) const {
  if (code >= q()) throw Error(Errc::kBadConfig, "element code " + std::to_string(code) + " not in " + name());
  return {code};
}

FieldElem FieldCtx::from_coords(std::span<const std::uint32_t> coords) const {
  Poly c(coords.begin(), coords.end());
  c.resize(k(), 0);
  for (auto& v : c) v %= ell();
  return {pack(c, ell())};
}

std::vector<std::uint32_t> FieldCtx::coords(FieldElem a) const { return unpack(a.code, ell(), k()); }

FieldElem FieldCtx::pow(FieldElem a, std::uint64_t e) const noexcept {
  FieldElem result = one();
  while (e > 0) {
    if (e & 1U) result = mul(result, a);
    a = mul(a, a);
    e >>= 1U;
  }
  return result;
}

std::vector<FieldElem> FieldCtx::elements() const {
  std::vector<FieldElem> out(q());
  for (std::uint32_t i = 0; i < q(); ++i) out[i] = {i};
  return out;
}

std::vector<FieldElem> FieldCtx::units() const {
  std::vector<FieldElem> out;
  out.reserve(q() - 1);
  for (std::uint32_t i = 1; i < q(); ++i) out.push_back({i});
  return out;
}

std::string FieldCtx::name() const { return "F_" + std::to_string(q()); }

}  // namespace jetforge
