#include "oracle.hpp"

#include <algorithm>
#include <numeric>

namespace oracle {
namespace {

using Poly = std::vector<TruncSeries>;  // in z, low degree first

Poly poly_mul(const Poly& a, const Poly& b, const TruncCtx& ctx) {
  Poly out(a.size() + b.size() - 1, TruncSeries(ctx));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  }
  return out;
}

}  // namespace

CharCoeffs leibniz_charpoly(const JetMatrix& a) {
  const int n = a.n();
  const auto& ctx = a.ctx();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Poly total(static_cast<std::size_t>(n + 1), TruncSeries(ctx));
  do {
    int inversions = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) inversions += perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)];
    }
    Poly term{TruncSeries::constant(ctx, ctx.field().one())};
    for (int i = 0; i < n; ++i) {
      const int j = perm[static_cast<std::size_t>(i)];
      Poly factor{-a.at(i, j)};
      if (i == j) factor.push_back(TruncSeries::constant(ctx, ctx.field().one()));
      term = poly_mul(term, factor, ctx);
    }
    for (std::size_t d = 0; d < term.size(); ++d) {
      total[d] = (inversions % 2 == 0) ? total[d] + term[d] : total[d] - term[d];
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  CharCoeffs out(n, ctx);
  for (int i = 1; i <= n; ++i) out[i] = total[static_cast<std::size_t>(n - i)];
  return out;
}

JetMatrix matrix_from_index(int n, const TruncCtx& ctx, std::uint64_t index) {
  JetMatrix m(n, ctx);
  const std::uint32_t q = ctx.field().q();
  for (int layer = ctx.m(); layer >= 0; --layer) {
    for (int pos = n * n - 1; pos >= 0; --pos) {
      m.coeff(pos / n, pos % n, layer) = FieldElem{static_cast<std::uint32_t>(index % q)};
      index /= q;
    }
  }
  return m;
}

std::map<std::string, std::uint64_t> brute_fiber_table(int n, const TruncCtx& ctx) {
  std::uint64_t total = 1;
  for (int i = 0; i < n * n * ctx.len(); ++i) total *= ctx.field().q();
  std::map<std::string, std::uint64_t> table;
  for (std::uint64_t idx = 0; idx < total; ++idx) ++table[to_string(leibniz_charpoly(matrix_from_index(n, ctx, idx)))];
  return table;
}

}  // namespace oracle
