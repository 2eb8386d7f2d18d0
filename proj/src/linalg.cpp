#include "jetforge/linalg.hpp"

#include <utility>

namespace jetforge {

std::size_t rank_over_field(const FieldCtx& field, std::vector<std::vector<FieldElem>> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c].code == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    const FieldElem inv = field.inv(rows[rank][c]);
    for (auto& v : rows[rank]) v = field.mul(v, inv);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c].code == 0) continue;
      const FieldElem factor = rows[r][c];
      for (std::size_t j = c; j < cols; ++j) rows[r][j] = field.sub(rows[r][j], field.mul(factor, rows[rank][j]));
    }
    ++rank;
  }
  return rank;
}

}  // namespace jetforge
