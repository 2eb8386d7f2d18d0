#pragma once

#include "jetforge/field.hpp"

#include <vector>

namespace jetforge {

// Rank over F_q of the matrix whose rows are given; rows may have any common length.
std::size_t rank_over_field(const FieldCtx& field, std::vector<std::vector<FieldElem>> rows);

}  // namespace jetforge
