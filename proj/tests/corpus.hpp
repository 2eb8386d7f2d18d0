#pragma once
// Fixed monic corpus for the truncated valuation-integral bound: degree <= 3,
// constant coefficients, roots of every multiplicity pattern available.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace corpus {

inline std::vector<std::pair<std::uint32_t, std::string>> val_integral_polys() {
  return {
      {2, "z"},         {2, "z^2"},         {2, "z^3"},       {2, "z^2+z"},   {2, "z^3+z^2"},
      {2, "z^2+z+1"},   {2, "z^3+z+1"},     {2, "z^3+1"},     {2, "z^2+1"},   {2, "z^3+z^2+z"},
      {3, "z"},         {3, "z^2"},         {3, "z^3"},       {3, "z^2+1"},   {3, "z^2+2"},
      {3, "z^3+2*z"},   {3, "z^3+1"},       {3, "z^2+2*z+1"}, {3, "z^3+z^2"}, {3, "z^3+2*z+1"},
  };
}

}  // namespace corpus
