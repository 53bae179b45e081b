#pragma once

#include <cstddef>
#include <span>

namespace mfd {

// Pairwise (cascade) summation with a fixed split order, so a given input
// vector always reduces to the same bits.
double pairwise_sum(std::span<const double> values);

}  // namespace mfd
