#pragma once

#include <algorithm>
#include <optional>
#include <span>

namespace mfd {

// Weights of the first-derivative stencil on the consecutive integer offsets
// start, start+1, ..., start+count-1, evaluated at offset 0 (unit spacing).
// Exact for polynomials of degree count-1. Supports 2 <= count <= 5 and
// -(count-1) <= start <= 0.
std::span<const double> derivative_weights(int start, int count);

// First derivative along one grid line through the current node.
//
// `usable(d)` reports whether the node at offset d is available and `value(d)`
// returns its sample. The stencil uses the longest run of usable nodes within
// `order` steps on either side: the centred (order+1)-point stencil when the
// run allows it, otherwise a shifted window of the same length, otherwise the
// whole (shorter) run. Returns nullopt if fewer than two nodes are usable.
template <class T, class Usable, class Value>
std::optional<T> line_derivative(int order, double spacing, Usable usable, Value value) {
    int lo = 0;
    while (lo > -order && usable(lo - 1)) --lo;
    int hi = 0;
    while (hi < order && usable(hi + 1)) ++hi;
    const int run = hi - lo + 1;
    if (run < 2) return std::nullopt;
    const int count = std::min(order + 1, run);
    const int start = std::clamp(-(count - 1) / 2, lo, hi - count + 1);
    const auto w = derivative_weights(start, count);
    T acc{};
    for (int m = 0; m < count; ++m) acc += w[m] * value(start + m);
    return acc / spacing;
}

}  // namespace mfd
