#include "mfd/stencil.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace mfd {
namespace {

// Derivative of the Lagrange basis polynomial k at x = 0 for integer nodes.
double lagrange_derivative_at_zero(const std::vector<int>& nodes, std::size_t k) {
    double total = 0.0;
    for (std::size_t m = 0; m < nodes.size(); ++m) {
        if (m == k) continue;
        double term = 1.0 / (nodes[k] - nodes[m]);
        for (std::size_t l = 0; l < nodes.size(); ++l) {
            if (l == k || l == m) continue;
            term *= (0.0 - nodes[l]) / static_cast<double>(nodes[k] - nodes[l]);
        }
        total += term;
    }
    return total;
}

struct WeightTable {
    // [count][-start][m]
    std::array<std::array<std::array<double, 5>, 5>, 6> w{};

    WeightTable() {
        for (int count = 2; count <= 5; ++count) {
            for (int start = -(count - 1); start <= 0; ++start) {
                std::vector<int> nodes;
                for (int m = 0; m < count; ++m) nodes.push_back(start + m);
                for (int m = 0; m < count; ++m) {
                    w[count][-start][m] = lagrange_derivative_at_zero(nodes, m);
                }
            }
        }
    }
};

const WeightTable& table() {
    static const WeightTable t;
    return t;
}

}  // namespace

std::span<const double> derivative_weights(int start, int count) {
    if (count < 2 || count > 5 || start > 0 || start < -(count - 1)) {
        throw std::out_of_range("unsupported stencil window");
    }
    const auto& row = table().w[count][-start];
    return {row.data(), static_cast<std::size_t>(count)};
}

}  // namespace mfd
