#include "lnl/matrix.hpp"

#include <cmath>

namespace lnl {

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

bool all_finite(const Matrix& m) {
    return all_finite(std::span<const double>(m.data(), m.size()));
}

}  // namespace lnl
