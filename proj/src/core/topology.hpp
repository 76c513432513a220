#pragma once

#include <cstdint>

namespace prf {

// n = odd_part * 2^(4d+c) with 0 <= c <= 3, and the vector-field count on the
// sphere S^(n-1): rho = 8d + 2^c.
struct AdamsDecomposition {
    std::uint64_t n = 0;
    std::uint64_t odd_part = 0;
    int d = 0;
    int c = 0;
    std::uint64_t rho = 0;
};

AdamsDecomposition adams_rho(std::uint64_t n);

// F(l) = max{ s : s < rho(l - s) }, scanned over 0 <= s <= l-1.
std::uint64_t ferus_number(std::uint64_t l);

// Dimension restriction p <= rho(n) - 1 for totally geodesic foliations with
// positive constant mixed curvature.
bool ferus_check(std::uint64_t p, std::uint64_t n);

} // namespace prf
