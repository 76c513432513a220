#include "core/topology.hpp"

#include <bit>

#include "core/errors.hpp"

namespace prf {

AdamsDecomposition adams_rho(std::uint64_t n) {
    if (n == 0) raise(ErrorCode::InvalidArgument, "adams_rho requires n >= 1");
    AdamsDecomposition out;
    out.n = n;
    const int v2 = std::countr_zero(n);
    out.odd_part = n >> v2;
    out.d = v2 / 4;
    out.c = v2 % 4;
    out.rho = 8ull * static_cast<std::uint64_t>(out.d) + (1ull << out.c);
    return out;
}

std::uint64_t ferus_number(std::uint64_t l) {
    if (l < 2) raise(ErrorCode::InvalidArgument, "ferus_number requires l >= 2");
    std::uint64_t best = 0; // s = 0 always qualifies: 0 < rho(l) since rho >= 1
    for (std::uint64_t s = 1; s < l; ++s) {
        if (s < adams_rho(l - s).rho) best = s;
    }
    return best;
}

bool ferus_check(std::uint64_t p, std::uint64_t n) {
    if (p == 0) raise(ErrorCode::InvalidArgument, "ferus_check requires p >= 1");
    return p <= adams_rho(n).rho - 1;
}

} // namespace prf
