#ifndef VASSFORGE_BIGINT_HPP
#define VASSFORGE_BIGINT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vassforge {

/// Counter values are exact arbitrary-precision integers; fast-growing
/// function values outgrow any fixed width very quickly.
using Big = boost::multiprecision::cpp_int;

/// Dense counter vector (dimensions stay small in every construction here).
using Vec = std::vector<Big>;

inline std::optional<std::int64_t> to_int64(const Big& v) {
    static const Big lo = std::numeric_limits<std::int64_t>::min();
    static const Big hi = std::numeric_limits<std::int64_t>::max();
    if (v < lo || v > hi) return std::nullopt;
    return static_cast<std::int64_t>(v);
}

inline Vec zero_vec(std::size_t dim) { return Vec(dim, Big(0)); }

} // namespace vassforge

#endif
