#pragma once

#include <cmath>
#include <limits>

namespace ruin {

// Extended reals are IEEE doubles: +inf marks divergence of an exponential
// moment and already compares above every finite value. -inf and NaN never
// leave this library.
using ExtendedReal = double;

inline constexpr ExtendedReal kInfinity = std::numeric_limits<double>::infinity();

inline bool is_divergent(ExtendedReal x) noexcept { return std::isinf(x) && x > 0; }

}  // namespace ruin
