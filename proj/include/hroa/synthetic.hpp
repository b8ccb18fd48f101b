#pragma once

// Deterministic synthetic workloads for benchmarks and demos.

#include "hroa/workload.hpp"

#include <cstdint>

namespace hroa {

/// ASes whose prefixes are all one length and packed under a few shorter
/// covering prefixes, with no covering prefix itself authorized. No AS can
/// use maxLength (scatter degree 1), but prefixes share bitmap sub-trees.
/// About a fifth of the ASes also carry IPv6 prefixes.
Workload scattered_workload(std::size_t prefixes, std::uint64_t seed = 1);

/// Mixed workload: clustered prefixes of varying lengths plus some address
/// blocks with a small ΔL.
Workload mixed_workload(std::size_t rows, std::uint64_t seed = 1);

} // namespace hroa
