#pragma once

// Chooses hanging levels that minimize the encoded size of a workload.
//
// With successive hanging levels i < j, the prefixes with lengths in
// [i, j-1] fall into `num(i, j)` non-empty sub-trees rooted at level i, each
// costing one block. Cuts are found by dynamic programming over the level:
//   best(0) = 0,  best(j) = min over j-h_max <= i < j of best(i) + num(i,j) * size(j-i)
// with the terminal segment ending at width+1.

#include "hroa/bm_codec.hpp"
#include "hroa/prefix.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hroa {

struct CostModel {
  /// PDU header plus the ASN.
  std::size_t per_block_overhead_bytes = 12;
  std::size_t v4_id_bytes = 4;
  std::size_t v6_id_bytes = 16;

  std::size_t id_bytes(Family f) const noexcept {
    return f == Family::v4 ? v4_id_bytes : v6_id_bytes;
  }
  /// ceil(2^h / 8), at least one byte.
  static std::size_t bitmap_bytes(int height) noexcept {
    return height <= 3 ? 1 : (std::size_t{1} << height) / 8;
  }
  std::size_t block_bytes(Family f, int height) const noexcept {
    return per_block_overhead_bytes + id_bytes(f) + bitmap_bytes(height);
  }
};

/// Distinct level-i trie nodes with at least one workload prefix whose
/// length lies in [i, j-1].
std::size_t count_nonempty_subtrees(std::span<const Prefix> workload, int i, int j);

struct LevelPlan {
  std::vector<int> levels; // starts at 0
  std::size_t cost = 0;
};

/// The DP over an abstract trie of depth `width`: `segment_cost(i, j)` is the
/// cost of a sub-tree layer spanning levels [i, j-1]. Ties prefer fewer cuts,
/// then the lexicographically smaller level list.
LevelPlan optimize_cuts(int width, int h_max,
                        const std::function<std::size_t(int, int)> &segment_cost);

/// Optimal profile for a single-family workload. Throws RangeError when
/// h_max < 2, h_max exceeds the bitmap limit, the workload is empty or mixes
/// families.
struct OptimizedLevels {
  HangingLevels levels;
  std::size_t cost = 0;
};
OptimizedLevels optimize_levels(std::span<const Prefix> workload, const CostModel &model = {},
                                int h_max = kDefaultMaxGap);

/// Cost of actually encoding `workload` under `cfg`, summed block by block.
std::size_t simulated_cost(std::span<const Prefix> workload, const HangingLevels &cfg,
                           const CostModel &model = {});

} // namespace hroa
