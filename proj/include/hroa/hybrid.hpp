#pragma once

// Hybrid encoding: address blocks whose height reaches the ΔL threshold stay
// maxLength-encoded, the rest are expanded and bitmap-encoded. Bitmap blocks
// of one AS can additionally be packed into aggregated groups.

#include "hroa/bm_codec.hpp"
#include "hroa/prefix.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

namespace hroa {

/// Threshold value that never selects the maxLength path.
inline constexpr int kNeverMaxLength = std::numeric_limits<int>::max();

/// Largest PDU the aggregated types may grow to.
inline constexpr std::size_t kMaxPduBytes = 65535;

struct HybridConfig {
  int delta_l_threshold = 3;
  HangingLevels v4 = HangingLevels::default_for(Family::v4);
  HangingLevels v6 = HangingLevels::default_for(Family::v6);
  bool aggregate = false;
  /// Re-run minimal compression on address-block input.
  bool recompress = false;
  int expansion_cap = kDefaultExpansionCap;

  const HangingLevels &levels(Family f) const noexcept { return f == Family::v4 ? v4 : v6; }
  /// Throws RangeError on an inconsistent configuration.
  void validate() const;
};

struct AggregatedGroup {
  std::uint32_t asn = 0;
  Family family = Family::v4;
  std::vector<SubTreeBlock> blocks;

  friend bool operator==(const AggregatedGroup &, const AggregatedGroup &) = default;
};

struct HybridPayload {
  std::uint32_t asn = 0;
  std::vector<AddressBlock> ml_blocks;
  std::vector<SubTreeBlock> bm_blocks;
  /// Present when aggregation is on; carries the same blocks as bm_blocks.
  std::vector<AggregatedGroup> aggregated;

  /// PDUs this payload emits: one per ml block plus one per bm block, or
  /// one per aggregated group when aggregated.
  std::size_t pdu_count() const noexcept {
    return ml_blocks.size() + (aggregated.empty() ? bm_blocks.size() : aggregated.size());
  }
};

/// Prefix input: minimal compression first, then the threshold split.
HybridPayload hybrid_encode(const HybridConfig &cfg, std::uint32_t asn, const PrefixSet &prefixes);

/// Address-block input: used as given unless cfg.recompress.
HybridPayload hybrid_encode(const HybridConfig &cfg, std::uint32_t asn,
                            std::span<const AddressBlock> blocks);

/// Rows as read from a VRP file: an AS whose rows are all single prefixes is
/// treated as a prefix set, otherwise as address blocks.
HybridPayload hybrid_encode_rows(const HybridConfig &cfg, std::uint32_t asn,
                                 std::span<const AddressBlock> rows);

std::map<std::uint32_t, PrefixSet> hybrid_decode(const HybridConfig &cfg,
                                                 std::span<const HybridPayload> payloads);

/// Packs same-AS, same-family blocks into one group. Throws RangeError on an
/// empty list or mixed families.
AggregatedGroup aggregate_blocks(std::span<const SubTreeBlock> blocks, std::uint32_t asn);

/// Groups per family, split so that no group's wire form exceeds max_pdu_bytes.
std::vector<AggregatedGroup> aggregate_for_wire(std::span<const SubTreeBlock> blocks,
                                                std::uint32_t asn,
                                                std::size_t max_pdu_bytes = kMaxPduBytes);

} // namespace hroa
