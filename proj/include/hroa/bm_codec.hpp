#pragma once

// Bitmap-based sub-tree encoding of authorized prefixes.
//
// The prefix trie is cut at a sequence of hanging levels. Every node on a
// hanging level l roots a sub-tree that reaches down to the level before the
// next hanging level (or to the last trie level). A sub-tree of height h is
// carried as a 2^h-bit bitmap: bit 0 is the withdrawal flag, bit y marks the
// node numbered y in level order (root 1, children of n are 2n and 2n+1).
// The root prefix is carried as an identifier: a set bit followed by the
// root's first l bits, so the identifier's bit length recovers l.

#include "hroa/prefix.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace hroa {

/// Bitmaps are held in 64 bits, which bounds sub-tree height at 6.
inline constexpr int kMaxSubtreeHeight = 6;
inline constexpr int kDefaultMaxGap = 6;

class HangingLevels {
public:
  /// Validates structure only: starts at 0, strictly increasing, last level
  /// at most width-1. Throws RangeError.
  HangingLevels(Family family, std::vector<int> levels);

  /// Additionally requires every sub-tree height to be <= h_max.
  static HangingLevels checked(Family family, std::vector<int> levels,
                               int h_max = kDefaultMaxGap);

  /// 0, step, 2*step, ... up to width-1.
  static HangingLevels multiples(Family family, int step);

  /// Multiples of 5: sub-trees of height 5 (terminal 3 for v4, 4 for v6).
  static HangingLevels default_for(Family family) { return multiples(family, 5); }

  /// Adds level 0 to `anchors` and inserts levels `fill_step` apart wherever
  /// a gap (including the terminal sub-tree) exceeds h_max.
  static HangingLevels completed(Family family, std::vector<int> anchors,
                                 int h_max = kDefaultMaxGap, int fill_step = 5);

  Family family() const noexcept { return family_; }
  const std::vector<int> &levels() const noexcept { return levels_; }
  bool contains(int level) const noexcept;

  /// Largest hanging level <= len.
  int nearest(int len) const noexcept { return nearest_[len]; }

  /// Height of the sub-tree rooted at `level`. Throws RangeError if `level`
  /// is not a hanging level.
  int subtree_height(int level) const;

  int max_height() const noexcept;

  friend bool operator==(const HangingLevels &a, const HangingLevels &b) noexcept {
    return a.family_ == b.family_ && a.levels_ == b.levels_;
  }

private:
  Family family_;
  std::vector<int> levels_;
  std::vector<int> nearest_; // indexed by prefix length
};

inline int nearest_hanging_level(const HangingLevels &cfg, int len) { return cfg.nearest(len); }
inline int subtree_height(const HangingLevels &cfg, int level) { return cfg.subtree_height(level); }

struct SubTreeId {
  Family family = Family::v4;
  u128 value = 1;

  int level() const noexcept { return bit_length(value) - 1; }
  /// The sub-tree's root prefix.
  Prefix root() const;

  friend auto operator<=>(const SubTreeId &, const SubTreeId &) = default;
  friend bool operator==(const SubTreeId &, const SubTreeId &) = default;
};

struct SubTreeBlock {
  SubTreeId id;
  std::uint64_t bitmap = 0;
  int height = 0;

  bool withdraw() const noexcept { return bitmap & 1; }

  friend auto operator<=>(const SubTreeBlock &, const SubTreeBlock &) = default;
  friend bool operator==(const SubTreeBlock &, const SubTreeBlock &) = default;
};

/// 2^level + first `level` bits of the prefix. Throws RangeError if
/// level > prefix length.
SubTreeId make_subtree_id(const Prefix &prefix, int level);

/// 2^(len-level) + bits level+1..len of the prefix. Throws RangeError when
/// the prefix lies below the sub-tree (len - level >= height).
unsigned make_node_number(const Prefix &prefix, int level, int height);

/// One block per touched sub-tree, sorted by id; bit 0 of every bitmap is
/// the withdraw flag. Throws RangeError on a family mismatch or a sub-tree
/// taller than kMaxSubtreeHeight.
std::vector<SubTreeBlock> encode_batch(const HangingLevels &cfg, std::span<const Prefix> prefixes,
                                       bool withdraw = false);
std::vector<SubTreeBlock> encode_batch(const HangingLevels &cfg, const PrefixSet &prefixes,
                                       bool withdraw = false);

struct DecodedBlock {
  bool withdraw = false;
  std::vector<Prefix> prefixes;
};

/// Inverse of encode_batch for one block. Throws RangeError on id 0, an id
/// whose level is not hanging, or bitmap bits beyond 2^height.
DecodedBlock decode_block(const HangingLevels &cfg, const SubTreeBlock &block);

/// Appends decoded prefixes to `out`; returns the withdraw flag.
bool decode_block_into(const HangingLevels &cfg, const SubTreeBlock &block,
                       std::vector<Prefix> &out);

/// Convenience: decode every block and collect the prefixes.
PrefixSet decode_blocks(const HangingLevels &cfg, std::span<const SubTreeBlock> blocks);

enum class StmFlag : std::uint8_t { announce = 0, withdraw = 1 };

/// Sub-tree map: sub-tree id -> bitmap, for one AS and one flag.
class Stm {
public:
  Stm(std::uint32_t asn, StmFlag flag) : asn_(asn), flag_(flag) {}

  /// OR when the block's flag matches, AND-NOT otherwise. Entries left with
  /// no node bits are dropped; stored bit 0 always equals the map's flag.
  void insert(const SubTreeBlock &block);

  std::uint32_t asn() const noexcept { return asn_; }
  StmFlag flag() const noexcept { return flag_; }
  bool empty() const noexcept { return table_.empty(); }
  std::size_t size() const noexcept { return table_.size(); }

  /// Stored bitmap for `id`, 0 when absent.
  std::uint64_t bitmap(const SubTreeId &id) const;

  /// Entries as blocks, sorted by id.
  std::vector<SubTreeBlock> blocks() const;

private:
  struct Entry {
    std::uint64_t bitmap;
    int height;
  };
  std::uint32_t asn_;
  StmFlag flag_;
  std::map<SubTreeId, Entry> table_;
};

struct BitmapRoa {
  std::uint32_t asn = 0;
  std::vector<SubTreeBlock> blocks;
};

/// Relying-party cache of bitmap-based ROAs: an announce and a withdraw STM
/// per AS. Single writer; copy to snapshot.
class RpCache {
public:
  struct Pair {
    Stm announce;
    Stm withdraw;
  };

  /// Inserts each block into the STM matching its flag; withdrawal blocks
  /// are applied to the announce STM as well.
  void apply(const BitmapRoa &roa);

  const Pair *find(std::uint32_t asn) const;
  const std::map<std::uint32_t, Pair> &entries() const noexcept { return entries_; }

  /// Announced prefixes per AS.
  std::map<std::uint32_t, PrefixSet> announced(const HangingLevels &v4,
                                               const HangingLevels &v6) const;

private:
  std::map<std::uint32_t, Pair> entries_;
};

} // namespace hroa
