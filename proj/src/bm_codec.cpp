#include "hroa/bm_codec.hpp"

#include "hroa/error.hpp"

#include <algorithm>
#include <unordered_map>

namespace hroa {

HangingLevels::HangingLevels(Family family, std::vector<int> levels)
    : family_(family), levels_(std::move(levels)) {
  const int w = width(family);
  if (levels_.empty() || levels_.front() != 0)
    throw RangeError("hanging levels must start at 0");
  for (std::size_t i = 1; i < levels_.size(); ++i)
    if (levels_[i] <= levels_[i - 1])
      throw RangeError("hanging levels must be strictly increasing");
  if (levels_.back() > w - 1)
    throw RangeError("last hanging level " + std::to_string(levels_.back()) + " exceeds " +
                     std::to_string(w - 1));
  nearest_.resize(w + 1);
  std::size_t k = 0;
  for (int len = 0; len <= w; ++len) {
    while (k + 1 < levels_.size() && levels_[k + 1] <= len)
      ++k;
    nearest_[len] = levels_[k];
  }
}

HangingLevels HangingLevels::checked(Family family, std::vector<int> levels, int h_max) {
  HangingLevels cfg(family, std::move(levels));
  if (cfg.max_height() > h_max)
    throw RangeError("sub-tree height " + std::to_string(cfg.max_height()) +
                     " exceeds the cap of " + std::to_string(h_max));
  return cfg;
}

HangingLevels HangingLevels::multiples(Family family, int step) {
  if (step < 1)
    throw RangeError("level step must be positive");
  std::vector<int> levels;
  for (int l = 0; l <= width(family) - 1; l += step)
    levels.push_back(l);
  return HangingLevels(family, std::move(levels));
}

HangingLevels HangingLevels::completed(Family family, std::vector<int> anchors, int h_max,
                                       int fill_step) {
  const int w = width(family);
  if (h_max < 1)
    throw RangeError("h_max must be >= 1");
  fill_step = std::clamp(fill_step, 1, h_max);
  anchors.push_back(0);
  std::sort(anchors.begin(), anchors.end());
  anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
  if (anchors.back() > w - 1 || anchors.front() < 0)
    throw RangeError("hanging level out of range 0.." + std::to_string(w - 1));

  std::vector<int> out;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    out.push_back(anchors[i]);
    const int next = i + 1 < anchors.size() ? anchors[i + 1] : w + 1;
    while (next - out.back() > h_max)
      out.push_back(std::min(out.back() + fill_step, w - 1));
  }
  return HangingLevels(family, std::move(out));
}

bool HangingLevels::contains(int level) const noexcept {
  return std::binary_search(levels_.begin(), levels_.end(), level);
}

int HangingLevels::subtree_height(int level) const {
  auto it = std::lower_bound(levels_.begin(), levels_.end(), level);
  if (it == levels_.end() || *it != level)
    throw RangeError(std::to_string(level) + " is not a hanging level");
  ++it;
  return (it == levels_.end() ? width(family_) + 1 : *it) - level;
}

int HangingLevels::max_height() const noexcept {
  int h = 0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const int next = i + 1 < levels_.size() ? levels_[i + 1] : width(family_) + 1;
    h = std::max(h, next - levels_[i]);
  }
  return h;
}

Prefix SubTreeId::root() const {
  const int l = level();
  const u128 head = value ^ (u128{1} << l);
  return Prefix(family, l ? head << (width(family) - l) : 0, l);
}

SubTreeId make_subtree_id(const Prefix &prefix, int level) {
  if (level < 0 || level > prefix.length())
    throw RangeError("hanging level deeper than the prefix");
  return SubTreeId{prefix.family(), (u128{1} << level) + prefix.top_bits(level)};
}

unsigned make_node_number(const Prefix &prefix, int level, int height) {
  const int depth = prefix.length() - level;
  if (depth < 0 || depth >= height)
    throw RangeError(prefix.to_string() + " is not inside the sub-tree at level " +
                     std::to_string(level));
  const auto tail = static_cast<unsigned>(prefix.top_bits(prefix.length()) & low_mask(depth));
  return (1u << depth) + tail;
}

namespace {

struct U128Hash {
  std::size_t operator()(u128 v) const noexcept {
    auto lo = static_cast<std::uint64_t>(v);
    auto hi = static_cast<std::uint64_t>(v >> 64);
    std::uint64_t h = (lo ^ (hi * 0x9E3779B97F4A7C15ull)) * 0xBF58476D1CE4E5B9ull;
    return h ^ (h >> 31);
  }
};

void require_encodable(const HangingLevels &cfg) {
  if (cfg.max_height() > kMaxSubtreeHeight)
    throw RangeError("sub-tree height " + std::to_string(cfg.max_height()) +
                     " exceeds the 64-bit bitmap limit");
}

} // namespace

std::vector<SubTreeBlock> encode_batch(const HangingLevels &cfg, std::span<const Prefix> prefixes,
                                       bool withdraw) {
  require_encodable(cfg);
  const Family family = cfg.family();
  std::unordered_map<u128, std::uint64_t, U128Hash> stm;
  stm.reserve(prefixes.size());
  for (const Prefix &p : prefixes) {
    if (p.family() != family)
      throw RangeError("encode_batch: prefix family differs from the level profile");
    const int len = p.length();
    const int l = cfg.nearest(len);
    const u128 id = (u128{1} << l) + p.top_bits(l);
    const unsigned y = (1u << (len - l)) + static_cast<unsigned>(p.top_bits(len) & low_mask(len - l));
    stm[id] |= std::uint64_t{1} << y;
  }

  std::vector<SubTreeBlock> blocks;
  blocks.reserve(stm.size());
  for (const auto &[id, bm] : stm) {
    SubTreeId sid{family, id};
    blocks.push_back(SubTreeBlock{sid, bm | (withdraw ? 1u : 0u), cfg.subtree_height(sid.level())});
  }
  std::sort(blocks.begin(), blocks.end());
  return blocks;
}

std::vector<SubTreeBlock> encode_batch(const HangingLevels &cfg, const PrefixSet &prefixes,
                                       bool withdraw) {
  std::vector<Prefix> v(prefixes.begin(), prefixes.end());
  return encode_batch(cfg, std::span<const Prefix>(v), withdraw);
}

bool decode_block_into(const HangingLevels &cfg, const SubTreeBlock &block,
                       std::vector<Prefix> &out) {
  if (block.id.value == 0)
    throw RangeError("sub-tree id 0 is invalid");
  if (block.id.family != cfg.family())
    throw RangeError("sub-tree family differs from the level profile");
  const int l1 = block.id.level();
  if (!cfg.contains(l1))
    throw RangeError("sub-tree id level " + std::to_string(l1) + " is not a hanging level");
  const int h = cfg.subtree_height(l1);
  if (h > kMaxSubtreeHeight)
    throw RangeError("sub-tree height exceeds the 64-bit bitmap limit");
  if (h < kMaxSubtreeHeight && (block.bitmap >> (1u << h)) != 0)
    throw RangeError("bitmap has bits beyond its 2^" + std::to_string(h) + "-bit width");

  const int w = width(cfg.family());
  const u128 root = l1 ? (block.id.value ^ (u128{1} << l1)) << (w - l1) : 0;
  std::uint64_t nodes = block.bitmap & ~std::uint64_t{1};
  while (nodes) {
    const unsigned y = static_cast<unsigned>(__builtin_ctzll(nodes));
    nodes &= nodes - 1;
    const int l2 = 31 - __builtin_clz(y);
    const u128 suffix = y ^ (1u << l2);
    const u128 bits = root | (l2 ? suffix << (w - l1 - l2) : 0);
    out.emplace_back(cfg.family(), bits, l1 + l2);
  }
  return block.bitmap & 1;
}

DecodedBlock decode_block(const HangingLevels &cfg, const SubTreeBlock &block) {
  DecodedBlock d;
  d.withdraw = decode_block_into(cfg, block, d.prefixes);
  return d;
}

PrefixSet decode_blocks(const HangingLevels &cfg, std::span<const SubTreeBlock> blocks) {
  std::vector<Prefix> v;
  for (const auto &b : blocks)
    decode_block_into(cfg, b, v);
  return PrefixSet(v.begin(), v.end());
}

void Stm::insert(const SubTreeBlock &block) {
  const std::uint64_t flag = static_cast<std::uint64_t>(flag_);
  auto it = table_.find(block.id);
  std::uint64_t current = it == table_.end() ? 0 : it->second.bitmap;
  if ((block.bitmap & 1) == flag)
    current |= block.bitmap;
  else
    current &= ~block.bitmap;

  if ((current >> 1) == 0) {
    if (it != table_.end())
      table_.erase(it);
    return;
  }
  current = (current & ~std::uint64_t{1}) | flag;
  if (it == table_.end())
    table_.emplace(block.id, Entry{current, block.height});
  else
    it->second.bitmap = current;
}

std::uint64_t Stm::bitmap(const SubTreeId &id) const {
  auto it = table_.find(id);
  return it == table_.end() ? 0 : it->second.bitmap;
}

std::vector<SubTreeBlock> Stm::blocks() const {
  std::vector<SubTreeBlock> out;
  out.reserve(table_.size());
  for (const auto &[id, e] : table_)
    out.push_back(SubTreeBlock{id, e.bitmap, e.height});
  return out;
}

void RpCache::apply(const BitmapRoa &roa) {
  auto it = entries_.find(roa.asn);
  if (it == entries_.end())
    it = entries_
             .emplace(roa.asn, Pair{Stm(roa.asn, StmFlag::announce),
                                    Stm(roa.asn, StmFlag::withdraw)})
             .first;
  for (const auto &b : roa.blocks) {
    if (b.withdraw()) {
      it->second.withdraw.insert(b);
      it->second.announce.insert(b);
    } else {
      it->second.announce.insert(b);
    }
  }
}

const RpCache::Pair *RpCache::find(std::uint32_t asn) const {
  auto it = entries_.find(asn);
  return it == entries_.end() ? nullptr : &it->second;
}

std::map<std::uint32_t, PrefixSet> RpCache::announced(const HangingLevels &v4,
                                                      const HangingLevels &v6) const {
  std::map<std::uint32_t, PrefixSet> out;
  for (const auto &[asn, pair] : entries_) {
    if (pair.announce.empty())
      continue;
    std::vector<Prefix> v;
    for (const auto &b : pair.announce.blocks())
      decode_block_into(b.id.family == Family::v4 ? v4 : v6, b, v);
    out[asn].insert(v.begin(), v.end());
  }
  return out;
}

} // namespace hroa
