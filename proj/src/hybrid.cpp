#include "hroa/hybrid.hpp"

#include "hroa/error.hpp"
#include "hroa/ml_codec.hpp"

#include <algorithm>
#include <unordered_map>

namespace hroa {

void HybridConfig::validate() const {
  if (delta_l_threshold < 0)
    throw RangeError("ΔL threshold must be >= 0");
  if (delta_l_threshold != kNeverMaxLength && delta_l_threshold > expansion_cap)
    throw RangeError("ΔL threshold exceeds the expansion cap");
  if (v4.family() != Family::v4 || v6.family() != Family::v6)
    throw RangeError("level profile family mismatch");
}

namespace {

bool goes_ml(const HybridConfig &cfg, const AddressBlock &b) {
  return cfg.delta_l_threshold != kNeverMaxLength && b.height() >= cfg.delta_l_threshold;
}

// Splits already-chosen blocks into the two paths. bm prefixes covered by an
// ml block are dropped so the parts stay disjoint.
HybridPayload split(const HybridConfig &cfg, std::uint32_t asn,
                    std::span<const AddressBlock> blocks, bool may_overlap) {
  HybridPayload out;
  out.asn = asn;
  std::vector<Prefix> bm[2];
  for (const auto &b : blocks) {
    if (goes_ml(cfg, b))
      out.ml_blocks.push_back(b);
    else
      expand_into(b, bm[b.family() == Family::v4 ? 0 : 1], cfg.expansion_cap);
  }
  std::sort(out.ml_blocks.begin(), out.ml_blocks.end());
  out.ml_blocks.erase(std::unique(out.ml_blocks.begin(), out.ml_blocks.end()),
                      out.ml_blocks.end());

  if (may_overlap && !out.ml_blocks.empty()) {
    std::unordered_map<Prefix, int, PrefixHash> deepest;
    for (const auto &b : out.ml_blocks) {
      auto [it, fresh] = deepest.emplace(b.prefix(), b.max_length());
      if (!fresh)
        it->second = std::max(it->second, b.max_length());
    }
    auto covered = [&](const Prefix &p) {
      Prefix a = p;
      while (true) {
        auto it = deepest.find(a);
        if (it != deepest.end() && it->second >= p.length())
          return true;
        if (a.length() == 0)
          return false;
        a = a.parent();
      }
    };
    for (auto &v : bm)
      std::erase_if(v, covered);
  }

  for (int f = 0; f < 2; ++f) {
    auto &v = bm[f];
    if (v.empty())
      continue;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    auto blocks_f = encode_batch(cfg.levels(f == 0 ? Family::v4 : Family::v6),
                                 std::span<const Prefix>(v));
    out.bm_blocks.insert(out.bm_blocks.end(), blocks_f.begin(), blocks_f.end());
  }
  if (cfg.aggregate && !out.bm_blocks.empty())
    out.aggregated = aggregate_for_wire(out.bm_blocks, asn);
  return out;
}

} // namespace

HybridPayload hybrid_encode(const HybridConfig &cfg, std::uint32_t asn, const PrefixSet &prefixes) {
  cfg.validate();
  if (prefixes.empty())
    throw RangeError("hybrid_encode: empty input");
  auto blocks = compress_minimal(prefixes);
  return split(cfg, asn, blocks, false);
}

HybridPayload hybrid_encode(const HybridConfig &cfg, std::uint32_t asn,
                            std::span<const AddressBlock> blocks) {
  cfg.validate();
  if (blocks.empty())
    throw RangeError("hybrid_encode: empty input");
  if (!cfg.recompress)
    return split(cfg, asn, blocks, true);

  std::vector<Prefix> small;
  std::vector<AddressBlock> chosen;
  for (const auto &b : blocks) {
    if (b.height() > cfg.expansion_cap)
      chosen.push_back(b);
    else
      expand_into(b, small, cfg.expansion_cap);
  }
  if (!small.empty()) {
    auto c = compress_minimal(PrefixSet(small.begin(), small.end()));
    chosen.insert(chosen.end(), c.begin(), c.end());
  }
  return split(cfg, asn, chosen, true);
}

HybridPayload hybrid_encode_rows(const HybridConfig &cfg, std::uint32_t asn,
                                 std::span<const AddressBlock> rows) {
  const bool singletons =
      std::all_of(rows.begin(), rows.end(), [](const AddressBlock &b) { return b.height() == 0; });
  if (!singletons)
    return hybrid_encode(cfg, asn, rows);
  PrefixSet set;
  for (const auto &b : rows)
    set.insert(b.prefix());
  return hybrid_encode(cfg, asn, set);
}

std::map<std::uint32_t, PrefixSet> hybrid_decode(const HybridConfig &cfg,
                                                 std::span<const HybridPayload> payloads) {
  std::map<std::uint32_t, PrefixSet> out;
  for (const auto &p : payloads) {
    std::vector<Prefix> v;
    for (const auto &b : p.ml_blocks)
      expand_into(b, v, cfg.expansion_cap);
    if (!p.aggregated.empty()) {
      for (const auto &g : p.aggregated)
        for (const auto &b : g.blocks)
          decode_block_into(cfg.levels(b.id.family), b, v);
    } else {
      for (const auto &b : p.bm_blocks)
        decode_block_into(cfg.levels(b.id.family), b, v);
    }
    if (v.empty() && p.pdu_count() == 0)
      continue;
    out[p.asn].insert(v.begin(), v.end());
  }
  return out;
}

AggregatedGroup aggregate_blocks(std::span<const SubTreeBlock> blocks, std::uint32_t asn) {
  if (blocks.empty())
    throw RangeError("aggregate_blocks: no blocks");
  const Family f = blocks.front().id.family;
  for (const auto &b : blocks)
    if (b.id.family != f)
      throw RangeError("aggregate_blocks: mixed families");
  return AggregatedGroup{asn, f, std::vector<SubTreeBlock>(blocks.begin(), blocks.end())};
}

std::vector<AggregatedGroup> aggregate_for_wire(std::span<const SubTreeBlock> blocks,
                                                std::uint32_t asn, std::size_t max_pdu_bytes) {
  std::vector<AggregatedGroup> out;
  for (Family f : {Family::v4, Family::v6}) {
    const std::size_t per_block = f == Family::v4 ? 8 : 20;
    if (max_pdu_bytes < 12 + per_block)
      throw RangeError("aggregate_for_wire: PDU cap too small");
    const std::size_t per_group = (max_pdu_bytes - 12) / per_block;
    std::vector<SubTreeBlock> mine;
    for (const auto &b : blocks)
      if (b.id.family == f)
        mine.push_back(b);
    for (std::size_t i = 0; i < mine.size(); i += per_group) {
      const std::size_t n = std::min(per_group, mine.size() - i);
      out.push_back(aggregate_blocks(std::span(mine).subspan(i, n), asn));
    }
  }
  return out;
}

} // namespace hroa
