#include "hroa/error.hpp"
#include "hroa/hybrid.hpp"
#include "hroa/ml_codec.hpp"
#include "hroa/rtr_wire.hpp"

#include "../support/gen.hpp"

#include <doctest.h>

using namespace hroa;

namespace {

PrefixSet running_example() {
  return {parse_prefix("202.127.16.0/20"), parse_prefix("202.127.16.0/21"),
          parse_prefix("202.127.16.0/22"), parse_prefix("202.127.20.0/22")};
}

} // namespace

TEST_CASE("running example becomes a single sub-tree PDU") {
  HybridConfig cfg;
  auto p = hybrid_encode(cfg, 7497, running_example());
  CHECK(p.ml_blocks.empty());
  CHECK(p.bm_blocks.size() == 1);
  CHECK(p.pdu_count() == 1);
  std::vector<HybridPayload> v{p};
  CHECK(hybrid_decode(cfg, v).at(7497) == running_example());
}

TEST_CASE("threshold routes tall blocks to the maxLength path") {
  HybridConfig cfg;
  PrefixSet s = expand(AddressBlock(parse_prefix("10.0.0.0/8"), 12));
  s.insert(parse_prefix("11.0.0.0/8"));
  auto p = hybrid_encode(cfg, 1, s);
  CHECK(p.ml_blocks.size() == 1);
  CHECK(p.ml_blocks[0].height() == 4);
  CHECK(p.bm_blocks.size() == 1);

  cfg.delta_l_threshold = kNeverMaxLength;
  auto q = hybrid_encode(cfg, 1, s);
  CHECK(q.ml_blocks.empty());
  std::vector<HybridPayload> v{q};
  CHECK(hybrid_decode(cfg, v).at(1) == s);

  cfg.delta_l_threshold = 0;
  auto r = hybrid_encode(cfg, 1, s);
  CHECK(r.bm_blocks.empty());
  CHECK(r.ml_blocks == compress_minimal(s));
}

TEST_CASE("configuration validation") {
  HybridConfig cfg;
  cfg.delta_l_threshold = -1;
  CHECK_THROWS_AS(cfg.validate(), RangeError);
  cfg.delta_l_threshold = 30;
  CHECK_THROWS_AS(cfg.validate(), RangeError);
  cfg = HybridConfig{};
  cfg.v4 = HangingLevels::default_for(Family::v6);
  CHECK_THROWS_AS(cfg.validate(), RangeError);
  CHECK_THROWS_AS(hybrid_encode(HybridConfig{}, 1, PrefixSet{}), RangeError);
}

TEST_CASE("address-block input keeps the parts disjoint") {
  HybridConfig cfg;
  std::vector<AddressBlock> rows{AddressBlock(parse_prefix("10.0.0.0/8"), 12),
                                 AddressBlock(parse_prefix("10.0.0.0/9"), 10),
                                 AddressBlock(parse_prefix("10.0.0.0/13"))};
  auto p = hybrid_encode(cfg, 1, rows);
  CHECK(p.ml_blocks.size() == 1);
  CHECK(p.bm_blocks.size() == 1); // only 10.0.0.0/13 remains outside the ml block
  std::vector<HybridPayload> v{p};
  PrefixSet want = expand(rows[0]);
  want.insert(rows[2].prefix());
  CHECK(hybrid_decode(cfg, v).at(1) == want);

  cfg.recompress = true;
  auto q = hybrid_encode(cfg, 1, rows);
  std::vector<HybridPayload> w{q};
  CHECK(hybrid_decode(cfg, w).at(1) == want);
}

TEST_CASE("rows of single prefixes are compressed first") {
  HybridConfig cfg;
  cfg.delta_l_threshold = 1;
  std::vector<AddressBlock> rows;
  for (const auto &p : running_example())
    rows.emplace_back(p);
  auto p = hybrid_encode_rows(cfg, 7497, rows);
  // {16.0/21-22} reaches the threshold, the /20 stays a bitmap.
  CHECK(p.ml_blocks.size() == 1);
  CHECK(p.bm_blocks.size() == 1);
}

TEST_CASE("aggregation groups per family and respects the cap") {
  std::vector<SubTreeBlock> blocks;
  for (unsigned i = 0; i < 10; ++i)
    blocks.push_back(SubTreeBlock{{Family::v4, (u128{1} << 20) + i}, 2, 5});
  blocks.push_back(SubTreeBlock{{Family::v6, u128{1} << 30}, 2, 5});
  auto groups = aggregate_for_wire(blocks, 9);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].blocks.size() == 10);
  CHECK(groups[1].family == Family::v6);

  auto small = aggregate_for_wire(blocks, 9, 12 + 8 * 3);
  CHECK(small.size() == 5); // v4 groups of 3,3,3,1 plus one v6 group
  for (const auto &g : small)
    CHECK(rtr::pdu_size(g) <= 36);
  CHECK_THROWS_AS(aggregate_for_wire(blocks, 9, 19), RangeError);
  CHECK_THROWS_AS(aggregate_blocks(blocks, 9), RangeError);
  CHECK_THROWS_AS(aggregate_blocks(std::span<const SubTreeBlock>{}, 9), RangeError);
}

TEST_CASE("large payloads split into several aggregated PDUs") {
  std::vector<SubTreeBlock> blocks;
  for (unsigned i = 0; i < 9000; ++i)
    blocks.push_back(SubTreeBlock{{Family::v4, (u128{1} << 20) + i}, 2, 5});
  auto groups = aggregate_for_wire(blocks, 1);
  CHECK(groups.size() == 2);
  CHECK(groups[0].blocks.size() == (kMaxPduBytes - 12) / 8);
  for (const auto &g : groups)
    CHECK_NOTHROW(rtr::serialize(rtr::Pdu{1, rtr::AggregatedPdu{g}}));
}

TEST_CASE("hybrid and aggregated round trips") {
  testing::Rng rng(77);
  for (int i = 0; i < 300; ++i) {
    Family f = i % 2 ? Family::v6 : Family::v4;
    HybridConfig cfg;
    cfg.delta_l_threshold = static_cast<int>(rng() % 6);
    if (f == Family::v4)
      cfg.v4 = testing::random_levels(rng, f, 5);
    else
      cfg.v6 = testing::random_levels(rng, f, 5);
    cfg.aggregate = i % 3 == 0;
    auto s = testing::clustered_prefixes(rng, f, 1 + rng() % 80, 2, 7);
    auto p = hybrid_encode(cfg, 100 + i, s);
    CHECK(p.aggregated.empty() == (!cfg.aggregate || p.bm_blocks.empty()));
    std::vector<HybridPayload> v{p};
    CHECK(hybrid_decode(cfg, v).at(100 + i) == s);
  }
}
