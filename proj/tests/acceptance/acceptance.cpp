// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Limits and case counts are pinned below.

#include "hroa/bm_codec.hpp"
#include "hroa/error.hpp"
#include "hroa/hybrid.hpp"
#include "hroa/level_opt.hpp"
#include "hroa/ml_codec.hpp"
#include "hroa/report.hpp"
#include "hroa/rtr_sync.hpp"
#include "hroa/rtr_wire.hpp"
#include "hroa/workload.hpp"

#include "../support/fixtures.hpp"
#include "../support/gen.hpp"
#include "../support/oracles.hpp"
#include "../support/pdu_gen.hpp"

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace hroa;
namespace t = hroa::testing;

namespace {

constexpr double kWorkedExampleSeconds = 1.0;
constexpr double kRoundTripSeconds = 60.0;
constexpr int kRoundTripsPerFamily = 10'000;
constexpr int kUniverses = 1'000;            // per family
constexpr int kSubsetsPerUniverse = 64;
constexpr int kExhaustiveMaxSubset = 8;      // all subsets of this size or less, one universe
constexpr int kOptimizerCases = 240;
constexpr int kOptimizerMaxWidth = 12;
constexpr int kFuzzCases = 10'000;
constexpr std::size_t kSyncVrps = 100'000;
constexpr std::size_t kMaxAggregatedK = 100;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Check {
  std::string failure;
  void expect(bool ok, const std::string &what) {
    if (!ok && failure.empty())
      failure = what;
  }
  bool ok() const { return failure.empty(); }
};

// ---------------------------------------------------------------------------
// 1. Worked examples

PrefixSet running_example() {
  return {parse_prefix("202.127.16.0/20"), parse_prefix("202.127.16.0/21"),
          parse_prefix("202.127.16.0/22"), parse_prefix("202.127.20.0/22")};
}

std::string criterion1(Check &c) {
  const auto t0 = Clock::now();
  const auto cfg = HangingLevels::completed(Family::v4, {20, 23});
  const auto id = make_subtree_id(parse_prefix("202.127.16.0/20"), 20);
  c.expect(id.value == u128{1878001}, "identifier != 1878001");
  c.expect(make_node_number(parse_prefix("202.127.16.0/22"), 20, cfg.subtree_height(20)) == 4,
           "node number of 202.127.16.0/22 != 4");
  auto blocks = encode_batch(cfg, running_example());
  c.expect(blocks.size() == 1 && blocks[0].bitmap == ((1u << 1) | (1u << 2) | (1u << 4) | (1u << 5)),
           "running example bitmap != bits {1,2,4,5}");
  auto wd = encode_batch(cfg, PrefixSet{parse_prefix("202.127.16.0/21")}, true);
  c.expect(wd.size() == 1 && wd[0].bitmap == ((1u << 0) | (1u << 2)),
           "withdrawal bitmap != bits {0,2}");
  const double s = seconds_since(t0);
  c.expect(s < kWorkedExampleSeconds, "worked examples took too long");
  return "id=" + std::to_string(static_cast<std::uint64_t>(id.value)) +
         " node=4 bitmap=" + std::to_string(blocks.empty() ? 0 : blocks[0].bitmap) +
         " withdraw=" + std::to_string(wd.empty() ? 0 : wd[0].bitmap) + " in " +
         std::to_string(s) + "s";
}

// ---------------------------------------------------------------------------
// 2. Scheme counts

Workload workload_of(const PrefixSet &s, std::uint32_t asn) {
  std::vector<Vrp> vrps;
  for (const auto &p : s)
    vrps.push_back(Vrp{asn, AddressBlock(p)});
  return Workload::from_vrps(vrps);
}

std::string criterion2(Check &c) {
  const auto w = workload_of(running_example(), 7497);
  auto n = [&](const Workload &x, Scheme s) { return encode_workload(x, s, HybridConfig{}).pdus.size(); };
  const auto sroa = n(w, Scheme::sroa), mroa = n(w, Scheme::mroa), hroa = n(w, Scheme::hroa);
  const auto chain = n(workload_of({parse_prefix("202.127.16.0/20"), parse_prefix("202.127.16.0/21"),
                                    parse_prefix("202.127.16.0/22")},
                                   7497),
                       Scheme::mroa);
  c.expect(sroa == 4, "sroa != 4");
  c.expect(mroa == 2, "mroa != 2");
  c.expect(hroa == 1, "hroa != 1");
  c.expect(chain == 3, "chain under mroa != 3");
  return "sroa=" + std::to_string(sroa) + " mroa=" + std::to_string(mroa) +
         " hroa=" + std::to_string(hroa) + " chain/mroa=" + std::to_string(chain);
}

// ---------------------------------------------------------------------------
// 3. Round trips

std::string criterion3(Check &c) {
  const auto t0 = Clock::now();
  t::Rng rng(0xC0FFEE);
  std::size_t bm = 0, hybrid = 0, aggregated = 0, stm = 0;
  for (Family f : {Family::v4, Family::v6}) {
    for (int i = 0; i < kRoundTripsPerFamily; ++i) {
      const auto levels = t::random_levels(rng, f);
      const auto s = t::clustered_prefixes(rng, f, 1 + rng() % 48, 1 + rng() % 4, 1 + rng() % 10);
      const auto blocks = encode_batch(levels, s);
      c.expect(decode_blocks(levels, blocks) == s, "bitmap round trip mismatch");
      ++bm;

      Stm table(1, StmFlag::announce);
      for (const auto &b : blocks)
        table.insert(b);
      for (const auto &b : encode_batch(levels, s, true))
        table.insert(b);
      c.expect(table.empty(), "announce-then-withdraw left STM entries");
      ++stm;

      HybridConfig cfg;
      cfg.delta_l_threshold = static_cast<int>(rng() % 7);
      const auto wire_levels = t::random_levels(rng, f, 5);
      (f == Family::v4 ? cfg.v4 : cfg.v6) = wire_levels;
      for (bool agg : {false, true}) {
        cfg.aggregate = agg;
        const auto payload = hybrid_encode(cfg, 64512, s);
        // Through the wire and back, heights resolved from the profile.
        std::vector<rtr::Pdu> pdus;
        for (const auto &pdu : rtr::payload_pdus(payload))
          pdus.push_back(std::get<rtr::Decoded>(rtr::deserialize(rtr::serialize(pdu))).pdu);
        const auto got = decode_pdus(pdus, cfg);
        const auto direct = hybrid_decode(cfg, std::span(&payload, 1));
        const bool ok = got.size() == 1 && got.begin()->second == s && direct.at(64512) == s;
        c.expect(ok, agg ? "aggregated round trip mismatch" : "hybrid round trip mismatch");
        ++(agg ? aggregated : hybrid);
      }
    }
  }
  const double s = seconds_since(t0);
  c.expect(s < kRoundTripSeconds, "round trips exceeded the time limit");
  return std::to_string(bm) + " bitmap, " + std::to_string(hybrid) + " hybrid, " +
         std::to_string(aggregated) + " aggregated, " + std::to_string(stm) + " STM cases in " +
         std::to_string(s) + "s";
}

// ---------------------------------------------------------------------------
// 4. Oracle equivalence

// A /28 universe: 31 trie nodes numbered 1..31 in level order. Blocks are
// complete sub-trees, represented as node bitmasks.
struct Universe {
  std::array<std::uint32_t, 32> subtree_mask[5]{}; // [height][node]
  std::vector<std::uint32_t> blocks_with[32];      // candidate blocks containing node n

  Universe() {
    for (int n = 31; n >= 1; --n) {
      const int depth = 31 - __builtin_clz(static_cast<unsigned>(n));
      subtree_mask[0][n] = 1u << n;
      for (int h = 1; h <= 4 - depth; ++h)
        subtree_mask[h][n] = (1u << n) | subtree_mask[h - 1][2 * n] | subtree_mask[h - 1][2 * n + 1];
    }
    for (int n = 1; n <= 31; ++n) {
      const int depth = 31 - __builtin_clz(static_cast<unsigned>(n));
      for (int h = 0; h <= 4 - depth; ++h)
        for (int m = 1; m <= 31; ++m)
          if (subtree_mask[h][n] >> m & 1)
            blocks_with[m].push_back(subtree_mask[h][n]);
    }
  }

  int min_partition(std::uint32_t set, int used, int best) const {
    if (set == 0)
      return used;
    if (used + 1 >= best)
      return best;
    const int first = __builtin_ctz(set);
    for (std::uint32_t b : blocks_with[first])
      if ((b & set) == b)
        best = std::min(best, min_partition(set & ~b, used + 1, best));
    return best;
  }

  static std::string path(int n) {
    std::string s;
    for (; n > 1; n >>= 1)
      s.insert(s.begin(), (n & 1) ? '1' : '0');
    return s;
  }
};

bool check_subset(const Universe &u, const std::string &root, Family f, std::uint32_t mask,
                  std::string &why) {
  PrefixSet s;
  for (int n = 1; n <= 31; ++n)
    if (mask >> n & 1)
      s.insert(oracle::from_bit_string(f, root + Universe::path(n)));
  const auto blocks = compress_minimal(s);
  std::size_t sum = 0;
  PrefixSet cover;
  for (const auto &b : blocks) {
    auto e = expand(b);
    sum += e.size();
    cover.insert(e.begin(), e.end());
  }
  const int want = u.min_partition(mask, 0, 64);
  if (cover != s || sum != s.size()) {
    why = "compress_minimal is not an exact disjoint partition";
    return false;
  }
  if (static_cast<int>(blocks.size()) != want) {
    why = "compress_minimal size " + std::to_string(blocks.size()) + " != oracle " +
          std::to_string(want);
    return false;
  }
  return true;
}

// Visits every subset of {1..31} with 1..max_size members.
void for_each_subset(int max_size, const std::function<void(std::uint32_t)> &fn) {
  std::function<void(int, int, std::uint32_t)> rec = [&](int next, int left, std::uint32_t mask) {
    if (mask)
      fn(mask);
    if (left == 0)
      return;
    for (int n = next; n <= 31; ++n)
      rec(n + 1, left - 1, mask | (1u << n));
  };
  rec(1, max_size, 0);
}

std::string criterion4(Check &c) {
  const auto t0 = Clock::now();
  const Universe u;
  t::Rng rng(0xBEEF);
  std::size_t random_cases = 0, exhaustive_cases = 0, universes = 0;
  std::string why;

  for (Family f : {Family::v4, Family::v6}) {
    for (int k = 0; k < kUniverses && c.ok(); ++k, ++universes) {
      const auto root = oracle::bit_string(t::random_prefix(rng, f, 0, width(f) - 4));
      for (int i = 0; i < kSubsetsPerUniverse; ++i) {
        std::uint32_t mask = 0;
        const int size = 1 + static_cast<int>(rng() % 8);
        while (__builtin_popcount(mask) < size)
          mask |= 1u << (1 + rng() % 31);
        ++random_cases;
        if (!check_subset(u, root, f, mask, why)) {
          c.expect(false, why);
          break;
        }
      }
    }
  }

  // Exhaustive sweep of one universe per family. The trie structure of every
  // /28 universe is the same, so this covers every subset shape.
  for (Family f : {Family::v4, Family::v6}) {
    const auto root = oracle::bit_string(t::random_prefix(rng, f, width(f) - 4, width(f) - 4));
    const int max_size = f == Family::v4 ? kExhaustiveMaxSubset : 4;
    for_each_subset(max_size, [&](std::uint32_t mask) {
      if (!c.ok())
        return;
      ++exhaustive_cases;
      if (!check_subset(u, root, f, mask, why))
        c.expect(false, why);
    });
  }

  // Optimizer against exhaustive cut-set search on small tries.
  std::size_t optimizer_cases = 0;
  const CostModel model;
  for (int i = 0; i < kOptimizerCases && c.ok(); ++i) {
    const int w = 2 + static_cast<int>(rng() % (kOptimizerMaxWidth - 1)); // 2..12
    const int h_max = 2 + static_cast<int>(rng() % 5);
    std::vector<Prefix> workload;
    std::vector<std::string> strings;
    const std::size_t n = 1 + rng() % 60;
    for (std::size_t j = 0; j < n; ++j) {
      const int len = static_cast<int>(rng() % (w + 1));
      const u128 bits = t::random_bits(rng, 32) & ~low_mask(32 - len);
      workload.emplace_back(Family::v4, bits, len);
      strings.push_back(oracle::bit_string(workload.back()));
    }
    const auto plan = optimize_cuts(w, h_max, [&](int a, int b) {
      return count_nonempty_subtrees(workload, a, b) * model.block_bytes(Family::v4, b - a);
    });
    const auto want = oracle::best_cut_set(strings, w, h_max,
                                           [&](int h) { return model.block_bytes(Family::v4, h); });
    c.expect(plan.cost == want.cost && plan.levels == want.cuts,
             "optimizer deviates from exhaustive cut-set search at width " + std::to_string(w));
    ++optimizer_cases;
  }

  return std::to_string(universes) + " universes, " + std::to_string(random_cases) +
         " sampled + " + std::to_string(exhaustive_cases) + " exhaustive subsets, " +
         std::to_string(optimizer_cases) + " optimizer cases in " +
         std::to_string(seconds_since(t0)) + "s";
}

// ---------------------------------------------------------------------------
// 5. Wire exactness

struct ParseOutcome {
  std::vector<rtr::Pdu> pdus;
  bool failed = false;
};

ParseOutcome parse_whole(const rtr::Bytes &buf) {
  ParseOutcome o;
  std::size_t off = 0;
  while (off < buf.size()) {
    rtr::DecodeResult r;
    try {
      r = rtr::deserialize(std::span(buf).subspan(off));
    } catch (const WireError &) {
      o.failed = true;
      return o;
    }
    if (std::holds_alternative<rtr::NeedMore>(r)) {
      o.failed = true;
      return o;
    }
    auto &d = std::get<rtr::Decoded>(r);
    o.pdus.push_back(std::move(d.pdu));
    off += d.consumed;
  }
  return o;
}

ParseOutcome parse_streaming(const rtr::Bytes &buf, t::Rng &rng) {
  ParseOutcome o;
  rtr::Reassembler ra;
  std::size_t off = 0;
  try {
    while (off < buf.size()) {
      const std::size_t chunk = std::min<std::size_t>(1 + rng() % 64, buf.size() - off);
      ra.feed(std::span(buf).subspan(off, chunk));
      off += chunk;
      while (auto p = ra.next())
        o.pdus.push_back(std::move(*p));
    }
  } catch (const WireError &) {
    o.failed = true;
    return o;
  }
  o.failed = ra.buffered() != 0;
  return o;
}

std::string criterion5(Check &c) {
  const auto golden = t::load_golden_pdus();
  std::set<int> types;
  for (const auto &g : golden) {
    auto r = rtr::deserialize(g.bytes);
    const bool ok = std::holds_alternative<rtr::Decoded>(r) &&
                    std::get<rtr::Decoded>(r).consumed == g.bytes.size() &&
                    std::get<rtr::Decoded>(r).pdu.type() == g.type &&
                    rtr::serialize(std::get<rtr::Decoded>(r).pdu) == g.bytes;
    c.expect(ok, "golden vector " + g.name + " does not round trip");
    types.insert(g.type);
    if (g.type == rtr::kIpv4SubTree)
      c.expect(g.bytes.size() == 20, "type 12 is not 20 bytes");
    if (g.type == rtr::kIpv6SubTree)
      c.expect(g.bytes.size() == 32, "type 13 is not 32 bytes");
  }
  for (int ty : {0, 1, 2, 3, 4, 6, 7, 8, 10, 12, 13, 14, 15})
    c.expect(types.contains(ty), "no golden vector for type " + std::to_string(ty));

  t::Rng rng(0x5EED);
  for (int i = 0; i < 1000; ++i) {
    const auto pdu = t::random_pdu(rng);
    const auto sz = rtr::serialize(pdu).size();
    if (pdu.type() == rtr::kIpv4SubTree)
      c.expect(sz == 20, "random type 12 PDU is not 20 bytes");
    if (pdu.type() == rtr::kIpv6SubTree)
      c.expect(sz == 32, "random type 13 PDU is not 32 bytes");
  }

  std::size_t mutated = 0, failed_streams = 0;
  for (int i = 0; i < kFuzzCases && c.ok(); ++i) {
    std::vector<rtr::Pdu> pdus;
    rtr::Bytes buf;
    const std::size_t n = 1 + rng() % 10;
    for (std::size_t j = 0; j < n; ++j) {
      pdus.push_back(t::random_pdu(rng));
      rtr::serialize(pdus.back(), buf);
    }
    const bool mutate = i % 2 == 1;
    if (mutate) {
      ++mutated;
      const int flips = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < flips; ++k)
        buf[rng() % buf.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
      if (rng() % 4 == 0)
        buf.resize(rng() % buf.size());
    }
    const auto whole = parse_whole(buf);
    const auto stream = parse_streaming(buf, rng);
    c.expect(whole.failed == stream.failed && whole.pdus == stream.pdus,
             "streaming and whole-buffer parses disagree on case " + std::to_string(i));
    if (!mutate)
      c.expect(!whole.failed && whole.pdus == pdus, "clean stream did not round trip");
    bool all_threw = false;
    try {
      c.expect(rtr::deserialize_all(buf) == whole.pdus && !whole.failed,
               "deserialize_all disagrees with incremental parsing");
    } catch (const WireError &) {
      all_threw = true;
    }
    c.expect(all_threw == whole.failed, "deserialize_all error status disagrees");
    failed_streams += whole.failed;
  }
  return std::to_string(golden.size()) + " golden vectors over " + std::to_string(types.size()) +
         " types, " + std::to_string(kFuzzCases) + " fuzz cases (" + std::to_string(mutated) +
         " mutated, " + std::to_string(failed_streams) + " rejected identically)";
}

// ---------------------------------------------------------------------------
// 6. End-to-end sync

Workload sync_workload(std::size_t target, t::Rng &rng) {
  std::vector<Vrp> vrps;
  std::uint32_t asn = 1;
  while (vrps.size() < target) {
    const Family f = asn % 4 == 0 ? Family::v6 : Family::v4;
    const auto s = t::clustered_prefixes(rng, f, 4 + rng() % 30, 1 + rng() % 3, 6);
    for (const auto &p : s)
      vrps.push_back(Vrp{asn, AddressBlock(p)});
    if (asn % 7 == 0) {
      const auto p = t::random_prefix(rng, f, 8, 24);
      vrps.push_back(Vrp{asn, AddressBlock(p, p.length() + static_cast<int>(rng() % 6))});
    }
    ++asn;
  }
  vrps.resize(target);
  return Workload::from_vrps(vrps, "synthetic");
}

// Every AS holds same-length prefixes packed under a few /20s: no complete
// sub-tree exists (scatter degree 1), yet the prefixes share bitmap sub-trees.
Workload scattered_workload(t::Rng &rng, std::size_t ases) {
  std::vector<Vrp> vrps;
  for (std::uint32_t asn = 1; asn <= ases; ++asn) {
    const int clusters = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < clusters; ++k) {
      const u128 base = t::random_bits(rng, 32) & ~low_mask(12);
      for (unsigned i = 0; i < 16; ++i)
        if (rng() % 2)
          vrps.push_back(Vrp{asn, AddressBlock(Prefix(Family::v4, base | (u128{i} << 8), 24))});
    }
    if (asn % 5 == 0) {
      const u128 base = (u128{0x20010DB8} << 96) | (t::random_bits(rng, 128) & low_mask(96) & ~low_mask(84));
      for (unsigned i = 0; i < 16; ++i)
        if (rng() % 2)
          vrps.push_back(Vrp{asn, AddressBlock(Prefix(Family::v6, base | (u128{i} << 80), 48))});
    }
  }
  return Workload::from_vrps(vrps, "scattered");
}

double reduction(std::size_t from, std::size_t to) {
  return from == 0 ? 0.0 : 100.0 * (1.0 - static_cast<double>(to) / static_cast<double>(from));
}

std::string criterion6(Check &c, nlohmann::json &bench) {
  t::Rng rng(0xABCD);
  auto snap = std::make_shared<rtr::CacheSnapshot>();
  snap->session_id = 7;
  snap->serial = 1;
  snap->workload = sync_workload(kSyncVrps, rng);
  const auto want = snap->workload.authorizations();
  std::ostringstream detail;
  detail << snap->workload.row_count() << " VRPs";
  c.expect(snap->workload.row_count() >= kSyncVrps * 99 / 100, "synthetic workload too small");
  for (Scheme s : {Scheme::mroa, Scheme::hroa, Scheme::ahroa}) {
    rtr::ServerOptions opt;
    opt.scheme = s;
    rtr::Server server(snap, opt);
    const auto r = rtr::fetch(rtr::Endpoint{"127.0.0.1", server.port()}, snap->config);
    c.expect(r.authorizations == want,
             std::string("sync under ") + std::string(to_string(s)) + " did not reconstruct the cache");
    c.expect(r.report.pdu_count == server.payload_pdus(), "PDU count mismatch after sync");
    detail << ", " << to_string(s) << " " << r.report.pdu_count << " PDUs/"
           << r.report.total_bytes << " B";
    server.stop();
  }

  const auto scattered = scattered_workload(rng, 2000);
  bool all_one = true;
  for (const auto &[asn, rows] : scattered.rows)
    all_one = all_one && scatter_degree(scattered.authorized(asn)).value() == 1.0;
  c.expect(all_one, "scattered workload has an AS with scatter degree below 1");
  std::map<Scheme, EncodeResult> enc;
  for (Scheme s : {Scheme::mroa, Scheme::hroa, Scheme::ahroa})
    enc[s] = encode_workload(scattered, s, HybridConfig{});
  const auto m = enc[Scheme::mroa], h = enc[Scheme::hroa], a = enc[Scheme::ahroa];
  c.expect(h.pdus.size() < m.pdus.size(), "hroa PDU count not below mroa");
  c.expect(a.pdus.size() < h.pdus.size(), "ahroa PDU count not below hroa");
  bench = {{"workload", "scattered"},
           {"vrps", scattered.row_count()},
           {"ases", scattered.rows.size()},
           {"pdu_count", {{"mroa", m.pdus.size()}, {"hroa", h.pdus.size()}, {"ahroa", a.pdus.size()}}},
           {"total_bytes", {{"mroa", m.total_bytes}, {"hroa", h.total_bytes}, {"ahroa", a.total_bytes}}},
           {"reduction_percent",
            {{"hroa_vs_mroa_pdus", reduction(m.pdus.size(), h.pdus.size())},
             {"hroa_vs_mroa_bytes", reduction(m.total_bytes, h.total_bytes)},
             {"ahroa_vs_mroa_pdus", reduction(m.pdus.size(), a.pdus.size())},
             {"ahroa_vs_mroa_bytes", reduction(m.total_bytes, a.total_bytes)}}}};
  detail << "; scattered: mroa " << m.pdus.size() << " > hroa " << h.pdus.size() << " > ahroa "
         << a.pdus.size();
  return detail.str();
}

// ---------------------------------------------------------------------------
// 7. Aggregation arithmetic

std::string criterion7(Check &c) {
  const SubTreeBlock b{{Family::v4, 1878001}, 0b110110, 3};
  for (std::size_t k = 1; k <= kMaxAggregatedK; ++k) {
    std::vector<SubTreeBlock> blocks(k, b);
    const auto group = aggregate_blocks(blocks, 7497);
    const auto agg = rtr::serialize(rtr::Pdu{1, rtr::AggregatedPdu{group}}).size();
    std::size_t plain = 0;
    for (const auto &x : blocks)
      plain += rtr::serialize(rtr::Pdu{1, rtr::SubTreePdu{x, 7497}}).size();
    c.expect(agg == 12 + 8 * k, "aggregated size != 12 + 8k at k=" + std::to_string(k));
    c.expect(plain == 20 * k, "unaggregated size != 20k at k=" + std::to_string(k));
    c.expect(rtr::pdu_size(group) == agg, "pdu_size disagrees with the serializer");
  }
  return "12 + 8k vs 20k for k = 1.." + std::to_string(kMaxAggregatedK);
}

} // namespace

int main() {
  int failures = 0;
  nlohmann::json bench;
  auto run = [&](int n, const char *title, const std::function<std::string(Check &)> &fn) {
    Check c;
    std::string detail;
    const auto t0 = Clock::now();
    try {
      detail = fn(c);
    } catch (const std::exception &e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const bool ok = c.ok();
    failures += !ok;
    std::printf("criterion %d: %s  %s  [%s] (%.2fs)\n", n, ok ? "PASS" : "FAIL", title,
                ok ? detail.c_str() : c.failure.c_str(), seconds_since(t0));
    std::fflush(stdout);
  };
  run(1, "worked examples", criterion1);
  run(2, "scheme counts", criterion2);
  run(3, "round-trip properties", criterion3);
  run(4, "oracle equivalence", criterion4);
  run(5, "wire exactness", criterion5);
  run(6, "end-to-end sync", [&](Check &c) { return criterion6(c, bench); });
  run(7, "aggregation arithmetic", criterion7);
  if (!bench.is_null())
    std::printf("bench %s\n", bench.dump().c_str());
  std::printf("%s: %d of 7 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
