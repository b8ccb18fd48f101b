#include "hroa/workload.hpp"

#include "hroa/error.hpp"
#include "hroa/ml_codec.hpp"
#include "hroa/vrp_csv.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

namespace hroa {

Workload Workload::from_vrps(const std::vector<Vrp> &vrps, std::string source) {
  Workload w;
  w.source = std::move(source);
  w.line_count = vrps.size();
  for (const auto &v : vrps)
    w.rows[v.asn].push_back(v.block);
  for (auto &[asn, rows] : w.rows) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  }
  return w;
}

Workload Workload::read_csv(std::istream &in, std::string source) {
  return from_vrps(read_vrp_csv(in, HostBits::lenient), std::move(source));
}

Workload Workload::read_csv_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open '" + path + "'");
  return read_csv(in, path);
}

std::vector<Vrp> Workload::to_vrps() const {
  std::vector<Vrp> out;
  for (const auto &[asn, rows] : rows)
    for (const auto &b : rows)
      out.push_back(Vrp{asn, b});
  return out;
}

std::size_t Workload::row_count() const noexcept {
  std::size_t n = 0;
  for (const auto &[asn, r] : rows)
    n += r.size();
  return n;
}

PrefixSet Workload::authorized(std::uint32_t asn, int cap) const {
  auto it = rows.find(asn);
  if (it == rows.end())
    return {};
  std::vector<Prefix> v;
  for (const auto &b : it->second)
    expand_into(b, v, cap);
  return PrefixSet(v.begin(), v.end());
}

std::map<std::uint32_t, PrefixSet> Workload::authorizations(int cap) const {
  std::map<std::uint32_t, PrefixSet> out;
  for (const auto &[asn, r] : rows)
    out.emplace(asn, authorized(asn, cap));
  return out;
}

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
  case Scheme::sroa:
    return "sroa";
  case Scheme::troa:
    return "troa";
  case Scheme::mroa:
    return "mroa";
  case Scheme::hroa:
    return "hroa";
  case Scheme::ahroa:
    return "ahroa";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::sroa, Scheme::troa, Scheme::mroa, Scheme::hroa, Scheme::ahroa})
    if (to_string(s) == name)
      return s;
  throw ParseError("unknown scheme '" + std::string(name) + "'");
}

namespace {

std::vector<AddressBlock> minimal_blocks(std::span<const AddressBlock> rows, int cap) {
  std::vector<AddressBlock> out;
  std::vector<Prefix> small;
  for (const auto &b : rows) {
    if (b.height() > cap)
      out.push_back(b);
    else
      expand_into(b, small, cap);
  }
  if (!small.empty()) {
    auto c = compress_minimal(PrefixSet(small.begin(), small.end()));
    out.insert(out.end(), c.begin(), c.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<rtr::Pdu> encode_as(std::uint32_t asn, std::span<const AddressBlock> rows,
                                Scheme scheme, const HybridConfig &cfg, std::uint8_t version) {
  std::vector<rtr::Pdu> out;
  auto legacy = [&](const AddressBlock &b) {
    out.push_back(rtr::Pdu{version, rtr::PrefixPdu{1, b, asn}});
  };
  switch (scheme) {
  case Scheme::sroa: {
    std::vector<Prefix> v;
    for (const auto &b : rows)
      expand_into(b, v, cfg.expansion_cap);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (const auto &p : v)
      legacy(AddressBlock(p));
    break;
  }
  case Scheme::troa:
    for (const auto &b : rows)
      legacy(b);
    break;
  case Scheme::mroa:
    for (const auto &b : minimal_blocks(rows, cfg.expansion_cap))
      legacy(b);
    break;
  case Scheme::hroa:
  case Scheme::ahroa: {
    HybridConfig c = cfg;
    c.aggregate = scheme == Scheme::ahroa;
    out = rtr::payload_pdus(hybrid_encode_rows(c, asn, rows), version);
    break;
  }
  }
  return out;
}

} // namespace

std::size_t payload_size(const rtr::Pdu &pdu) {
  if (auto *p = std::get_if<rtr::PrefixPdu>(&pdu.body))
    return rtr::pdu_size(p->block);
  if (auto *s = std::get_if<rtr::SubTreePdu>(&pdu.body))
    return rtr::pdu_size(s->block);
  if (auto *a = std::get_if<rtr::AggregatedPdu>(&pdu.body))
    return rtr::pdu_size(a->group);
  return rtr::serialize(pdu).size();
}

EncodeResult encode_workload(const Workload &w, Scheme scheme, const HybridConfig &cfg,
                             unsigned jobs, std::uint8_t version) {
  cfg.validate();
  std::vector<std::uint32_t> asns;
  for (const auto &[asn, r] : w.rows)
    asns.push_back(asn);
  std::vector<std::vector<rtr::Pdu>> per(asns.size());

  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < asns.size(); i += step)
      per[i] = encode_as(asns[i], w.rows.at(asns[i]), scheme, cfg, version);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(asns.size())));
  if (jobs <= 1) {
    work(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < jobs; ++t)
        pool.emplace_back([&, t] {
          try {
            work(t, jobs);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
    }
    for (auto &e : errors)
      if (e)
        std::rethrow_exception(e);
  }

  EncodeResult res;
  for (std::size_t i = 0; i < asns.size(); ++i) {
    auto &sum = res.per_as[asns[i]];
    for (auto &pdu : per[i]) {
      const std::size_t sz = payload_size(pdu);
      const std::uint8_t t = pdu.type();
      auto &fam = (t == rtr::kIpv4Prefix || t == rtr::kIpv4SubTree || t == rtr::kIpv4SubTreeAgg)
                      ? res.v4
                      : res.v6;
      ++fam.pdu_count;
      fam.total_bytes += sz;
      ++sum.pdu_count;
      sum.total_bytes += sz;
      res.total_bytes += sz;
      res.pdus.push_back(std::move(pdu));
    }
  }
  return res;
}

namespace {

SubTreeBlock with_height(const SubTreeBlock &b, const HybridConfig &cfg) {
  SubTreeBlock out = b;
  out.height = cfg.levels(b.id.family).subtree_height(b.id.level());
  return out;
}

template <class Fn> PduKind visit_payload(const rtr::Pdu &pdu, Fn &&fn) {
  if (auto *p = std::get_if<rtr::PrefixPdu>(&pdu.body)) {
    if (!(p->flags & 1))
      return PduKind::withdrawal;
    fn(p->asn, &p->block, nullptr);
    return PduKind::payload;
  }
  if (auto *s = std::get_if<rtr::SubTreePdu>(&pdu.body)) {
    if (s->block.withdraw())
      return PduKind::withdrawal;
    fn(s->asn, nullptr, &s->block);
    return PduKind::payload;
  }
  if (auto *a = std::get_if<rtr::AggregatedPdu>(&pdu.body)) {
    for (const auto &b : a->group.blocks)
      if (!b.withdraw())
        fn(a->group.asn, nullptr, &b);
    return PduKind::payload;
  }
  if (std::holds_alternative<rtr::Unsupported>(pdu.body))
    return PduKind::unsupported;
  return PduKind::other;
}

} // namespace

PduKind decode_payload_pdu(const rtr::Pdu &pdu, const HybridConfig &cfg,
                           std::map<std::uint32_t, std::vector<Prefix>> &acc) {
  return visit_payload(pdu, [&](std::uint32_t asn, const AddressBlock *ml, const SubTreeBlock *bm) {
    auto &v = acc[asn];
    if (ml)
      expand_into(*ml, v, cfg.expansion_cap);
    else
      decode_block_into(cfg.levels(bm->id.family), with_height(*bm, cfg), v);
  });
}

std::map<std::uint32_t, PrefixSet> decode_pdus(std::span<const rtr::Pdu> pdus,
                                               const HybridConfig &cfg, std::size_t *unknown) {
  std::map<std::uint32_t, std::vector<Prefix>> acc;
  std::size_t skipped = 0;
  for (const auto &pdu : pdus)
    if (decode_payload_pdu(pdu, cfg, acc) == PduKind::unsupported)
      ++skipped;
  if (unknown)
    *unknown = skipped;
  std::map<std::uint32_t, PrefixSet> out;
  for (auto &[asn, v] : acc)
    out.emplace(asn, PrefixSet(v.begin(), v.end()));
  return out;
}

std::vector<Vrp> decode_pdus_to_rows(std::span<const rtr::Pdu> pdus, const HybridConfig &cfg) {
  std::vector<Vrp> out;
  std::vector<Prefix> scratch;
  for (const auto &pdu : pdus)
    visit_payload(pdu, [&](std::uint32_t asn, const AddressBlock *ml, const SubTreeBlock *bm) {
      if (ml) {
        out.push_back(Vrp{asn, *ml});
        return;
      }
      scratch.clear();
      decode_block_into(cfg.levels(bm->id.family), with_height(*bm, cfg), scratch);
      for (const auto &p : scratch)
        out.push_back(Vrp{asn, AddressBlock(p)});
    });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SweepRow> sweep_parameters(const Workload &w, const std::vector<int> &thresholds,
                                       const std::vector<int> &multiples, bool aggregate) {
  std::vector<SweepRow> out;
  for (int t : thresholds) {
    for (int m : multiples) {
      if (m < 1 || m > kMaxSubtreeHeight)
        throw RangeError("level multiple must lie in 1.." + std::to_string(kMaxSubtreeHeight));
      HybridConfig cfg;
      cfg.delta_l_threshold = t;
      cfg.v4 = HangingLevels::multiples(Family::v4, m);
      cfg.v6 = HangingLevels::multiples(Family::v6, m);
      cfg.aggregate = aggregate;
      SweepRow row{t, m, 0, 0};
      for (const auto &[asn, rows] : w.rows) {
        auto p = hybrid_encode_rows(cfg, asn, rows);
        row.pdu_count += p.pdu_count();
        for (const auto &b : p.ml_blocks)
          row.total_bytes += rtr::pdu_size(b);
        auto extra = [](const SubTreeBlock &b) { return b.height > 5 ? std::size_t{4} : 0; };
        if (!p.aggregated.empty()) {
          for (const auto &g : p.aggregated) {
            row.total_bytes += rtr::pdu_size(g);
            for (const auto &b : g.blocks)
              row.total_bytes += extra(b);
          }
        } else {
          for (const auto &b : p.bm_blocks)
            row.total_bytes += rtr::pdu_size(b) + extra(b);
        }
      }
      out.push_back(row);
    }
  }
  return out;
}

std::optional<SweepRow> best_row(const std::vector<SweepRow> &rows, Objective objective) {
  std::optional<SweepRow> best;
  for (const auto &r : rows) {
    if (!best) {
      best = r;
      continue;
    }
    const auto key = [&](const SweepRow &x) {
      return objective == Objective::bytes ? std::pair{x.total_bytes, x.pdu_count}
                                           : std::pair{x.pdu_count, x.total_bytes};
    };
    if (key(r) < key(*best))
      best = r;
  }
  return best;
}

} // namespace hroa
