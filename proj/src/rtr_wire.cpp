#include "hroa/rtr_wire.hpp"

#include "hroa/error.hpp"

#include <algorithm>

namespace hroa::rtr {
namespace {

constexpr std::size_t kHeader = 8;
constexpr std::size_t kMaxFrame = 1u << 20;

template <class T> constexpr bool always_false = false;

void put8(Bytes &o, std::uint8_t v) { o.push_back(v); }
void put16(Bytes &o, std::uint16_t v) {
  o.push_back(static_cast<std::uint8_t>(v >> 8));
  o.push_back(static_cast<std::uint8_t>(v));
}
void put32(Bytes &o, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8)
    o.push_back(static_cast<std::uint8_t>(v >> s));
}
void put128(Bytes &o, u128 v) {
  for (int s = 120; s >= 0; s -= 8)
    o.push_back(static_cast<std::uint8_t>(v >> s));
}
void put_addr(Bytes &o, const Prefix &p) {
  if (p.family() == Family::v4)
    put32(o, static_cast<std::uint32_t>(p.bits()));
  else
    put128(o, p.bits());
}

void header(Bytes &o, std::uint8_t version, std::uint8_t type, std::uint16_t field,
            std::uint32_t length) {
  put8(o, version);
  put8(o, type);
  put16(o, field);
  put32(o, length);
}

void put_subtree(Bytes &o, const SubTreeBlock &b) {
  if (b.id.value == 0)
    throw WireError("sub-tree id 0 is invalid");
  if (b.bitmap > 0xFFFFFFFFull)
    throw WireError("sub-tree bitmap does not fit the 32-bit wire field");
  if (b.id.family == Family::v4) {
    if (b.id.value > 0xFFFFFFFFu)
      throw WireError("v4 sub-tree id wider than 32 bits");
    put32(o, static_cast<std::uint32_t>(b.id.value));
  } else {
    put128(o, b.id.value);
  }
  put32(o, static_cast<std::uint32_t>(b.bitmap));
}

class Cursor {
public:
  Cursor(std::span<const std::uint8_t> b, std::size_t pos) : b_(b), pos_(pos) {}
  std::uint8_t u8() { return b_[pos_++]; }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(b_[pos_] << 8 | b_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v = v << 8 | b_[pos_++];
    return v;
  }
  u128 u128v() {
    u128 v = 0;
    for (int i = 0; i < 16; ++i)
      v = v << 8 | b_[pos_++];
    return v;
  }
  std::size_t pos() const { return pos_; }

private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_;
};

void expect_length(std::uint32_t got, std::uint32_t want, const char *what) {
  if (got != want)
    throw WireError(std::string(what) + " PDU must be " + std::to_string(want) + " bytes, got " +
                    std::to_string(got));
}

SubTreeBlock read_subtree(Cursor &c, Family f) {
  SubTreeBlock b;
  b.id.family = f;
  b.id.value = f == Family::v4 ? u128{c.u32()} : c.u128v();
  b.bitmap = c.u32();
  if (b.id.value == 0)
    throw WireError("sub-tree id 0 is invalid");
  if (b.id.level() > width(f) - 1)
    throw WireError("sub-tree id level out of range");
  return b;
}

} // namespace

std::uint8_t Pdu::type() const {
  return std::visit(
      [](const auto &b) -> std::uint8_t {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ResetQuery>)
          return kResetQuery;
        else if constexpr (std::is_same_v<T, SerialQuery>)
          return kSerialQuery;
        else if constexpr (std::is_same_v<T, CacheResponse>)
          return kCacheResponse;
        else if constexpr (std::is_same_v<T, PrefixPdu>)
          return b.block.family() == Family::v4 ? kIpv4Prefix : kIpv6Prefix;
        else if constexpr (std::is_same_v<T, EndOfData>)
          return kEndOfData;
        else if constexpr (std::is_same_v<T, ErrorReport>)
          return kErrorReport;
        else if constexpr (std::is_same_v<T, SubTreePdu>)
          return b.block.id.family == Family::v4 ? kIpv4SubTree : kIpv6SubTree;
        else if constexpr (std::is_same_v<T, AggregatedPdu>)
          return b.group.family == Family::v4 ? kIpv4SubTreeAgg : kIpv6SubTreeAgg;
        else if constexpr (std::is_same_v<T, Unsupported>)
          return b.type;
        else
          static_assert(always_false<T>);
      },
      body);
}

void serialize(const Pdu &pdu, Bytes &out) {
  const std::uint8_t v = pdu.version;
  const std::uint8_t type = pdu.type();
  std::visit(
      [&](const auto &b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, ResetQuery>) {
          header(out, v, type, 0, 8);
        } else if constexpr (std::is_same_v<T, SerialQuery>) {
          header(out, v, type, b.session_id, 12);
          put32(out, b.serial);
        } else if constexpr (std::is_same_v<T, CacheResponse>) {
          header(out, v, type, b.session_id, 8);
        } else if constexpr (std::is_same_v<T, PrefixPdu>) {
          const bool v4 = b.block.family() == Family::v4;
          header(out, v, type, 0, v4 ? 20 : 32);
          put8(out, b.flags);
          put8(out, static_cast<std::uint8_t>(b.block.prefix().length()));
          put8(out, static_cast<std::uint8_t>(b.block.max_length()));
          put8(out, 0);
          put_addr(out, b.block.prefix());
          put32(out, b.asn);
        } else if constexpr (std::is_same_v<T, EndOfData>) {
          if (v == 0) {
            header(out, v, type, b.session_id, 12);
            put32(out, b.serial);
          } else {
            header(out, v, type, b.session_id, 24);
            put32(out, b.serial);
            put32(out, b.refresh);
            put32(out, b.retry);
            put32(out, b.expire);
          }
        } else if constexpr (std::is_same_v<T, ErrorReport>) {
          const std::size_t len = kHeader + 4 + b.pdu.size() + 4 + b.text.size();
          if (len > kMaxFrame)
            throw WireError("error report too large");
          header(out, v, type, b.code, static_cast<std::uint32_t>(len));
          put32(out, static_cast<std::uint32_t>(b.pdu.size()));
          out.insert(out.end(), b.pdu.begin(), b.pdu.end());
          put32(out, static_cast<std::uint32_t>(b.text.size()));
          out.insert(out.end(), b.text.begin(), b.text.end());
        } else if constexpr (std::is_same_v<T, SubTreePdu>) {
          const bool v4 = b.block.id.family == Family::v4;
          header(out, v, type, 0, v4 ? 20 : 32);
          put_subtree(out, b.block);
          put32(out, b.asn);
        } else if constexpr (std::is_same_v<T, AggregatedPdu>) {
          const auto &g = b.group;
          if (g.blocks.empty())
            throw WireError("aggregated PDU without blocks");
          const std::size_t len = aggregated_size(g.family, g.blocks.size());
          if (len > kMaxPduBytes)
            throw WireError("aggregated PDU of " + std::to_string(len) +
                            " bytes exceeds the 65535-byte cap");
          header(out, v, type, 0, static_cast<std::uint32_t>(len));
          put32(out, g.asn);
          for (const auto &blk : g.blocks) {
            if (blk.id.family != g.family)
              throw WireError("aggregated PDU mixes families");
            put_subtree(out, blk);
          }
        } else if constexpr (std::is_same_v<T, Unsupported>) {
          out.insert(out.end(), b.raw.begin(), b.raw.end());
        } else {
          static_assert(always_false<T>);
        }
      },
      pdu.body);
}

Bytes serialize(const Pdu &pdu) {
  Bytes out;
  serialize(pdu, out);
  return out;
}

DecodeResult deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeader)
    return NeedMore{kHeader};
  Cursor c(bytes, 0);
  Pdu pdu;
  pdu.version = c.u8();
  const std::uint8_t type = c.u8();
  const std::uint16_t field = c.u16();
  const std::uint32_t length = c.u32();
  if (length < kHeader)
    throw WireError("PDU length " + std::to_string(length) + " below the 8-byte header");
  if (length > kMaxFrame)
    throw WireError("PDU length " + std::to_string(length) + " exceeds the frame limit");
  if (bytes.size() < length)
    return NeedMore{length};

  switch (type) {
  case kResetQuery:
    expect_length(length, 8, "reset query");
    pdu.body = ResetQuery{};
    break;
  case kSerialQuery:
    expect_length(length, 12, "serial query");
    pdu.body = SerialQuery{field, c.u32()};
    break;
  case kCacheResponse:
    expect_length(length, 8, "cache response");
    pdu.body = CacheResponse{field};
    break;
  case kIpv4Prefix:
  case kIpv6Prefix: {
    const bool v4 = type == kIpv4Prefix;
    expect_length(length, v4 ? 20 : 32, v4 ? "IPv4 prefix" : "IPv6 prefix");
    PrefixPdu p;
    p.flags = c.u8();
    const int plen = c.u8();
    const int mlen = c.u8();
    c.u8();
    const u128 addr = v4 ? u128{c.u32()} : c.u128v();
    p.asn = c.u32();
    try {
      p.block = AddressBlock(Prefix(v4 ? Family::v4 : Family::v6, addr, plen), mlen);
    } catch (const RangeError &e) {
      throw WireError(std::string("invalid prefix PDU: ") + e.what());
    }
    pdu.body = p;
    break;
  }
  case kEndOfData: {
    EndOfData e;
    e.session_id = field;
    if (pdu.version == 0) {
      expect_length(length, 12, "end of data");
      e.serial = c.u32();
    } else {
      expect_length(length, 24, "end of data");
      e.serial = c.u32();
      e.refresh = c.u32();
      e.retry = c.u32();
      e.expire = c.u32();
    }
    pdu.body = e;
    break;
  }
  case kErrorReport: {
    ErrorReport r;
    r.code = field;
    if (length < kHeader + 8)
      throw WireError("error report shorter than 16 bytes");
    const std::uint32_t plen = c.u32();
    if (plen > length - kHeader - 8)
      throw WireError("error report encapsulated PDU overruns the PDU");
    r.pdu.assign(bytes.begin() + c.pos(), bytes.begin() + c.pos() + plen);
    Cursor t(bytes, c.pos() + plen);
    const std::uint32_t tlen = t.u32();
    if (kHeader + 8 + plen + tlen != length)
      throw WireError("error report text length mismatch");
    r.text.assign(bytes.begin() + t.pos(), bytes.begin() + t.pos() + tlen);
    pdu.body = std::move(r);
    break;
  }
  case kIpv4SubTree:
  case kIpv6SubTree: {
    const bool v4 = type == kIpv4SubTree;
    expect_length(length, v4 ? 20 : 32, v4 ? "IPv4 sub-tree" : "IPv6 sub-tree");
    SubTreePdu s;
    s.block = read_subtree(c, v4 ? Family::v4 : Family::v6);
    s.asn = c.u32();
    pdu.body = s;
    break;
  }
  case kIpv4SubTreeAgg:
  case kIpv6SubTreeAgg: {
    const Family f = type == kIpv4SubTreeAgg ? Family::v4 : Family::v6;
    const std::size_t per = f == Family::v4 ? 8 : 20;
    if (length < 12 + per || (length - 12) % per != 0)
      throw WireError("aggregated PDU length " + std::to_string(length) +
                      " is not 12 + k*" + std::to_string(per));
    AggregatedPdu a;
    a.group.family = f;
    a.group.asn = c.u32();
    const std::size_t k = (length - 12) / per;
    a.group.blocks.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
      a.group.blocks.push_back(read_subtree(c, f));
    pdu.body = std::move(a);
    break;
  }
  default:
    pdu.body = Unsupported{type, Bytes(bytes.begin(), bytes.begin() + length)};
    break;
  }
  return Decoded{std::move(pdu), length};
}

std::vector<Pdu> deserialize_all(std::span<const std::uint8_t> bytes) {
  std::vector<Pdu> out;
  std::size_t off = 0;
  while (off < bytes.size()) {
    DecodeResult r;
    try {
      r = deserialize(bytes.subspan(off));
    } catch (const WireError &e) {
      throw WireError(std::string(e.what()) + " at byte offset " + std::to_string(off), off);
    }
    if (auto *need = std::get_if<NeedMore>(&r))
      throw WireError("truncated PDU at byte offset " + std::to_string(off) + ": need " +
                          std::to_string(need->required) + " bytes, have " +
                          std::to_string(bytes.size() - off),
                      off);
    auto &d = std::get<Decoded>(r);
    out.push_back(std::move(d.pdu));
    off += d.consumed;
  }
  return out;
}

void Reassembler::feed(std::span<const std::uint8_t> bytes) {
  if (pos_ > 0 && pos_ == buf_.size()) {
    buf_.clear();
    pos_ = 0;
  } else if (pos_ > 65536) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
    pos_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<Pdu> Reassembler::next() {
  auto r = deserialize(std::span<const std::uint8_t>(buf_).subspan(pos_));
  if (std::holds_alternative<NeedMore>(r))
    return std::nullopt;
  auto &d = std::get<Decoded>(r);
  pos_ += d.consumed;
  return std::move(d.pdu);
}

void resolve_heights(Pdu &pdu, const HybridConfig &cfg) {
  auto fix = [&](SubTreeBlock &b) {
    b.height = cfg.levels(b.id.family).subtree_height(b.id.level());
  };
  if (auto *s = std::get_if<SubTreePdu>(&pdu.body))
    fix(s->block);
  else if (auto *a = std::get_if<AggregatedPdu>(&pdu.body))
    for (auto &b : a->group.blocks)
      fix(b);
}

std::size_t pdu_size(const AddressBlock &ml_block) {
  return ml_block.family() == Family::v4 ? 20 : 32;
}

std::size_t pdu_size(const SubTreeBlock &bm_block) {
  return bm_block.id.family == Family::v4 ? 20 : 32;
}

std::size_t aggregated_size(Family family, std::size_t blocks) {
  return 12 + blocks * (family == Family::v4 ? 8 : 20);
}

std::size_t pdu_size(const AggregatedGroup &group) {
  return aggregated_size(group.family, group.blocks.size());
}

std::vector<Pdu> payload_pdus(const HybridPayload &payload, std::uint8_t version) {
  std::vector<Pdu> out;
  out.reserve(payload.pdu_count());
  for (const auto &b : payload.ml_blocks)
    out.push_back(Pdu{version, PrefixPdu{1, b, payload.asn}});
  if (!payload.aggregated.empty()) {
    for (const auto &g : payload.aggregated)
      out.push_back(Pdu{version, AggregatedPdu{g}});
  } else {
    for (const auto &b : payload.bm_blocks)
      out.push_back(Pdu{version, SubTreePdu{b, payload.asn}});
  }
  return out;
}

} // namespace hroa::rtr
