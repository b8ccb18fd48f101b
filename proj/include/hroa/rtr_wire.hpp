#pragma once

// RTR PDU serialization. Every PDU starts with an 8-byte header:
//   version(1) type(1) field(2) length(4)
// and is big-endian throughout. Besides the standard prefix and session
// PDUs this carries the sub-tree PDUs:
//   12  v4 sub-tree       header, id(4),  bitmap(4), asn(4)        20 bytes
//   13  v6 sub-tree       header, id(16), bitmap(4), asn(4)        32 bytes
//   14  v4 aggregated     header, asn(4), k x [id(4),  bitmap(4)]  12 + 8k
//   15  v6 aggregated     header, asn(4), k x [id(16), bitmap(4)]  12 + 20k
// The announce/withdraw state of 12-15 lives in bitmap bit 0.

#include "hroa/hybrid.hpp"
#include "hroa/prefix.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hroa::rtr {

inline constexpr std::uint8_t kDefaultVersion = 1;

enum PduType : std::uint8_t {
  kSerialNotify = 0,
  kSerialQuery = 1,
  kResetQuery = 2,
  kCacheResponse = 3,
  kIpv4Prefix = 4,
  kIpv6Prefix = 6,
  kEndOfData = 7,
  kCacheReset = 8,
  kErrorReport = 10,
  kIpv4SubTree = 12,
  kIpv6SubTree = 13,
  kIpv4SubTreeAgg = 14,
  kIpv6SubTreeAgg = 15,
};

enum ErrorCode : std::uint16_t {
  kCorruptData = 0,
  kInternalError = 1,
  kNoDataAvailable = 2,
  kInvalidRequest = 3,
  kUnsupportedVersion = 4,
  kUnsupportedPduType = 5,
};

struct ResetQuery {
  friend bool operator==(const ResetQuery &, const ResetQuery &) = default;
};

struct SerialQuery {
  std::uint16_t session_id = 0;
  std::uint32_t serial = 0;
  friend bool operator==(const SerialQuery &, const SerialQuery &) = default;
};

struct CacheResponse {
  std::uint16_t session_id = 0;
  friend bool operator==(const CacheResponse &, const CacheResponse &) = default;
};

/// Legacy v4 (type 4) or v6 (type 6) prefix PDU, chosen by the block family.
struct PrefixPdu {
  std::uint8_t flags = 1; // bit 0: announce
  AddressBlock block;
  std::uint32_t asn = 0;
  friend bool operator==(const PrefixPdu &, const PrefixPdu &) = default;
};

struct EndOfData {
  std::uint16_t session_id = 0;
  std::uint32_t serial = 0;
  std::uint32_t refresh = 3600;
  std::uint32_t retry = 600;
  std::uint32_t expire = 7200;
  friend bool operator==(const EndOfData &, const EndOfData &) = default;
};

struct ErrorReport {
  std::uint16_t code = kCorruptData;
  std::vector<std::uint8_t> pdu;
  std::string text;
  friend bool operator==(const ErrorReport &, const ErrorReport &) = default;
};

/// Type 12 or 13, chosen by the block family. The block height is not on the
/// wire; decoding resolves it from the level profile.
struct SubTreePdu {
  SubTreeBlock block;
  std::uint32_t asn = 0;
  friend bool operator==(const SubTreePdu &, const SubTreePdu &) = default;
};

/// Type 14 or 15.
struct AggregatedPdu {
  AggregatedGroup group;
  friend bool operator==(const AggregatedPdu &, const AggregatedPdu &) = default;
};

/// Any PDU type this codec does not model, kept verbatim.
struct Unsupported {
  std::uint8_t type = 0;
  std::vector<std::uint8_t> raw;
  friend bool operator==(const Unsupported &, const Unsupported &) = default;
};

using Body = std::variant<ResetQuery, SerialQuery, CacheResponse, PrefixPdu, EndOfData,
                          ErrorReport, SubTreePdu, AggregatedPdu, Unsupported>;

struct Pdu {
  std::uint8_t version = kDefaultVersion;
  Body body;

  std::uint8_t type() const;
  friend bool operator==(const Pdu &, const Pdu &) = default;
};

using Bytes = std::vector<std::uint8_t>;

/// Appends the wire form of `pdu`. Throws WireError on out-of-range fields
/// (a bitmap wider than 32 bits, an id too wide for its family, an
/// aggregated PDU above 65535 bytes).
void serialize(const Pdu &pdu, Bytes &out);
Bytes serialize(const Pdu &pdu);

struct Decoded {
  Pdu pdu;
  std::size_t consumed = 0;
};

struct NeedMore {
  std::size_t required = 0; // total bytes needed for the next PDU
};

using DecodeResult = std::variant<Decoded, NeedMore>;

/// Parses one PDU from the front of `bytes`. Sub-tree blocks come back with
/// height 0; see resolve_heights. Throws WireError on a length below 8, a
/// length that does not match a fixed-size type, or a malformed body.
DecodeResult deserialize(std::span<const std::uint8_t> bytes);

/// Parses a whole buffer of back-to-back PDUs. Throws WireError carrying the
/// byte offset of the offending PDU, including a truncated tail.
std::vector<Pdu> deserialize_all(std::span<const std::uint8_t> bytes);

/// Incremental framing for a byte stream; single owner.
class Reassembler {
public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Next complete PDU, if buffered. Throws WireError on malformed framing.
  std::optional<Pdu> next();
  std::size_t buffered() const noexcept { return buf_.size() - pos_; }

private:
  Bytes buf_;
  std::size_t pos_ = 0;
};

/// Fills in block heights from the level profiles (the wire omits them).
void resolve_heights(Pdu &pdu, const HybridConfig &cfg);

/// Wire sizes of the payload units.
std::size_t pdu_size(const AddressBlock &ml_block);
std::size_t pdu_size(const SubTreeBlock &bm_block);
std::size_t pdu_size(const AggregatedGroup &group);
std::size_t aggregated_size(Family family, std::size_t blocks);

/// Payload PDUs of a hybrid payload: legacy prefix PDUs for ml blocks, then
/// sub-tree PDUs or aggregated PDUs.
std::vector<Pdu> payload_pdus(const HybridPayload &payload,
                              std::uint8_t version = kDefaultVersion);

} // namespace hroa::rtr
