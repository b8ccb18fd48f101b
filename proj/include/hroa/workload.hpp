#pragma once

// Per-AS authorization inputs and the encoding schemes compared over them.

#include "hroa/hybrid.hpp"
#include "hroa/prefix.hpp"
#include "hroa/rtr_wire.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hroa {

struct Workload {
  /// Rows per ASN, sorted and deduplicated.
  std::map<std::uint32_t, std::vector<AddressBlock>> rows;
  std::string source;
  std::size_t line_count = 0;

  static Workload from_vrps(const std::vector<Vrp> &vrps, std::string source = {});
  /// Reads the VRP CSV format. Throws ParseError with the line number.
  static Workload read_csv(std::istream &in, std::string source = {});
  static Workload read_csv_file(const std::string &path);

  std::vector<Vrp> to_vrps() const;
  std::size_t row_count() const noexcept;
  /// Authorized prefixes of one AS (every row expanded).
  PrefixSet authorized(std::uint32_t asn, int cap = kDefaultExpansionCap) const;
  std::map<std::uint32_t, PrefixSet> authorizations(int cap = kDefaultExpansionCap) const;
};

enum class Scheme { sroa, troa, mroa, hroa, ahroa };

std::string_view to_string(Scheme s) noexcept;
/// Throws ParseError on an unknown name.
Scheme parse_scheme(std::string_view name);

struct AsSummary {
  std::size_t pdu_count = 0;
  std::size_t total_bytes = 0;
};

struct FamilySummary {
  std::size_t pdu_count = 0;
  std::size_t total_bytes = 0;
};

struct EncodeResult {
  std::vector<rtr::Pdu> pdus;
  std::size_t total_bytes = 0;
  std::map<std::uint32_t, AsSummary> per_as;
  FamilySummary v4, v6;
};

/// Payload PDUs for the whole workload, ordered by ASN. hroa/ahroa use `cfg`
/// (ahroa forces aggregation on, hroa off); mroa is minimal compression;
/// troa emits rows as given; sroa one PDU per authorized prefix.
/// `jobs` > 1 encodes ASes on a worker pool.
EncodeResult encode_workload(const Workload &w, Scheme scheme, const HybridConfig &cfg,
                             unsigned jobs = 1, std::uint8_t version = rtr::kDefaultVersion);

/// Wire size of one payload PDU.
std::size_t payload_size(const rtr::Pdu &pdu);

enum class PduKind { payload, withdrawal, unsupported, other };

/// Decodes one PDU into `acc` when it carries announcements.
PduKind decode_payload_pdu(const rtr::Pdu &pdu, const HybridConfig &cfg,
                           std::map<std::uint32_t, std::vector<Prefix>> &acc);

/// Authorizations carried by a stream of payload PDUs. Prefix PDUs are
/// expanded, sub-tree PDUs decoded with the profiles in `cfg`; withdrawals
/// and non-payload PDUs are ignored. `unknown` counts unsupported PDUs.
std::map<std::uint32_t, PrefixSet> decode_pdus(std::span<const rtr::Pdu> pdus,
                                               const HybridConfig &cfg,
                                               std::size_t *unknown = nullptr);

/// Same stream as VRP rows: prefix PDUs as blocks, decoded sub-trees as
/// single prefixes. Nothing is expanded, so wide blocks survive.
std::vector<Vrp> decode_pdus_to_rows(std::span<const rtr::Pdu> pdus, const HybridConfig &cfg);

struct SweepRow {
  int threshold = 0;
  int multiple = 0;
  std::size_t pdu_count = 0;
  std::size_t total_bytes = 0;
};

enum class Objective { bytes, count };

/// Hybrid encoding over a grid of ΔL thresholds and hanging-level multiples.
/// Multiples must lie in 1..6; sub-trees taller than 5 are costed with an
/// 8-byte bitmap field.
std::vector<SweepRow> sweep_parameters(const Workload &w, const std::vector<int> &thresholds,
                                       const std::vector<int> &multiples, bool aggregate = false);

/// Grid point minimizing the objective; ties go to the earlier row.
std::optional<SweepRow> best_row(const std::vector<SweepRow> &rows, Objective objective);

} // namespace hroa
