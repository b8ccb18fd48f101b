#pragma once

// JSON reports consumed by external plotting.

#include "hroa/level_opt.hpp"
#include "hroa/rtr_sync.hpp"
#include "hroa/workload.hpp"

#include <json.hpp>

namespace hroa {

/// ΔL histogram of the workload rows, per family: {"v4": {"0": n, ...}, "v6": {...}}.
nlohmann::json delta_l_histogram(const Workload &w);

/// Scatter degree per AS plus a 0.1-wide histogram and the share of ASes at
/// exactly 1. ASes with a row above the expansion cap are listed as skipped.
nlohmann::json scatter_degree_distribution(const Workload &w, bool include_as0 = false);

/// ASes grouped by authorized-prefix count, with the scatter summary of each
/// group.
nlohmann::json group_by_authorized_count(const Workload &w, bool include_as0 = false);

/// Full statistics report for `stats`.
nlohmann::json workload_stats(const Workload &w, bool include_as0 = false);

/// {scheme, pdu_count, total_bytes, per_family, per_as, delta_l_histogram,
///  scatter_degree_distribution}
nlohmann::json encode_record(const Workload &w, Scheme scheme, const EncodeResult &r,
                             bool include_as0 = false);

nlohmann::json to_json(const std::vector<SweepRow> &rows);
nlohmann::json to_json(const rtr::SyncReport &r);
nlohmann::json to_json(const HangingLevels &levels);

/// Reads {family, levels: [...]}. Throws ParseError.
HangingLevels levels_from_json(const nlohmann::json &j);

} // namespace hroa
