#include "hroa/report.hpp"

#include "hroa/error.hpp"
#include "hroa/ml_codec.hpp"

#include <cmath>

namespace hroa {

using nlohmann::json;

json delta_l_histogram(const Workload &w) {
  std::map<int, std::size_t> h4, h6;
  for (const auto &[asn, rows] : w.rows)
    for (const auto &b : rows)
      ++(b.family() == Family::v4 ? h4 : h6)[b.height()];
  auto emit = [](const std::map<int, std::size_t> &h) {
    json o = json::object();
    for (const auto &[k, n] : h)
      o[std::to_string(k)] = n;
    return o;
  };
  return json{{"v4", emit(h4)}, {"v6", emit(h6)}};
}

namespace {

struct AsScatter {
  std::uint32_t asn;
  std::size_t prefixes;
  Ratio degree;
};

std::vector<AsScatter> scatter_per_as(const Workload &w, bool include_as0,
                                      std::vector<std::uint32_t> &skipped) {
  std::vector<AsScatter> out;
  for (const auto &[asn, rows] : w.rows) {
    if (asn == 0 && !include_as0)
      continue;
    bool wide = false;
    for (const auto &b : rows)
      wide = wide || b.height() > kDefaultExpansionCap;
    if (wide) {
      skipped.push_back(asn);
      continue;
    }
    auto set = w.authorized(asn);
    out.push_back(AsScatter{asn, set.size(), scatter_degree(set)});
  }
  return out;
}

json summarize(const std::vector<const AsScatter *> &group) {
  std::size_t ones = 0;
  double sum = 0;
  json hist = json::object();
  for (const auto *s : group) {
    const double v = s->degree.value();
    sum += v;
    if (s->degree.numerator == s->degree.denominator)
      ++ones;
    const int bucket = std::min(9, static_cast<int>(std::floor(v * 10.0)));
    const std::string key = s->degree.numerator == s->degree.denominator
                                ? "1.0"
                                : "[" + std::to_string(bucket / 10.0).substr(0, 3) + "," +
                                      std::to_string((bucket + 1) / 10.0).substr(0, 3) + ")";
    hist[key] = hist.value(key, 0) + 1;
  }
  const double n = static_cast<double>(group.size());
  return json{{"ases", group.size()},
              {"mean", group.empty() ? 0.0 : sum / n},
              {"fraction_at_1", group.empty() ? 0.0 : double(ones) / n},
              {"histogram", hist}};
}

} // namespace

json scatter_degree_distribution(const Workload &w, bool include_as0) {
  std::vector<std::uint32_t> skipped;
  auto all = scatter_per_as(w, include_as0, skipped);
  std::vector<const AsScatter *> ptrs;
  json per_as = json::object();
  for (const auto &s : all) {
    ptrs.push_back(&s);
    per_as[std::to_string(s.asn)] = s.degree.value();
  }
  json out = summarize(ptrs);
  out["per_as"] = per_as;
  out["skipped_ases"] = skipped;
  out["includes_as0"] = include_as0;
  return out;
}

json group_by_authorized_count(const Workload &w, bool include_as0) {
  std::vector<std::uint32_t> skipped;
  auto all = scatter_per_as(w, include_as0, skipped);
  std::map<std::size_t, std::vector<const AsScatter *>> groups;
  for (const auto &s : all)
    groups[s.prefixes].push_back(&s);
  json out = json::object();
  for (const auto &[count, g] : groups)
    out[std::to_string(count)] = summarize(g);
  return out;
}

json workload_stats(const Workload &w, bool include_as0) {
  std::size_t v4 = 0, v6 = 0;
  for (const auto &[asn, rows] : w.rows)
    for (const auto &b : rows)
      ++(b.family() == Family::v4 ? v4 : v6);
  return json{{"source", w.source},
              {"rows", w.row_count()},
              {"ases", w.rows.size()},
              {"rows_per_family", {{"v4", v4}, {"v6", v6}}},
              {"delta_l_histogram", delta_l_histogram(w)},
              {"scatter_degree_distribution", scatter_degree_distribution(w, include_as0)},
              {"groups_by_authorized_count", group_by_authorized_count(w, include_as0)}};
}

json encode_record(const Workload &w, Scheme scheme, const EncodeResult &r, bool include_as0) {
  json per_as = json::object();
  for (const auto &[asn, s] : r.per_as)
    per_as[std::to_string(asn)] = {{"pdu_count", s.pdu_count}, {"total_bytes", s.total_bytes}};
  return json{
      {"scheme", std::string(to_string(scheme))},
      {"pdu_count", r.pdus.size()},
      {"total_bytes", r.total_bytes},
      {"per_family",
       {{"v4", {{"pdu_count", r.v4.pdu_count}, {"total_bytes", r.v4.total_bytes}}},
        {"v6", {{"pdu_count", r.v6.pdu_count}, {"total_bytes", r.v6.total_bytes}}}}},
      {"per_as", per_as},
      {"delta_l_histogram", delta_l_histogram(w)},
      {"scatter_degree_distribution", scatter_degree_distribution(w, include_as0)}};
}

json to_json(const std::vector<SweepRow> &rows) {
  json a = json::array();
  for (const auto &r : rows) {
    json threshold = r.threshold == kNeverMaxLength ? json("inf") : json(r.threshold);
    a.push_back({{"threshold", threshold},
                 {"multiple", r.multiple},
                 {"pdu_count", r.pdu_count},
                 {"total_bytes", r.total_bytes}});
  }
  return a;
}

json to_json(const rtr::SyncReport &r) {
  return json{{"pdu_count", r.pdu_count},
              {"total_bytes", r.total_bytes},
              {"wire_bytes", r.wire_bytes},
              {"decode_count", r.decode_count},
              {"unknown_pdus", r.unknown_pdus},
              {"elapsed_us", std::chrono::duration<double, std::micro>(r.elapsed).count()},
              {"session_id", r.session_id},
              {"serial", r.serial}};
}

json to_json(const HangingLevels &levels) {
  return json{{"family", levels.family() == Family::v4 ? "v4" : "v6"},
              {"levels", levels.levels()}};
}

HangingLevels levels_from_json(const json &j) {
  try {
    const auto fam = j.at("family").get<std::string>();
    Family f;
    if (fam == "v4" || fam == "ipv4")
      f = Family::v4;
    else if (fam == "v6" || fam == "ipv6")
      f = Family::v6;
    else
      throw ParseError("unknown family '" + fam + "'");
    return HangingLevels(f, j.at("levels").get<std::vector<int>>());
  } catch (const json::exception &e) {
    throw ParseError(std::string("bad level profile: ") + e.what());
  } catch (const RangeError &e) {
    throw ParseError(std::string("bad level profile: ") + e.what());
  }
}

} // namespace hroa
