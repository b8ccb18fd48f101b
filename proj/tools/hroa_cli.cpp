// hroa: encode, decode, analyze and serve route origin authorizations.

#include "hroa/error.hpp"
#include "hroa/level_opt.hpp"
#include "hroa/report.hpp"
#include "hroa/rtr_sync.hpp"
#include "hroa/synthetic.hpp"
#include "hroa/vrp_csv.hpp"
#include "hroa/workload.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <pthread.h>
#include <signal.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

using namespace hroa;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kParse = 2, kRemote = 3 };

class UsageError : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Flag parsing helpers

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size())
        throw std::invalid_argument(item);
    } catch (const std::logic_error &) {
      throw UsageError("expected a comma-separated integer list, got '" + std::string(text) + "'");
    }
  }
  if (out.empty())
    throw UsageError("empty integer list");
  return out;
}

int parse_threshold(const std::string &text) {
  if (text == "inf" || text == "never")
    return kNeverMaxLength;
  return parse_int_list(text).at(0);
}

// "10mbps", "500kbps", "1gbps", "8000bps" or a bare number of bits/s.
std::uint64_t parse_bandwidth(std::string text) {
  for (auto &ch : text)
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  std::uint64_t scale = 1;
  for (auto [suffix, mult] : {std::pair{"gbps", 1'000'000'000ull}, std::pair{"mbps", 1'000'000ull},
                              std::pair{"kbps", 1'000ull}, std::pair{"bps", 1ull}}) {
    const std::string s(suffix);
    if (text.size() > s.size() && text.ends_with(s)) {
      text.resize(text.size() - s.size());
      scale = mult;
      break;
    }
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || v < 0)
      throw std::invalid_argument(text);
    return static_cast<std::uint64_t>(v * static_cast<double>(scale));
  } catch (const std::logic_error &) {
    throw UsageError("bad bandwidth '" + text + "'");
  }
}

// One --levels value: a JSON profile file, "v6:0,5,...", "v4:..." or a bare
// v4 list. Lists are completed with level 0 and fill levels.
void apply_levels(HybridConfig &cfg, const std::string &arg) {
  if (arg.ends_with(".json")) {
    std::ifstream in(arg);
    if (!in)
      throw ParseError("cannot open level profile '" + arg + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception &e) {
      throw ParseError("bad level profile '" + arg + "': " + e.what());
    }
    if (j.contains("profile"))
      j = j["profile"];
    auto lv = levels_from_json(j);
    (lv.family() == Family::v4 ? cfg.v4 : cfg.v6) = lv;
    return;
  }
  Family f = Family::v4;
  std::string_view list = arg;
  if (list.starts_with("v4:") || list.starts_with("v6:")) {
    f = list[1] == '4' ? Family::v4 : Family::v6;
    list.remove_prefix(3);
  }
  auto lv = HangingLevels::completed(f, parse_int_list(list), 5);
  if (lv.max_height() > kMaxSubtreeHeight)
    throw UsageError("level profile leaves a sub-tree taller than " +
                     std::to_string(kMaxSubtreeHeight));
  (f == Family::v4 ? cfg.v4 : cfg.v6) = lv;
}

struct CodecFlags {
  std::vector<std::string> levels;
  std::string threshold = "3";
  bool recompress = false;

  void add(CLI::App *cmd, bool with_threshold = true) {
    cmd->add_option("--levels", levels,
                    "Hanging levels: '20,23' (v4), 'v6:0,5,...', or a JSON profile file")
        ->take_all();
    if (with_threshold) {
      cmd->add_option("--threshold", threshold, "ΔL threshold for the maxLength path, or 'inf'")
          ->capture_default_str();
      cmd->add_flag("--recompress", recompress, "Re-run minimal compression on address blocks");
    }
  }

  HybridConfig config() const {
    HybridConfig cfg;
    for (const auto &l : levels)
      apply_levels(cfg, l);
    cfg.delta_l_threshold = parse_threshold(threshold);
    cfg.recompress = recompress;
    if (cfg.v4.max_height() > 5 || cfg.v6.max_height() > 5)
      throw UsageError("sub-tree PDUs carry 32-bit bitmaps: sub-tree heights must be <= 5");
    try {
      cfg.validate();
    } catch (const RangeError &e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

// ---------------------------------------------------------------------------
// I/O

Workload load_workload(const std::string &path) {
  if (path == "-")
    return Workload::read_csv(std::cin, "stdin");
  return Workload::read_csv_file(path);
}

rtr::Bytes read_bytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ParseError("cannot open '" + path + "'");
  return rtr::Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_bytes(const std::string &path, const rtr::Bytes &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw UsageError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void emit_json(const json &j, const std::string &out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out, std::ios::trunc);
  if (!f)
    throw UsageError("cannot write '" + out + "'");
  f << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Commands

struct EncodeCmd {
  std::string input, out, report, scheme = "hroa";
  CodecFlags codec;
  unsigned jobs = 1;
  int rtr_version = rtr::kDefaultVersion;
  bool include_as0 = false;

  int run() const {
    const auto cfg = codec.config();
    const auto w = load_workload(input);
    const auto s = parse_scheme(scheme);
    const auto res = encode_workload(w, s, cfg, jobs, static_cast<std::uint8_t>(rtr_version));
    if (!out.empty()) {
      rtr::Bytes bytes;
      bytes.reserve(res.total_bytes);
      for (const auto &p : res.pdus)
        rtr::serialize(p, bytes);
      write_bytes(out, bytes);
    }
    emit_json(encode_record(w, s, res, include_as0), report);
    return kOk;
  }
};

struct DecodeCmd {
  std::string input, out;
  CodecFlags codec;
  bool keep_blocks = false;

  int run() const {
    const auto cfg = codec.config();
    const auto pdus = rtr::deserialize_all(read_bytes(input));
    std::vector<Vrp> rows;
    if (keep_blocks) {
      rows = decode_pdus_to_rows(pdus, cfg);
    } else {
      for (const auto &[asn, set] : decode_pdus(pdus, cfg))
        for (const auto &p : set)
          rows.push_back(Vrp{asn, AddressBlock(p)});
    }
    if (out.empty() || out == "-") {
      write_vrp_csv(std::cout, rows);
    } else {
      std::ofstream f(out, std::ios::trunc);
      if (!f)
        throw UsageError("cannot write '" + out + "'");
      write_vrp_csv(f, rows);
    }
    return kOk;
  }
};

struct StatsCmd {
  std::string input, out;
  bool include_as0 = false;

  int run() const {
    emit_json(workload_stats(load_workload(input), include_as0), out);
    return kOk;
  }
};

struct SweepCmd {
  std::string input, out, thresholds = "0,1,2,3,4,5,6,inf", multiples = "1,2,3,4,5,6";
  std::string optimize = "bytes";
  bool aggregate = false;

  int run() const {
    std::vector<int> ts;
    std::string item;
    std::istringstream in(thresholds);
    while (std::getline(in, item, ','))
      ts.push_back(parse_threshold(item));
    const auto ms = parse_int_list(multiples);
    for (int m : ms)
      if (m < 1 || m > kMaxSubtreeHeight)
        throw UsageError("--multiples must lie in 1..6");
    const Objective obj = optimize == "count" ? Objective::count : Objective::bytes;
    const auto rows = sweep_parameters(load_workload(input), ts, ms, aggregate);
    json j{{"objective", optimize}, {"aggregate", aggregate}, {"rows", to_json(rows)}};
    if (auto best = best_row(rows, obj))
      j["best"] = to_json(std::vector<SweepRow>{*best})[0];
    emit_json(j, out);
    return kOk;
  }
};

struct OptimizeCmd {
  std::string input, out, family = "v4";
  int h_max = 5;

  int run() const {
    const Family f = family == "v6" ? Family::v6 : Family::v4;
    const auto w = load_workload(input);
    std::vector<Prefix> prefixes;
    for (const auto &[asn, set] : w.authorizations())
      for (const auto &p : set)
        if (p.family() == f)
          prefixes.push_back(p);
    if (prefixes.empty())
      throw UsageError("no " + family + " prefixes in the workload");
    if (h_max < 2 || h_max > kMaxSubtreeHeight)
      throw UsageError("--h-max must lie in 2..6");
    const auto opt = optimize_levels(prefixes, {}, h_max);
    const auto dflt = HangingLevels::default_for(f);
    json j{{"profile", to_json(opt.levels)},
           {"cost", opt.cost},
           {"h_max", h_max},
           {"prefixes", prefixes.size()},
           {"default_cost", simulated_cost(prefixes, dflt)}};
    emit_json(j, out);
    return kOk;
  }
};

struct BenchCmd {
  std::string input, out;
  std::size_t synthetic = 0;
  int repetitions = 100;
  CodecFlags codec;
  unsigned jobs = 1;

  int run() const {
    if (repetitions < 1)
      throw UsageError("--repetitions must be >= 1");
    if (input.empty() == (synthetic == 0))
      throw UsageError("give either an input CSV or --synthetic N");
    const auto cfg = codec.config();
    const Workload w = synthetic ? scattered_workload(synthetic) : load_workload(input);
    std::size_t authorized = 0;
    for (const auto &[asn, set] : w.authorizations())
      authorized += set.size();

    json schemes = json::object();
    std::map<Scheme, EncodeResult> results;
    for (Scheme s : {Scheme::sroa, Scheme::mroa, Scheme::hroa, Scheme::ahroa}) {
      using Clock = std::chrono::steady_clock;
      double enc = 0, dec = 0;
      EncodeResult r;
      std::size_t decoded = 0;
      for (int i = 0; i < repetitions; ++i) {
        auto t0 = Clock::now();
        r = encode_workload(w, s, cfg, jobs);
        auto t1 = Clock::now();
        auto got = decode_pdus(r.pdus, cfg);
        auto t2 = Clock::now();
        enc += std::chrono::duration<double>(t1 - t0).count();
        dec += std::chrono::duration<double>(t2 - t1).count();
        decoded = 0;
        for (const auto &[asn, set] : got)
          decoded += set.size();
      }
      enc /= repetitions;
      dec /= repetitions;
      schemes[std::string(to_string(s))] = {
          {"pdu_count", r.pdus.size()},
          {"total_bytes", r.total_bytes},
          {"encode_seconds_mean", enc},
          {"decode_seconds_mean", dec},
          {"encode_mpps", enc > 0 ? authorized / enc / 1e6 : 0.0},
          {"decode_mpps", dec > 0 ? decoded / dec / 1e6 : 0.0}};
      results.emplace(s, std::move(r));
    }
    auto pct = [](std::size_t from, std::size_t to) {
      return from ? 100.0 * (1.0 - double(to) / double(from)) : 0.0;
    };
    const auto &m = results.at(Scheme::mroa);
    json red = json::object();
    for (Scheme s : {Scheme::hroa, Scheme::ahroa}) {
      const auto &r = results.at(s);
      red[std::string(to_string(s)) + "_vs_mroa"] = {{"pdus", pct(m.pdus.size(), r.pdus.size())},
                                                     {"bytes", pct(m.total_bytes, r.total_bytes)}};
    }
    emit_json(json{{"workload", w.source},
                   {"vrps", w.row_count()},
                   {"authorized_prefixes", authorized},
                   {"repetitions", repetitions},
                   {"schemes", schemes},
                   {"reduction_percent", red}},
              out);
    return kOk;
  }
};

struct ServeCmd {
  std::string input, listen = "127.0.0.1:8282", scheme = "hroa", bandwidth;
  CodecFlags codec;
  unsigned jobs = 1;
  int session = 1;
  std::uint32_t serial = 1;

  int run() const {
    auto snap = std::make_shared<rtr::CacheSnapshot>();
    snap->config = codec.config();
    snap->workload = load_workload(input);
    snap->session_id = static_cast<std::uint16_t>(session);
    snap->serial = serial;
    rtr::ServerOptions opt;
    opt.scheme = parse_scheme(scheme);
    opt.jobs = jobs;
    if (!bandwidth.empty())
      opt.bandwidth_bps = parse_bandwidth(bandwidth);
    opt.log = [](const std::string &line) { std::cerr << line << '\n'; };

    // Signals are taken synchronously by this thread only.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    rtr::Server server(snap, opt, rtr::Endpoint::parse(listen));
    rtr::Endpoint bound = rtr::Endpoint::parse(listen);
    bound.port = server.port();
    std::cout << json{{"listening", bound.to_string()},
                      {"scheme", scheme},
                      {"payload_pdus", server.payload_pdus()},
                      {"payload_bytes", server.payload_bytes()}}
                     .dump()
              << std::endl;
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
    return kOk;
  }
};

struct FetchCmd {
  std::string endpoint, out, csv;
  CodecFlags codec;
  double timeout = 60;

  int run() const {
    const auto cfg = codec.config();
    const auto r = rtr::fetch(rtr::Endpoint::parse(endpoint), cfg,
                              std::chrono::milliseconds(static_cast<long>(timeout * 1000)));
    if (!csv.empty()) {
      std::vector<Vrp> rows;
      for (const auto &[asn, set] : r.authorizations)
        for (const auto &p : set)
          rows.push_back(Vrp{asn, AddressBlock(p)});
      std::ofstream f(csv, std::ios::trunc);
      if (!f)
        throw UsageError("cannot write '" + csv + "'");
      write_vrp_csv(f, rows);
    }
    auto j = to_json(r.report);
    j["ases"] = r.authorizations.size();
    emit_json(j, out);
    return kOk;
  }
};

int fail(int code, const std::string &what) {
  std::cerr << "hroa: " << what << '\n';
  return code;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Encode, analyze and serve route origin authorizations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "hroa 0.1.0");

  EncodeCmd enc;
  auto *c_enc = app.add_subcommand("encode", "Encode a VRP CSV into payload PDUs");
  c_enc->add_option("input", enc.input, "VRP CSV ('-' for stdin)")->required();
  c_enc->add_option("--scheme", enc.scheme, "sroa, troa, mroa, hroa or ahroa")
      ->check(CLI::IsMember({"sroa", "troa", "mroa", "hroa", "ahroa"}))
      ->capture_default_str();
  c_enc->add_option("--out,-o", enc.out, "Write concatenated PDUs here");
  c_enc->add_option("--report", enc.report, "Write the JSON summary here (default stdout)");
  c_enc->add_option("--jobs,-j", enc.jobs, "Encoding worker threads")->check(CLI::Range(1u, 256u));
  c_enc->add_option("--rtr-version", enc.rtr_version, "Protocol version byte")
      ->check(CLI::Range(0, 255));
  c_enc->add_flag("--include-as0", enc.include_as0, "Count AS0 in the scatter statistics");
  enc.codec.add(c_enc);

  DecodeCmd dec;
  auto *c_dec = app.add_subcommand("decode", "Decode a PDU file into VRP CSV");
  c_dec->add_option("input", dec.input, "PDU file")->required();
  c_dec->add_option("--out,-o", dec.out, "CSV output (default stdout)");
  c_dec->add_flag("--keep-blocks", dec.keep_blocks, "Emit maxLength blocks without expanding them");
  dec.codec.add(c_dec, false);

  StatsCmd st;
  auto *c_st = app.add_subcommand("stats", "Scatter degree and ΔL statistics");
  c_st->add_option("input", st.input, "VRP CSV")->required();
  c_st->add_option("--out,-o", st.out, "JSON output (default stdout)");
  c_st->add_flag("--include-as0", st.include_as0, "Include AS0 in scatter statistics");

  SweepCmd sw;
  auto *c_sw = app.add_subcommand("sweep", "Sweep ΔL thresholds and level multiples");
  c_sw->add_option("input", sw.input, "VRP CSV")->required();
  c_sw->add_option("--thresholds", sw.thresholds, "Comma list; 'inf' disables maxLength")
      ->capture_default_str();
  c_sw->add_option("--multiples", sw.multiples, "Level multiples in 1..6")->capture_default_str();
  c_sw->add_option("--optimize", sw.optimize, "Pick the best row by bytes or count")
      ->check(CLI::IsMember({"bytes", "count"}))
      ->capture_default_str();
  c_sw->add_flag("--aggregate", sw.aggregate, "Aggregate bitmap blocks per AS");
  c_sw->add_option("--out,-o", sw.out, "JSON output (default stdout)");

  OptimizeCmd op;
  auto *c_op = app.add_subcommand("optimize-levels", "Find size-optimal hanging levels");
  c_op->add_option("input", op.input, "VRP CSV")->required();
  c_op->add_option("--family", op.family)->check(CLI::IsMember({"v4", "v6"}))->capture_default_str();
  c_op->add_option("--h-max", op.h_max, "Tallest sub-tree allowed (2..6)")->capture_default_str();
  c_op->add_option("--out,-o", op.out, "JSON output (default stdout)");

  BenchCmd be;
  auto *c_be = app.add_subcommand("bench", "Encode/decode throughput and PDU reductions");
  c_be->add_option("input", be.input, "VRP CSV");
  c_be->add_option("--synthetic", be.synthetic, "Use a scattered synthetic workload of N prefixes");
  c_be->add_option("--repetitions,-n", be.repetitions)->capture_default_str();
  c_be->add_option("--jobs,-j", be.jobs)->check(CLI::Range(1u, 256u));
  c_be->add_option("--out,-o", be.out, "JSON output (default stdout)");
  be.codec.add(c_be);

  ServeCmd sv;
  auto *c_sv = app.add_subcommand("serve", "Serve a VRP CSV to routers over RTR");
  c_sv->add_option("input", sv.input, "VRP CSV")->required();
  c_sv->add_option("--listen", sv.listen, "host:port (port 0 picks one)")->capture_default_str();
  c_sv->add_option("--scheme", sv.scheme)
      ->check(CLI::IsMember({"sroa", "troa", "mroa", "hroa", "ahroa"}))
      ->capture_default_str();
  c_sv->add_option("--bandwidth", sv.bandwidth, "Shape the writer, e.g. 10mbps");
  c_sv->add_option("--session", sv.session)->check(CLI::Range(0, 65535));
  c_sv->add_option("--serial", sv.serial);
  c_sv->add_option("--jobs,-j", sv.jobs)->check(CLI::Range(1u, 256u));
  sv.codec.add(c_sv);

  FetchCmd fe;
  auto *c_fe = app.add_subcommand("fetch", "Reset-query a cache and report the transfer");
  c_fe->add_option("endpoint", fe.endpoint, "host:port")->required();
  c_fe->add_option("--timeout", fe.timeout, "Seconds")->capture_default_str();
  c_fe->add_option("--csv", fe.csv, "Also write the received authorizations as CSV");
  c_fe->add_option("--out,-o", fe.out, "JSON output (default stdout)");
  fe.codec.add(c_fe, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*c_enc)
      return enc.run();
    if (*c_dec)
      return dec.run();
    if (*c_st)
      return st.run();
    if (*c_sw)
      return sw.run();
    if (*c_op)
      return op.run();
    if (*c_be)
      return be.run();
    if (*c_sv)
      return sv.run();
    if (*c_fe)
      return fe.run();
  } catch (const UsageError &e) {
    return fail(kUsage, e.what());
  } catch (const ParseError &e) {
    return fail(kParse, e.what());
  } catch (const WireError &e) {
    return fail(kParse, e.what());
  } catch (const ProtocolError &e) {
    return fail(kRemote, e.what());
  } catch (const TransportError &e) {
    return fail(kRemote, e.what());
  } catch (const RangeError &e) {
    return fail(kUsage, e.what());
  } catch (const std::exception &e) {
    return fail(kUsage, e.what());
  }
  return kUsage;
}
