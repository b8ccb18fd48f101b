#include "hroa/vrp_csv.hpp"

#include "hroa/error.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>

namespace hroa {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

bool parse_asn(std::string_view s, std::uint32_t &asn) {
  if (s.size() > 2 && (s[0] == 'A' || s[0] == 'a') && (s[1] == 'S' || s[1] == 's'))
    s.remove_prefix(2);
  if (s.empty())
    return false;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), asn);
  return ec == std::errc{} && end == s.data() + s.size();
}

} // namespace

std::vector<Vrp> read_vrp_csv(std::istream &in, HostBits mode) {
  std::vector<Vrp> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty() || view.front() == '#')
      continue;
    auto fields = split(view);
    std::uint32_t asn = 0;
    if (!parse_asn(fields[0], asn)) {
      if (first_content) {
        first_content = false;
        continue; // header
      }
      throw ParseError("bad ASN '" + std::string(fields[0]) + "'", lineno);
    }
    first_content = false;
    if (fields.size() < 2)
      throw ParseError("expected asn,prefix[,max_length]", lineno);

    Prefix prefix;
    try {
      prefix = parse_prefix(fields[1], mode);
    } catch (const ParseError &e) {
      throw ParseError(e.what(), lineno);
    }
    int max_len = prefix.length();
    if (fields.size() >= 3 && !fields[2].empty()) {
      auto f = fields[2];
      auto [end, ec] = std::from_chars(f.data(), f.data() + f.size(), max_len);
      if (ec != std::errc{} || end != f.data() + f.size())
        throw ParseError("bad max_length '" + std::string(f) + "'", lineno);
    }
    try {
      rows.push_back(Vrp{asn, AddressBlock(prefix, max_len)});
    } catch (const RangeError &e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return rows;
}

void write_vrp_csv(std::ostream &out, const std::vector<Vrp> &rows) {
  out << "asn,prefix,max_length\n";
  for (const auto &r : rows)
    out << r.asn << ',' << r.block.prefix().to_string() << ',' << r.block.max_length() << '\n';
}

} // namespace hroa
