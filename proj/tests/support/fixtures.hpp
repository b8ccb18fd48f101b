#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hroa::testing {

struct GoldenPdu {
  std::string name;
  int type = 0;
  std::vector<std::uint8_t> bytes;
};

inline std::vector<std::uint8_t> from_hex(const std::string &hex) {
  std::vector<std::uint8_t> out;
  std::string digits;
  for (char c : hex)
    if (!std::isspace(static_cast<unsigned char>(c)))
      digits.push_back(c);
  if (digits.size() % 2)
    throw std::runtime_error("odd hex digit count");
  for (std::size_t i = 0; i < digits.size(); i += 2)
    out.push_back(static_cast<std::uint8_t>(std::stoi(digits.substr(i, 2), nullptr, 16)));
  return out;
}

inline std::vector<GoldenPdu> load_golden_pdus() {
  std::ifstream in(std::string(HROA_FIXTURE_DIR) + "/golden_pdus.txt");
  if (!in)
    throw std::runtime_error("golden_pdus.txt not found");
  std::vector<GoldenPdu> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::istringstream ls(line);
    GoldenPdu g;
    ls >> g.name >> g.type;
    std::string rest;
    std::getline(ls, rest);
    g.bytes = from_hex(rest);
    out.push_back(std::move(g));
  }
  return out;
}

} // namespace hroa::testing
