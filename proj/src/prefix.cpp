#include "hroa/prefix.hpp"

#include "hroa/error.hpp"

#include <arpa/inet.h>

#include <array>
#include <charconv>

namespace hroa {

Prefix::Prefix(Family family, u128 bits, int length, HostBits mode)
    : family_(family), bits_(bits), len_(length) {
  const int w = hroa::width(family);
  if (length < 0 || length > w)
    throw RangeError("prefix length " + std::to_string(length) + " out of range 0.." +
                     std::to_string(w));
  if (bits_ & ~low_mask(w))
    throw RangeError("address wider than its family");
  const u128 host = low_mask(w - length);
  if (bits_ & host) {
    if (mode == HostBits::strict)
      throw RangeError("nonzero host bits beyond /" + std::to_string(length));
    bits_ &= ~host;
  }
}

Prefix Prefix::child(bool right) const {
  if (len_ >= width())
    throw RangeError("prefix at maximum length has no children");
  u128 b = bits_;
  if (right)
    b |= u128{1} << (width() - len_ - 1);
  return Prefix(family_, b, len_ + 1);
}

Prefix Prefix::parent() const {
  if (len_ == 0)
    throw RangeError("default route has no parent");
  return Prefix(family_, bits_, len_ - 1, HostBits::lenient);
}

std::string Prefix::to_string() const {
  char buf[INET6_ADDRSTRLEN];
  if (family_ == Family::v4) {
    in_addr a{};
    a.s_addr = htonl(static_cast<std::uint32_t>(bits_));
    inet_ntop(AF_INET, &a, buf, sizeof buf);
  } else {
    in6_addr a{};
    for (int i = 0; i < 16; ++i)
      a.s6_addr[i] = static_cast<std::uint8_t>(bits_ >> (8 * (15 - i)));
    inet_ntop(AF_INET6, &a, buf, sizeof buf);
  }
  return std::string(buf) + "/" + std::to_string(len_);
}

Prefix parse_prefix(std::string_view text, HostBits mode) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos)
    throw ParseError("missing '/len' in prefix '" + std::string(text) + "'");
  const std::string addr(text.substr(0, slash));
  const auto len_text = text.substr(slash + 1);

  int len = -1;
  auto [end, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
  if (ec != std::errc{} || end != len_text.data() + len_text.size() || len_text.empty())
    throw ParseError("bad prefix length in '" + std::string(text) + "'");

  Family family;
  u128 bits = 0;
  if (addr.find(':') != std::string::npos) {
    in6_addr a{};
    if (inet_pton(AF_INET6, addr.c_str(), &a) != 1)
      throw ParseError("bad IPv6 address '" + addr + "'");
    family = Family::v6;
    for (int i = 0; i < 16; ++i)
      bits = (bits << 8) | a.s6_addr[i];
  } else {
    in_addr a{};
    if (inet_pton(AF_INET, addr.c_str(), &a) != 1)
      throw ParseError("bad IPv4 address '" + addr + "'");
    family = Family::v4;
    bits = ntohl(a.s_addr);
  }
  if (len > width(family))
    throw ParseError("prefix length out of range in '" + std::string(text) + "'");
  try {
    return Prefix(family, bits, len, mode);
  } catch (const RangeError &e) {
    throw ParseError(std::string(e.what()) + " in '" + std::string(text) + "'");
  }
}

bool covers(const Prefix &a, const Prefix &b) {
  if (a.family() != b.family())
    throw RangeError("covers: family mismatch");
  return a.length() <= b.length() && b.top_bits(a.length()) == a.top_bits(a.length());
}

AddressBlock::AddressBlock(Prefix prefix, int max_length)
    : prefix_(prefix), max_length_(max_length) {
  if (max_length < prefix.length() || max_length > prefix.width())
    throw RangeError("max length " + std::to_string(max_length) + " invalid for " +
                     prefix.to_string());
}

std::string AddressBlock::to_string() const {
  return prefix_.to_string() + "-" + std::to_string(max_length_);
}

void expand_into(const AddressBlock &block, std::vector<Prefix> &out, int cap) {
  if (block.height() > cap)
    throw RangeError("refusing to expand " + block.to_string() + ": height " +
                     std::to_string(block.height()) + " exceeds cap " + std::to_string(cap));
  const Prefix &root = block.prefix();
  const int w = root.width();
  for (int depth = 0; depth <= block.height(); ++depth) {
    const int len = root.length() + depth;
    const u128 count = u128{1} << depth;
    for (u128 i = 0; i < count; ++i) {
      const u128 bits = root.bits() | (depth ? i << (w - len) : 0);
      out.emplace_back(root.family(), bits, len);
    }
  }
}

PrefixSet expand(const AddressBlock &block, int cap) {
  std::vector<Prefix> v;
  expand_into(block, v, cap);
  return PrefixSet(v.begin(), v.end());
}

} // namespace hroa
