#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hroa {

using u128 = unsigned __int128;

enum class Family : std::uint8_t { v4 = 4, v6 = 6 };

constexpr int width(Family f) noexcept { return f == Family::v4 ? 32 : 128; }

/// Mask with the low `n` bits set; n may be 0..128.
constexpr u128 low_mask(int n) noexcept {
  return n >= 128 ? ~u128{0} : (u128{1} << n) - 1;
}

/// Number of significant bits in `v` (0 for v == 0).
constexpr int bit_length(u128 v) noexcept {
  int n = 0;
  auto hi = static_cast<std::uint64_t>(v >> 64);
  if (hi) {
    n = 64;
    v = hi;
  }
  auto lo = static_cast<std::uint64_t>(v);
  return lo ? n + 64 - __builtin_clzll(lo) : n;
}

/// Whether host bits are rejected or silently cleared on construction.
enum class HostBits { strict, lenient };

/// Default ceiling on ΔL for materializing an address block.
inline constexpr int kDefaultExpansionCap = 20;

/// An IPv4 or IPv6 prefix. The address is held right-aligned in a 128-bit
/// word: a v4 address uses the low 32 bits. Bits beyond `length()` are zero.
class Prefix {
public:
  Prefix() = default;

  /// Throws RangeError on a bad length, or on nonzero host bits in strict mode.
  Prefix(Family family, u128 bits, int length, HostBits mode = HostBits::strict);

  Family family() const noexcept { return family_; }
  u128 bits() const noexcept { return bits_; }
  int length() const noexcept { return len_; }
  int width() const noexcept { return hroa::width(family_); }

  /// The first `n` bits of the address as an integer (n <= width).
  u128 top_bits(int n) const noexcept {
    return n == 0 ? 0 : bits_ >> (width() - n);
  }

  /// Bit `i` counted from the most significant end (0-based).
  bool bit_at(int i) const noexcept { return (bits_ >> (width() - 1 - i)) & 1; }

  /// Child prefix one level deeper; `right` appends a 1 bit.
  Prefix child(bool right) const;
  Prefix parent() const;

  std::string to_string() const;

  friend auto operator<=>(const Prefix &, const Prefix &) = default;
  friend bool operator==(const Prefix &, const Prefix &) = default;

private:
  Family family_ = Family::v4;
  u128 bits_ = 0;
  int len_ = 0;
};

/// Parses "a.b.c.d/len" or "x:y::z/len". Throws ParseError.
Prefix parse_prefix(std::string_view text, HostBits mode = HostBits::strict);

/// True iff `a` is `b` or an ancestor of `b` in the prefix trie.
/// Throws RangeError on a family mismatch.
bool covers(const Prefix &a, const Prefix &b);

/// A (prefix, maxLength) tuple.
class AddressBlock {
public:
  AddressBlock() = default;
  AddressBlock(Prefix prefix, int max_length);
  explicit AddressBlock(Prefix prefix) : AddressBlock(prefix, prefix.length()) {}

  const Prefix &prefix() const noexcept { return prefix_; }
  int max_length() const noexcept { return max_length_; }
  /// ΔL, the height of the complete sub-tree this block spans.
  int height() const noexcept { return max_length_ - prefix_.length(); }
  Family family() const noexcept { return prefix_.family(); }

  std::string to_string() const;

  friend auto operator<=>(const AddressBlock &, const AddressBlock &) = default;
  friend bool operator==(const AddressBlock &, const AddressBlock &) = default;

private:
  Prefix prefix_;
  int max_length_ = 0;
};

struct Vrp {
  std::uint32_t asn = 0;
  AddressBlock block;

  friend auto operator<=>(const Vrp &, const Vrp &) = default;
  friend bool operator==(const Vrp &, const Vrp &) = default;
};

using PrefixSet = std::set<Prefix>;

/// Every prefix the block authorizes, 2^(ΔL+1) - 1 of them.
/// Throws RangeError when ΔL exceeds `cap`.
PrefixSet expand(const AddressBlock &block, int cap = kDefaultExpansionCap);

/// Appends the expansion to `out` without building a set.
void expand_into(const AddressBlock &block, std::vector<Prefix> &out,
                 int cap = kDefaultExpansionCap);

struct PrefixHash {
  std::size_t operator()(const Prefix &p) const noexcept {
    auto lo = static_cast<std::uint64_t>(p.bits());
    auto hi = static_cast<std::uint64_t>(p.bits() >> 64);
    std::uint64_t h = lo * 0x9E3779B97F4A7C15ull ^ (hi + 0x632BE59BD9B4E019ull + (lo << 6));
    h ^= static_cast<std::uint64_t>(p.length()) << 56 ^ static_cast<std::uint64_t>(p.family());
    return std::hash<std::uint64_t>{}(h * 0xBF58476D1CE4E5B9ull);
  }
};

} // namespace hroa
