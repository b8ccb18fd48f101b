#pragma once

// maxLength-based encodings: minimal ROA compression, scatter degree and the
// forged-origin exposure of an over-broad maxLength.

#include "hroa/prefix.hpp"

#include <cstddef>
#include <vector>

namespace hroa {

/// Partitions `prefixes` into the fewest address blocks whose expansions are
/// pairwise disjoint and together equal the input exactly. Every block is a
/// complete sub-tree of authorized prefixes. Output is sorted ascending.
/// Mixed families are compressed independently. Throws RangeError if empty.
std::vector<AddressBlock> compress_minimal(const PrefixSet &prefixes);

struct Ratio {
  std::size_t numerator = 0;
  std::size_t denominator = 1;

  double value() const noexcept {
    return static_cast<double>(numerator) / static_cast<double>(denominator);
  }
  friend bool operator==(const Ratio &a, const Ratio &b) noexcept {
    return a.numerator * b.denominator == b.numerator * a.denominator;
  }
};

/// |compress_minimal(prefixes)| / |prefixes|; 1 means maxLength buys nothing.
Ratio scatter_degree(const PrefixSet &prefixes);

/// Prefixes the block attests that are not in `authorized`.
std::size_t excess_prefixes(const AddressBlock &block, const PrefixSet &authorized,
                            int cap = kDefaultExpansionCap);

} // namespace hroa
